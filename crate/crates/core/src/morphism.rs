//! Orthogonality-preserving bijections of the module and transport of
//! frames through them.
//!
//! In the fiberwise model such a map is, on every fiber, a positive scale
//! times a unitary: `Ψ(x)_k = c_k U_k x_k` for complex fibers and
//! `Ψ(x)_k = c_k x_k u_k` (right multiplication by a unit quaternion) for
//! quaternion fibers. Either way `⟨Ψx, Ψy⟩ = ν ⟨x, y⟩` with `ν = (c_k²)_k`.

use num_complex::Complex;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::frame::{FiberSpectrum, FrameBounds, WeightedFrame};
use crate::linalg::CMatrix;
use crate::module::{ModuleShape, ModuleVector};
use crate::scalar::{FiberScalar, Quaternion, Real, ScalarKind};
use crate::submodule::{FiberProjection, Submodule};

/// Unitary part of one fiber.
#[derive(Clone, Debug, PartialEq)]
pub enum Rotation<T> {
    Unitary(CMatrix<T>),
    /// Unit quaternion acting by right multiplication.
    Quaternion(Quaternion<T>),
}

impl<T: Real> Rotation<T> {
    fn inverse(&self) -> Self {
        match self {
            Rotation::Unitary(u) => Rotation::Unitary(u.adjoint()),
            Rotation::Quaternion(q) => Rotation::Quaternion(q.conj()),
        }
    }
}

/// Givens rotation by `angle` in the `(i, j)` coordinate plane of `ℂᵐ`.
pub fn givens<T: Real>(dim: usize, i: usize, j: usize, angle: T) -> CMatrix<T> {
    let mut g = CMatrix::identity(dim);
    let (s, c) = angle.sin_cos();
    g.set(i, i, Complex::new(c, T::zero()));
    g.set(j, j, Complex::new(c, T::zero()));
    g.set(i, j, Complex::new(-s, T::zero()));
    g.set(j, i, Complex::new(s, T::zero()));
    g
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoMap<T> {
    shape: ModuleShape,
    scales: Vec<T>,
    rotations: Vec<Rotation<T>>,
}

impl<T: Real> OrthoMap<T> {
    pub fn new(shape: ModuleShape, scales: Vec<T>, rotations: Vec<Rotation<T>>) -> Result<Self> {
        let n = shape.fibers();
        if scales.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: scales.len(),
            });
        }
        if rotations.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: rotations.len(),
            });
        }
        if let Some(k) = scales.iter().position(|&c| !(c > T::zero()) || !c.is_finite()) {
            return Err(Error::InvalidMap(format!(
                "fiber {k}: scale must be positive and finite"
            )));
        }
        let tol = T::FRAME_TOL;
        for (k, r) in rotations.iter().enumerate() {
            match (shape.kind(), r) {
                (ScalarKind::Complex, Rotation::Unitary(u)) => {
                    if u.dim() != shape.dim(k) {
                        return Err(Error::ShapeMismatch(format!(
                            "fiber {k}: rotation is {0}x{0}, fiber dimension is {1}",
                            u.dim(),
                            shape.dim(k)
                        )));
                    }
                    let defect = u.adjoint().matmul(u).sub(&CMatrix::identity(u.dim())).frobenius_norm();
                    if !(defect <= tol * T::from_usize(u.dim()).unwrap_or(T::one())) {
                        return Err(Error::InvalidMap(format!("fiber {k}: rotation is not unitary")));
                    }
                }
                (ScalarKind::Quaternion, Rotation::Quaternion(q)) => {
                    if !((q.norm() - T::one()).abs() <= tol) {
                        return Err(Error::InvalidMap(format!("fiber {k}: quaternion is not a unit")));
                    }
                }
                (kind, _) => {
                    return Err(Error::InvalidMap(format!(
                        "fiber {k}: rotation type does not match {kind} fibers"
                    )))
                }
            }
        }
        Ok(Self {
            shape,
            scales,
            rotations,
        })
    }

    pub fn identity(shape: &ModuleShape) -> Self {
        Self::scaling(shape, vec![T::one(); shape.fibers()]).expect("unit scales are valid")
    }

    /// Pure scaling `x_k ↦ c_k x_k`.
    pub fn scaling(shape: &ModuleShape, scales: Vec<T>) -> Result<Self> {
        let rotations = (0..shape.fibers())
            .map(|k| match shape.kind() {
                ScalarKind::Complex => Rotation::Unitary(CMatrix::identity(shape.dim(k))),
                ScalarKind::Quaternion => Rotation::Quaternion(Quaternion::one()),
            })
            .collect();
        Self::new(shape.clone(), scales, rotations)
    }

    pub fn shape(&self) -> &ModuleShape {
        &self.shape
    }

    pub fn scales(&self) -> &[T] {
        &self.scales
    }

    pub fn rotations(&self) -> &[Rotation<T>] {
        &self.rotations
    }

    pub fn apply(&self, x: &ModuleVector<T>) -> Result<ModuleVector<T>> {
        self.shape.ensure_same(x.shape())?;
        let fibers = self
            .rotations
            .iter()
            .zip(&self.scales)
            .zip(x.fibers())
            .map(|((r, &c), xk)| match r {
                Rotation::Unitary(u) => {
                    let v: Vec<Complex<T>> = xk.iter().map(|s| s.as_complex().expect("complex fiber")).collect();
                    u.apply(&v).into_iter().map(|z| FiberScalar::Complex(z * c)).collect()
                }
                Rotation::Quaternion(q) => xk
                    .iter()
                    .map(|s| FiberScalar::Quaternion((s.as_quaternion() * *q).scale(c)))
                    .collect(),
            })
            .collect();
        Ok(ModuleVector::from_parts(x.shape().clone(), fibers))
    }

    pub fn inverse(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            scales: self.scales.iter().map(|&c| T::one() / c).collect(),
            rotations: self.rotations.iter().map(Rotation::inverse).collect(),
        }
    }

    /// `ν(Ψ) = (c_k²)_k`.
    pub fn nu(&self) -> AlgebraElement<T> {
        let sq: Vec<T> = self.scales.iter().map(|&c| c * c).collect();
        AlgebraElement::from_reals(self.shape.kind(), &sq).expect("non-empty")
    }

    /// Image submodule `Ψ(V)`, with projection `Ψ P Ψ⁻¹ = U P Uᴴ` per fiber.
    pub fn transport_submodule(&self, v: &Submodule<T>) -> Result<Submodule<T>> {
        self.shape.ensure_same(v.shape())?;
        let fibers = v
            .fibers()
            .iter()
            .zip(&self.rotations)
            .map(|(p, r)| match (p, r) {
                (FiberProjection::Matrix(m), Rotation::Unitary(u)) => {
                    FiberProjection::Matrix(u.matmul(m).matmul(&u.adjoint()))
                }
                // right multiplication maps {0} and ℍ onto themselves
                (sel, _) => sel.clone(),
            })
            .collect();
        Submodule::from_fibers(self.shape.clone(), fibers)
    }

    /// `((Ψ(V_n), ω_n))_n`; the source must be a frame.
    pub fn transport_frame(&self, frame: &WeightedFrame<T>) -> Result<TransportedFrame<T>> {
        self.shape.ensure_same(frame.shape())?;
        frame.require_frame()?;
        let subs = frame
            .submodules()
            .iter()
            .map(|v| self.transport_submodule(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(TransportedFrame {
            frame: frame.with_submodules(subs)?,
            map: self.clone(),
        })
    }
}

/// A frame pushed through an orthogonality-preserving map, together with
/// the map, so that bounds can be read in either frame of reference.
#[derive(Clone, Debug)]
pub struct TransportedFrame<T> {
    pub frame: WeightedFrame<T>,
    pub map: OrthoMap<T>,
}

impl<T: Real> TransportedFrame<T> {
    /// Optimal bounds of the transported frame against `y` itself. Projections
    /// are scale-invariant, so these coincide with the source bounds.
    pub fn intrinsic_bounds(&self) -> FrameBounds<T> {
        self.frame.bounds()
    }

    /// Optimal bounds of `Σ ω_n² |π_{Ψ(V_n)} y|²` against `Ψ⁻¹(y)`, i.e. the
    /// fiberwise extremes of `Ψ* S' Ψ`. These equal `ν^{1/2} A` and
    /// `ν^{1/2} B` for source bounds `A`, `B`.
    pub fn pullback_bounds(&self) -> FrameBounds<T> {
        let s = self.frame.frame_operator();
        let per_fiber: Vec<FiberSpectrum<T>> = self
            .map
            .rotations
            .iter()
            .zip(&self.map.scales)
            .zip(s.fibers())
            .map(|((r, &c), sk)| {
                let pulled = match r {
                    Rotation::Unitary(u) => u.adjoint().matmul(sk).matmul(u).scale(c * c),
                    Rotation::Quaternion(_) => sk.scale(c * c),
                };
                let e = pulled.hermitian_eigenvalues();
                FiberSpectrum {
                    lambda_min: e[0],
                    lambda_max: e[e.len() - 1],
                }
            })
            .collect();
        let c = per_fiber.iter().map(|s| s.lambda_min).fold(T::infinity(), T::min);
        let d = per_fiber.iter().map(|s| s.lambda_max).fold(T::neg_infinity(), T::max);
        let kind = self.frame.shape().kind();
        let root = |v: T| v.max(T::zero()).sqrt();
        let lower = AlgebraElement::from_reals(kind, &per_fiber.iter().map(|s| root(s.lambda_min)).collect::<Vec<_>>())
            .expect("non-empty");
        let upper = AlgebraElement::from_reals(kind, &per_fiber.iter().map(|s| root(s.lambda_max)).collect::<Vec<_>>())
            .expect("non-empty");
        FrameBounds {
            is_frame: c > T::FRAME_TOL * T::one().max(d),
            lower,
            upper,
            c,
            d,
            per_fiber,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn three_lines() -> WeightedFrame<f64> {
        let shape = ModuleShape::uniform(ScalarKind::Complex, 1, 2).unwrap();
        let subs = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
            .iter()
            .map(|v| Submodule::span(&shape, &[vec![vec![c(v[0]), c(v[1])]]]).unwrap())
            .collect();
        WeightedFrame::unweighted(subs).unwrap()
    }

    #[test]
    fn apply_examples() {
        let shape = ModuleShape::uniform(ScalarKind::Complex, 1, 2).unwrap();
        let x = ModuleVector::from_real_fibers(shape.clone(), &[vec![1.0, 0.0]]).unwrap();
        assert_eq!(OrthoMap::identity(&shape).apply(&x).unwrap(), x);
        let psi = OrthoMap::scaling(&shape, vec![2.0]).unwrap();
        assert_eq!(psi.apply(&x).unwrap(), x.scale(2.0));
    }

    #[test]
    fn nu_examples() {
        let shape = ModuleShape::uniform(ScalarKind::Complex, 2, 1).unwrap();
        assert_eq!(
            OrthoMap::<f64>::identity(&shape).nu(),
            AlgebraElement::one(ScalarKind::Complex, 2).unwrap()
        );
        let psi = OrthoMap::scaling(&shape, vec![2.0, 3.0]).unwrap();
        assert_eq!(psi.nu().real_parts(), vec![4.0, 9.0]);
        assert_eq!(psi.nu().sqrt_positive().unwrap().real_parts(), vec![2.0, 3.0]);
        assert!(psi.nu().is_central() && psi.nu().is_strictly_positive());
    }

    #[test]
    fn construction_rejects_bad_maps() {
        let shape = ModuleShape::uniform(ScalarKind::Complex, 1, 2).unwrap();
        assert!(OrthoMap::<f64>::scaling(&shape, vec![0.0]).is_err());
        let not_unitary = CMatrix::identity(2).scale(1.5);
        assert!(OrthoMap::new(shape.clone(), vec![1.0], vec![Rotation::Unitary(not_unitary)]).is_err());
        let q = ModuleShape::uniform(ScalarKind::Quaternion, 1, 1).unwrap();
        let long = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        assert!(OrthoMap::new(q, vec![1.0], vec![Rotation::Quaternion(long)]).is_err());
    }

    #[test]
    fn quaternion_map_scales_inner_products() {
        let shape = ModuleShape::uniform(ScalarKind::Quaternion, 2, 1).unwrap();
        let u = Quaternion::new(1.0, 2.0, -1.0, 0.5).normalize().unwrap();
        let psi = OrthoMap::new(
            shape,
            vec![2.0, 0.5],
            vec![Rotation::Quaternion(u), Rotation::Quaternion(u)],
        )
        .unwrap();
        let x = ModuleVector::from_quaternions(&[Quaternion::new(0.3, 1.0, 0.0, -2.0), Quaternion::j()]).unwrap();
        let y = ModuleVector::from_quaternions(&[Quaternion::new(1.0, -1.0, 0.5, 0.0), Quaternion::k()]).unwrap();
        let lhs = psi.apply(&x).unwrap().inner_product(&psi.apply(&y).unwrap()).unwrap();
        let rhs = psi.nu().try_mul(&x.inner_product(&y).unwrap()).unwrap();
        assert!(lhs.try_sub(&rhs).unwrap().norm() < 1e-14);
        // 𝔄-linear for a non-central a
        let a = AlgebraElement::from_quaternions(&[Quaternion::i(), Quaternion::new(1.0, 0.0, 2.0, 0.0)]).unwrap();
        let l = psi.apply(&x.left_action(&a).unwrap()).unwrap();
        let r = psi.apply(&x).unwrap().left_action(&a).unwrap();
        assert!(l.try_sub(&r).unwrap().module_norm() < 1e-14);
    }

    #[test]
    fn transport_examples() {
        let f = three_lines();
        let id = OrthoMap::identity(f.shape());
        let t = id.transport_frame(&f).unwrap();
        for (a, b) in t.frame.submodules().iter().zip(f.submodules()) {
            assert!(a.fiber_matrix(0).sub(&b.fiber_matrix(0)).frobenius_norm() < 1e-15);
        }

        let rot = OrthoMap::new(
            f.shape().clone(),
            vec![1.0],
            vec![Rotation::Unitary(givens(2, 0, 1, std::f64::consts::FRAC_PI_4))],
        )
        .unwrap();
        let t = rot.transport_frame(&f).unwrap();
        let b = t.intrinsic_bounds();
        assert!((b.c - 1.0).abs() < 1e-12 && (b.d - 2.0).abs() < 1e-12);
        assert!(t.frame.submodules().iter().all(|u| u.validate_projection(1e-12)));

        let shape = ModuleShape::uniform(ScalarKind::Complex, 1, 2).unwrap();
        let parseval = WeightedFrame::unweighted(vec![Submodule::full(&shape)]).unwrap();
        let t = OrthoMap::<f64>::scaling(&shape, vec![2.0])
            .unwrap()
            .transport_frame(&parseval)
            .unwrap();
        let pb = t.pullback_bounds();
        assert!((pb.lower.fiber(0).re() - 2.0).abs() < 1e-14);
        assert!((pb.upper.fiber(0).re() - 2.0).abs() < 1e-14);
        assert!(t.frame.tightness(1e-12).unwrap().parseval);
    }
}
