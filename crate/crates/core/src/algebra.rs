//! Fiberwise C*-algebra: `ℂᴺ` or `ℍᴺ` with pointwise product, pointwise
//! conjugation and the sup norm.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{FiberScalar, Quaternion, Real, ScalarKind};

/// Coarsest-to-finest positivity classes; each one implies the previous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PositivityClass {
    NotSelfAdjoint,
    SelfAdjoint,
    Positive,
    StrictlyPositive,
}

impl PositivityClass {
    pub fn name(self) -> &'static str {
        match self {
            PositivityClass::NotSelfAdjoint => "not_selfadjoint",
            PositivityClass::SelfAdjoint => "selfadjoint",
            PositivityClass::Positive => "positive",
            PositivityClass::StrictlyPositive => "strictly_positive",
        }
    }
}

/// An element of the algebra: one scalar per fiber, all of one kind.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<T> {
    kind: ScalarKind,
    fibers: Vec<FiberScalar<T>>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn new(fibers: Vec<FiberScalar<T>>) -> Result<Self> {
        let kind = fibers.first().ok_or(Error::EmptyAlgebra)?.kind();
        if let Some(bad) = fibers.iter().find(|f| f.kind() != kind) {
            return Err(Error::KindMismatch {
                expected: kind,
                found: bad.kind(),
            });
        }
        Ok(Self { kind, fibers })
    }

    /// Element with real fiber values.
    pub fn from_reals(kind: ScalarKind, values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&v| FiberScalar::real(kind, v)).collect())
    }

    pub fn from_complex(values: &[Complex<T>]) -> Result<Self> {
        Self::new(values.iter().map(|&c| FiberScalar::Complex(c)).collect())
    }

    pub fn from_quaternions(values: &[Quaternion<T>]) -> Result<Self> {
        Self::new(values.iter().map(|&q| FiberScalar::Quaternion(q)).collect())
    }

    pub fn constant(kind: ScalarKind, fibers: usize, value: T) -> Result<Self> {
        Self::new(vec![FiberScalar::real(kind, value); fibers])
    }

    /// The unit `1_𝔄`.
    pub fn one(kind: ScalarKind, fibers: usize) -> Result<Self> {
        Self::constant(kind, fibers, T::one())
    }

    pub fn zero(kind: ScalarKind, fibers: usize) -> Result<Self> {
        Self::constant(kind, fibers, T::zero())
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    /// Fiber count `N`.
    pub fn len(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    pub fn fibers(&self) -> &[FiberScalar<T>] {
        &self.fibers
    }

    pub fn fiber(&self, k: usize) -> FiberScalar<T> {
        self.fibers[k]
    }

    /// Real parts of all fibers.
    pub fn real_parts(&self) -> Vec<T> {
        self.fibers.iter().map(FiberScalar::re).collect()
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch {
                expected: self.kind,
                found: other.kind,
            });
        }
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch(format!(
                "algebra elements with {} and {} fibers",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(FiberScalar<T>, FiberScalar<T>) -> FiberScalar<T>) -> Result<Self> {
        self.check_compatible(other)?;
        let fibers = self.fibers.iter().zip(&other.fibers).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self {
            kind: self.kind,
            fibers,
        })
    }

    fn map(&self, f: impl Fn(FiberScalar<T>) -> FiberScalar<T>) -> Self {
        Self {
            kind: self.kind,
            fibers: self.fibers.iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|a| a.scale(s))
    }

    /// Involution `a ↦ a*` (fiberwise conjugation).
    pub fn star(&self) -> Self {
        self.map(|a| a.conj())
    }

    /// Sup norm over fibers.
    pub fn norm(&self) -> T {
        self.fibers.iter().map(FiberScalar::abs).fold(T::zero(), T::max)
    }

    /// `BASE_TOL · max(1, ‖a‖)`.
    pub fn default_tol(&self) -> T {
        T::BASE_TOL * T::one().max(self.norm())
    }

    pub fn positivity_class(&self, tol: T) -> PositivityClass {
        let mut class = PositivityClass::StrictlyPositive;
        for f in &self.fibers {
            let here = if f.imag_norm() > tol {
                PositivityClass::NotSelfAdjoint
            } else if f.re() < -tol {
                PositivityClass::SelfAdjoint
            } else if f.re() <= tol {
                PositivityClass::Positive
            } else {
                PositivityClass::StrictlyPositive
            };
            class = class.min(here);
        }
        class
    }

    pub fn is_positive(&self) -> bool {
        self.positivity_class(self.default_tol()) >= PositivityClass::Positive
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.positivity_class(self.default_tol()) == PositivityClass::StrictlyPositive
    }

    /// The unique positive square root.
    pub fn sqrt_positive(&self) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::NotPositive);
        }
        let kind = self.kind;
        Ok(self.map(|a| FiberScalar::real(kind, a.re().max(T::zero()).sqrt())))
    }

    /// Fiberwise inverse, failing when some fiber modulus is at most the
    /// default tolerance.
    pub fn invert(&self) -> Result<Self> {
        self.invert_with_tol(self.default_tol())
    }

    pub fn invert_with_tol(&self, tol: T) -> Result<Self> {
        let mut fibers = Vec::with_capacity(self.len());
        for (k, f) in self.fibers.iter().enumerate() {
            let modulus = f.abs();
            match f.inverse() {
                Some(inv) if modulus > tol => fibers.push(inv),
                _ => {
                    return Err(Error::NotInvertible {
                        fiber: k,
                        modulus: modulus.to_f64_lossy(),
                    })
                }
            }
        }
        Ok(Self {
            kind: self.kind,
            fibers,
        })
    }

    /// `self ≼ other`, i.e. `other − self` is positive within `tol`.
    pub fn order_leq(&self, other: &Self, tol: T) -> Result<bool> {
        Ok(other.try_sub(self)?.positivity_class(tol) >= PositivityClass::Positive)
    }

    /// Whether the element lies in the center. Complex fibers commute;
    /// a quaternion commutes with everything iff it is real.
    pub fn is_central(&self) -> bool {
        self.is_central_with_tol(T::zero())
    }

    pub fn is_central_with_tol(&self, tol: T) -> bool {
        match self.kind {
            ScalarKind::Complex => true,
            ScalarKind::Quaternion => self.fibers.iter().all(|f| f.imag_norm() <= tol),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.fibers.iter().all(FiberScalar::is_finite)
    }
}

impl<T: Real> fmt::Display for AlgebraElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.fibers.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::quat_mul;

    type E = AlgebraElement<f64>;

    fn reals(v: &[f64]) -> E {
        E::from_reals(ScalarKind::Complex, v).unwrap()
    }

    fn cplx(v: &[(f64, f64)]) -> E {
        E::from_complex(&v.iter().map(|&(a, b)| Complex::new(a, b)).collect::<Vec<_>>()).unwrap()
    }

    fn quats(v: &[[f64; 4]]) -> E {
        E::from_quaternions(
            &v.iter()
                .map(|q| Quaternion::new(q[0], q[1], q[2], q[3]))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn construction_rejects_empty_and_mixed() {
        assert_eq!(E::new(vec![]), Err(Error::EmptyAlgebra));
        let mixed = E::new(vec![
            FiberScalar::complex(1.0, 0.0),
            FiberScalar::quaternion(1.0, 0.0, 0.0, 0.0),
        ]);
        assert!(matches!(mixed, Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn star_examples() {
        assert_eq!(cplx(&[(1.0, 2.0), (3.0, 0.0)]).star(), cplx(&[(1.0, -2.0), (3.0, 0.0)]));
        assert_eq!(quats(&[[1.0, 2.0, 3.0, 4.0]]).star(), quats(&[[1.0, -2.0, -3.0, -4.0]]));
        let one = E::one(ScalarKind::Quaternion, 3).unwrap();
        assert_eq!(one.star(), one);
    }

    #[test]
    fn star_reverses_products() {
        let a = quats(&[[1.0, 2.0, -1.0, 0.5], [0.0, 1.0, 0.0, 0.0]]);
        let b = quats(&[[0.3, -1.0, 2.0, 1.0], [0.0, 0.0, 1.0, 0.0]]);
        let lhs = a.try_mul(&b).unwrap().star();
        let rhs = b.star().try_mul(&a.star()).unwrap();
        assert!(lhs.try_sub(&rhs).unwrap().norm() < 1e-14);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(reals(&[1.0, 4.0, 9.0]).norm(), 9.0);
        assert_eq!(reals(&[0.0, 0.0]).norm(), 0.0);
        assert!((quats(&[[1.0, 2.0, 3.0, 4.0]]).norm() - 30f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn positivity_examples() {
        let tol = 1e-12;
        assert_eq!(
            reals(&[1.0, 4.0, 9.0]).positivity_class(tol),
            PositivityClass::StrictlyPositive
        );
        assert_eq!(reals(&[0.0, 2.0]).positivity_class(tol), PositivityClass::Positive);
        assert_eq!(
            cplx(&[(0.0, 1.0), (1.0, 0.0)]).positivity_class(tol),
            PositivityClass::NotSelfAdjoint
        );
        assert_eq!(reals(&[-1.0, 2.0]).positivity_class(tol), PositivityClass::SelfAdjoint);
        assert_eq!(
            quats(&[[1.0, 0.0, 1.0, 0.0]]).positivity_class(tol),
            PositivityClass::NotSelfAdjoint
        );
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(
            reals(&[1.0, 4.0, 9.0]).sqrt_positive().unwrap(),
            reals(&[1.0, 2.0, 3.0])
        );
        assert_eq!(reals(&[0.0]).sqrt_positive().unwrap(), reals(&[0.0]));
        assert_eq!(reals(&[2.0]).sqrt_positive().unwrap(), reals(&[2f64.sqrt()]));
        assert_eq!(reals(&[-1.0]).sqrt_positive(), Err(Error::NotPositive));
        let q = E::from_reals(ScalarKind::Quaternion, &[4.0, 9.0]).unwrap();
        let r = q.sqrt_positive().unwrap();
        assert!(r.is_central());
        assert_eq!(r.real_parts(), vec![2.0, 3.0]);
    }

    #[test]
    fn invert_examples() {
        assert_eq!(reals(&[1.0, 4.0]).invert().unwrap(), reals(&[1.0, 0.25]));
        let one = E::one(ScalarKind::Complex, 2).unwrap();
        assert_eq!(one.invert().unwrap(), one);
        let i = quats(&[[0.0, 1.0, 0.0, 0.0]]);
        assert_eq!(i.invert().unwrap(), quats(&[[0.0, -1.0, 0.0, 0.0]]));
        assert!(matches!(
            reals(&[1.0, 0.0]).invert(),
            Err(Error::NotInvertible { fiber: 1, .. })
        ));
        // ‖a⁻¹‖⁻¹ is the smallest fiber of a strictly positive element
        let a = reals(&[3.0, 0.5, 2.0]);
        assert!((1.0 / a.invert().unwrap().norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn order_examples() {
        let tol = 1e-12;
        assert!(reals(&[1.0, 2.0, 3.0])
            .order_leq(&reals(&[2.0, 2.0, 5.0]), tol)
            .unwrap());
        assert!(!reals(&[1.0, 2.0]).order_leq(&reals(&[2.0, 1.0]), tol).unwrap());
        let a = cplx(&[(1.0, 1.0), (0.0, -3.0)]);
        assert!(a.order_leq(&a, tol).unwrap());
        assert!(reals(&[1.0]).order_leq(&reals(&[1.0, 2.0]), tol).is_err());
    }

    #[test]
    fn centrality_examples() {
        assert!(cplx(&[(1.0, 1.0), (2.0, 0.0)]).is_central());
        assert!(E::from_reals(ScalarKind::Quaternion, &[1.0, 2.0]).unwrap().is_central());
        let i = quats(&[[0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]]);
        assert!(!i.is_central());
        // the witness: i·j ≠ j·i
        let (qi, qj) = (Quaternion::<f64>::i(), Quaternion::<f64>::j());
        assert_ne!(quat_mul(qi, qj), quat_mul(qj, qi));
    }

    #[test]
    fn works_in_single_precision() {
        let a = AlgebraElement::<f32>::from_reals(ScalarKind::Complex, &[1.0, 4.0, 9.0]).unwrap();
        assert_eq!(a.sqrt_positive().unwrap().real_parts(), vec![1.0f32, 2.0, 3.0]);
        assert!(a.is_strictly_positive());
    }
}
