//! Orthogonally complemented submodules, stored as one orthogonal
//! projection per fiber.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize, projector_from_basis, CMatrix};
use crate::module::{ModuleShape, ModuleVector};
use crate::scalar::{FiberScalar, Real, ScalarKind};

/// Projection data for one fiber.
///
/// Quaternion fibers are one-dimensional and their only left submodules
/// are `{0}` and `ℍ`, so a selector bit is the whole story there.
#[derive(Clone, Debug, PartialEq)]
pub enum FiberProjection<T> {
    Selector(bool),
    Matrix(CMatrix<T>),
}

impl<T: Real> FiberProjection<T> {
    /// Dense form; selectors become `[1]` or `[0]`.
    pub fn to_matrix(&self) -> CMatrix<T> {
        match self {
            FiberProjection::Selector(true) => CMatrix::identity(1),
            FiberProjection::Selector(false) => CMatrix::zeros(1),
            FiberProjection::Matrix(m) => m.clone(),
        }
    }

    fn complement(&self) -> Self {
        match self {
            FiberProjection::Selector(s) => FiberProjection::Selector(!s),
            FiberProjection::Matrix(m) => FiberProjection::Matrix(CMatrix::identity(m.dim()).sub(m)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Submodule<T> {
    shape: ModuleShape,
    fibers: Vec<FiberProjection<T>>,
}

impl<T: Real> Submodule<T> {
    /// Wraps raw per-fiber projection data. Only dimensions and kinds are
    /// checked here; use [`Submodule::validate_projection`] for `P = P* = P²`.
    pub fn from_fibers(shape: ModuleShape, fibers: Vec<FiberProjection<T>>) -> Result<Self> {
        if fibers.len() != shape.fibers() {
            return Err(Error::LengthMismatch {
                expected: shape.fibers(),
                found: fibers.len(),
            });
        }
        for (k, f) in fibers.iter().enumerate() {
            match (shape.kind(), f) {
                (ScalarKind::Quaternion, FiberProjection::Selector(_)) => {}
                (ScalarKind::Quaternion, FiberProjection::Matrix(_)) => return Err(Error::QuaternionUnsupported),
                (ScalarKind::Complex, FiberProjection::Matrix(m)) if m.dim() == shape.dim(k) => {}
                (ScalarKind::Complex, FiberProjection::Matrix(m)) => {
                    return Err(Error::ShapeMismatch(format!(
                        "fiber {k}: projection is {0}x{0}, fiber dimension is {1}",
                        m.dim(),
                        shape.dim(k)
                    )))
                }
                (ScalarKind::Complex, FiberProjection::Selector(s)) => {
                    return Err(Error::ShapeMismatch(format!(
                        "fiber {k}: selector {} given for a complex fiber; use a projection matrix",
                        u8::from(*s)
                    )))
                }
            }
        }
        Ok(Self { shape, fibers })
    }

    /// Coordinate submodule: fiber `k` is kept in full iff `k ∈ index_set`.
    pub fn block(shape: &ModuleShape, index_set: &[usize]) -> Result<Self> {
        let n = shape.fibers();
        if let Some(&bad) = index_set.iter().find(|&&k| k >= n) {
            return Err(Error::IndexOutOfRange { index: bad, fibers: n });
        }
        let keep = |k: usize| index_set.contains(&k);
        let fibers = (0..n)
            .map(|k| match shape.kind() {
                ScalarKind::Quaternion => FiberProjection::Selector(keep(k)),
                ScalarKind::Complex if keep(k) => FiberProjection::Matrix(CMatrix::identity(shape.dim(k))),
                ScalarKind::Complex => FiberProjection::Matrix(CMatrix::zeros(shape.dim(k))),
            })
            .collect();
        Ok(Self {
            shape: shape.clone(),
            fibers,
        })
    }

    /// Per-fiber span of the given vectors (complex modules only). Zero and
    /// dependent vectors are dropped during orthonormalization.
    pub fn span(shape: &ModuleShape, spanning_sets: &[Vec<Vec<Complex<T>>>]) -> Result<Self> {
        if shape.kind() == ScalarKind::Quaternion {
            return Err(Error::QuaternionUnsupported);
        }
        if spanning_sets.len() != shape.fibers() {
            return Err(Error::LengthMismatch {
                expected: shape.fibers(),
                found: spanning_sets.len(),
            });
        }
        let mut fibers = Vec::with_capacity(shape.fibers());
        for (k, set) in spanning_sets.iter().enumerate() {
            let m = shape.dim(k);
            if let Some(v) = set.iter().find(|v| v.len() != m) {
                return Err(Error::ShapeMismatch(format!(
                    "fiber {k}: spanning vector of length {} in a fiber of dimension {m}",
                    v.len()
                )));
            }
            if set.iter().flatten().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(Error::InvalidArgument(format!("fiber {k}: non-finite spanning vector")));
            }
            fibers.push(FiberProjection::Matrix(projector_from_basis(m, &orthonormalize(set))));
        }
        Ok(Self {
            shape: shape.clone(),
            fibers,
        })
    }

    pub fn zero(shape: &ModuleShape) -> Self {
        Self::block(shape, &[]).expect("empty index set is in range")
    }

    pub fn full(shape: &ModuleShape) -> Self {
        let all: Vec<usize> = (0..shape.fibers()).collect();
        Self::block(shape, &all).expect("all indices are in range")
    }

    pub fn shape(&self) -> &ModuleShape {
        &self.shape
    }

    pub fn fibers(&self) -> &[FiberProjection<T>] {
        &self.fibers
    }

    pub fn fiber(&self, k: usize) -> &FiberProjection<T> {
        &self.fibers[k]
    }

    pub fn fiber_matrix(&self, k: usize) -> CMatrix<T> {
        self.fibers[k].to_matrix()
    }

    /// Orthogonal projection of `x` onto the submodule.
    pub fn project(&self, x: &ModuleVector<T>) -> Result<ModuleVector<T>> {
        self.shape.ensure_same(x.shape())?;
        let kind = self.shape.kind();
        let fibers = self
            .fibers
            .iter()
            .zip(x.fibers())
            .map(|(p, xk)| match p {
                FiberProjection::Selector(true) => xk.to_vec(),
                FiberProjection::Selector(false) => vec![FiberScalar::zero(kind); xk.len()],
                FiberProjection::Matrix(m) => {
                    let v: Vec<Complex<T>> = xk.iter().map(|s| s.as_complex().expect("complex fiber")).collect();
                    m.apply(&v).into_iter().map(FiberScalar::Complex).collect()
                }
            })
            .collect();
        Ok(ModuleVector::from_parts(self.shape.clone(), fibers))
    }

    /// The orthogonal complement, fiberwise `I − P`.
    pub fn complement(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            fibers: self.fibers.iter().map(FiberProjection::complement).collect(),
        }
    }

    /// Whether every fiber satisfies `‖P − P*‖ ≤ tol` and `‖P² − P‖ ≤ tol`
    /// (Frobenius norms).
    pub fn validate_projection(&self, tol: T) -> bool {
        self.fibers.iter().all(|f| match f {
            FiberProjection::Selector(_) => true,
            FiberProjection::Matrix(m) => m.is_finite() && m.hermitian_defect() <= tol && m.idempotent_defect() <= tol,
        })
    }

    /// Selector pattern if every fiber projection is `0` or `I` within `tol`.
    pub fn selectors(&self, tol: T) -> Option<Vec<bool>> {
        self.fibers
            .iter()
            .map(|f| match f {
                FiberProjection::Selector(s) => Some(*s),
                FiberProjection::Matrix(m) => {
                    if m.frobenius_norm() <= tol {
                        Some(false)
                    } else if m.sub(&CMatrix::identity(m.dim())).frobenius_norm() <= tol {
                        Some(true)
                    } else {
                        None
                    }
                }
            })
            .collect()
    }

    /// Fiber ranks, read off as rounded traces.
    pub fn ranks(&self) -> Vec<usize> {
        self.fibers
            .iter()
            .map(|f| match f {
                FiberProjection::Selector(s) => usize::from(*s),
                FiberProjection::Matrix(m) => {
                    let tr = (0..m.dim()).fold(T::zero(), |a, i| a + m.get(i, i).re);
                    tr.round().to_usize().unwrap_or(0)
                }
            })
            .collect()
    }
}
