//! Fiberwise Hilbert module over the algebra: vectors, the algebra-valued
//! inner product `⟨x, y⟩_k = Σᵢ x_{k,i} · conj(y_{k,i})`, the module norm,
//! the left algebra action, and finite sequences in `l₂`.

use num_complex::Complex;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::scalar::{FiberScalar, Quaternion, Real, ScalarKind};

/// Truncation geometry: scalar kind plus one dimension per fiber.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleShape {
    kind: ScalarKind,
    dims: Vec<usize>,
}

impl ModuleShape {
    pub fn new(kind: ScalarKind, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyAlgebra);
        }
        if let Some(k) = dims.iter().position(|&m| m == 0) {
            return Err(Error::ShapeMismatch(format!("fiber {k} has dimension 0")));
        }
        if kind == ScalarKind::Quaternion && dims.iter().any(|&m| m != 1) {
            return Err(Error::ShapeMismatch("quaternion fibers must be one-dimensional".into()));
        }
        Ok(Self { kind, dims })
    }

    /// `fibers` fibers, each of dimension `dim`.
    pub fn uniform(kind: ScalarKind, fibers: usize, dim: usize) -> Result<Self> {
        Self::new(kind, vec![dim; fibers])
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn fibers(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims[k]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{} fibers {:?} vs {} fibers {:?}",
                self.kind, self.dims, other.kind, other.dims
            )))
        }
    }
}

/// An element of the module: fiber `k` is a vector of length `m_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleVector<T> {
    shape: ModuleShape,
    fibers: Vec<Vec<FiberScalar<T>>>,
}

impl<T: Real> ModuleVector<T> {
    pub fn new(shape: ModuleShape, fibers: Vec<Vec<FiberScalar<T>>>) -> Result<Self> {
        if fibers.len() != shape.fibers() {
            return Err(Error::LengthMismatch {
                expected: shape.fibers(),
                found: fibers.len(),
            });
        }
        for (k, f) in fibers.iter().enumerate() {
            if f.len() != shape.dim(k) {
                return Err(Error::ShapeMismatch(format!(
                    "fiber {k} has length {} but the shape says {}",
                    f.len(),
                    shape.dim(k)
                )));
            }
            if let Some(bad) = f.iter().find(|s| s.kind() != shape.kind()) {
                return Err(Error::KindMismatch {
                    expected: shape.kind(),
                    found: bad.kind(),
                });
            }
        }
        Ok(Self { shape, fibers })
    }

    pub fn zeros(shape: &ModuleShape) -> Self {
        let fibers = shape
            .dims()
            .iter()
            .map(|&m| vec![FiberScalar::zero(shape.kind()); m])
            .collect();
        Self {
            shape: shape.clone(),
            fibers,
        }
    }

    pub fn from_complex_fibers(shape: ModuleShape, fibers: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let fibers = fibers
            .into_iter()
            .map(|f| f.into_iter().map(FiberScalar::Complex).collect())
            .collect();
        Self::new(shape, fibers)
    }

    /// Quaternion module vector with one quaternion per fiber.
    pub fn from_quaternions(values: &[Quaternion<T>]) -> Result<Self> {
        let shape = ModuleShape::uniform(ScalarKind::Quaternion, values.len(), 1)?;
        Self::new(
            shape,
            values.iter().map(|&q| vec![FiberScalar::Quaternion(q)]).collect(),
        )
    }

    /// Complex vector whose fibers hold real entries.
    pub fn from_real_fibers(shape: ModuleShape, fibers: &[Vec<T>]) -> Result<Self> {
        let kind = shape.kind();
        let fibers = fibers
            .iter()
            .map(|f| f.iter().map(|&v| FiberScalar::real(kind, v)).collect())
            .collect();
        Self::new(shape, fibers)
    }

    pub fn shape(&self) -> &ModuleShape {
        &self.shape
    }

    pub fn kind(&self) -> ScalarKind {
        self.shape.kind()
    }

    pub fn fibers(&self) -> &[Vec<FiberScalar<T>>] {
        &self.fibers
    }

    pub fn fiber(&self, k: usize) -> &[FiberScalar<T>] {
        &self.fibers[k]
    }

    /// Complex entries of fiber `k`; `None` for quaternion modules.
    pub fn complex_fiber(&self, k: usize) -> Option<Vec<Complex<T>>> {
        self.fibers[k].iter().map(FiberScalar::as_complex).collect()
    }

    pub(crate) fn from_parts(shape: ModuleShape, fibers: Vec<Vec<FiberScalar<T>>>) -> Self {
        debug_assert_eq!(shape.fibers(), fibers.len());
        Self { shape, fibers }
    }

    /// Algebra-valued inner product, linear in the first argument.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement<T>> {
        self.shape.ensure_same(&other.shape)?;
        let kind = self.kind();
        let fibers = self
            .fibers
            .iter()
            .zip(&other.fibers)
            .map(|(x, y)| {
                x.iter()
                    .zip(y)
                    .fold(FiberScalar::zero(kind), |acc, (&a, b)| acc + a * b.conj())
            })
            .collect();
        AlgebraElement::new(fibers)
    }

    /// `|x|² = ⟨x, x⟩`, computed as real fiber energies.
    pub fn abs_sq(&self) -> AlgebraElement<T> {
        let kind = self.kind();
        let fibers = self
            .fiber_norms_sq()
            .into_iter()
            .map(|v| FiberScalar::real(kind, v))
            .collect();
        AlgebraElement::new(fibers).expect("shape has at least one fiber")
    }

    pub fn fiber_norms_sq(&self) -> Vec<T> {
        self.fibers
            .iter()
            .map(|f| f.iter().map(FiberScalar::norm_sqr).fold(T::zero(), |a, b| a + b))
            .collect()
    }

    /// `‖x‖ = ‖⟨x,x⟩‖^{1/2}`, the largest Euclidean fiber length.
    pub fn module_norm(&self) -> T {
        self.fiber_norms_sq().into_iter().fold(T::zero(), T::max).sqrt()
    }

    /// Left action `a ∘ x`, fiber `k` multiplied on the left by `a_k`.
    pub fn left_action(&self, a: &AlgebraElement<T>) -> Result<Self> {
        if a.kind() != self.kind() {
            return Err(Error::KindMismatch {
                expected: self.kind(),
                found: a.kind(),
            });
        }
        if a.len() != self.shape.fibers() {
            return Err(Error::ShapeMismatch(format!(
                "algebra element has {} fibers, module has {}",
                a.len(),
                self.shape.fibers()
            )));
        }
        let fibers = self
            .fibers
            .iter()
            .zip(a.fibers())
            .map(|(x, &ak)| x.iter().map(|&v| ak * v).collect())
            .collect();
        Ok(Self {
            shape: self.shape.clone(),
            fibers,
        })
    }

    /// Multiplies fiber `k` by the real number `s[k]`.
    pub(crate) fn scale_fibers(&self, s: &[T]) -> Self {
        let fibers = self
            .fibers
            .iter()
            .zip(s)
            .map(|(x, &sk)| x.iter().map(|v| v.scale(sk)).collect())
            .collect();
        Self {
            shape: self.shape.clone(),
            fibers,
        }
    }

    pub fn scale(&self, s: T) -> Self {
        let fibers = self
            .fibers
            .iter()
            .map(|x| x.iter().map(|v| v.scale(s)).collect())
            .collect();
        Self {
            shape: self.shape.clone(),
            fibers,
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(FiberScalar<T>, FiberScalar<T>) -> FiberScalar<T>) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        let fibers = self
            .fibers
            .iter()
            .zip(&other.fibers)
            .map(|(x, y)| x.iter().zip(y).map(|(&a, &b)| f(a, b)).collect())
            .collect();
        Ok(Self {
            shape: self.shape.clone(),
            fibers,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn is_zero(&self) -> bool {
        self.fibers.iter().flatten().all(|v| v.norm_sqr() == T::zero())
    }
}

/// A finite sequence `(y_n)` in `l₂(𝔥)`; all entries share one shape.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleSequence<T> {
    entries: Vec<ModuleVector<T>>,
}

impl<T: Real> ModuleSequence<T> {
    pub fn new(entries: Vec<ModuleVector<T>>) -> Result<Self> {
        if let Some(first) = entries.first() {
            for e in &entries[1..] {
                first.shape().ensure_same(e.shape())?;
            }
        }
        Ok(Self { entries })
    }

    pub fn zeros(shape: &ModuleShape, len: usize) -> Self {
        Self {
            entries: vec![ModuleVector::zeros(shape); len],
        }
    }

    pub fn entries(&self) -> &[ModuleVector<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `⟨(x_n), (y_n)⟩ = Σ ⟨x_n, y_n⟩`.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement<T>> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let mut pairs = self.entries.iter().zip(&other.entries);
        let (x0, y0) = pairs
            .next()
            .ok_or_else(|| Error::InvalidArgument("inner product of empty sequences".into()))?;
        let mut acc = x0.inner_product(y0)?;
        for (x, y) in pairs {
            acc = acc.try_add(&x.inner_product(y)?)?;
        }
        Ok(acc)
    }

    /// `‖Σ ⟨y_n, y_n⟩‖^{1/2}`.
    pub fn norm(&self) -> T {
        let Some(first) = self.entries.first() else {
            return T::zero();
        };
        let mut energy = vec![T::zero(); first.shape().fibers()];
        for e in &self.entries {
            for (acc, v) in energy.iter_mut().zip(e.fiber_norms_sq()) {
                *acc += v;
            }
        }
        energy.into_iter().fold(T::zero(), T::max).sqrt()
    }
}
