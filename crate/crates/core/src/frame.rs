//! Weighted *-fusion frames.
//!
//! Naming follows the convention where `S = Σ ω_n² P_n` is the *analysis*
//! operator and `T: x ↦ (ω_n P_n x)` the *synthesis* operator; this is the
//! reverse of most frame literature. [`WeightedFrame::frame_operator`] is
//! `S`, [`WeightedFrame::synthesis`] is `T` and
//! [`WeightedFrame::synthesis_adjoint`] is `T*`, so `S = T* T`.

use num_complex::Complex;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, norm, CMatrix};
use crate::module::{ModuleSequence, ModuleShape, ModuleVector};
use crate::scalar::{FiberScalar, Real, ScalarKind};
use crate::submodule::{FiberProjection, Submodule};

/// Fibers up to this dimension are solved directly; larger ones use CG.
pub const DIRECT_SOLVE_MAX_DIM: usize = 64;

/// Note attached to reports: the infinite-series conditions of the
/// multiplier characterizations hold trivially on a finite truncation.
pub const SERIES_CONDITIONS: &str = "finite-truncation: auto-satisfied";

/// Weights `ω_n`: central, strictly positive algebra elements.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence<T> {
    weights: Vec<AlgebraElement<T>>,
}

impl<T: Real> WeightSequence<T> {
    pub fn new(weights: Vec<AlgebraElement<T>>) -> Result<Self> {
        let first = weights
            .first()
            .ok_or_else(|| Error::InvalidArgument("a weight sequence needs at least one weight".into()))?;
        for (index, w) in weights.iter().enumerate() {
            w.check_compatible(first)?;
            if !w.is_finite() {
                return Err(Error::InvalidWeight {
                    index,
                    reason: "non-finite entry".into(),
                });
            }
            if !w.is_central_with_tol(w.default_tol()) {
                return Err(Error::InvalidWeight {
                    index,
                    reason: "not central".into(),
                });
            }
            if !w.is_strictly_positive() {
                return Err(Error::InvalidWeight {
                    index,
                    reason: "not strictly positive".into(),
                });
            }
        }
        Ok(Self { weights })
    }

    /// One row per weight, one column per fiber.
    pub fn from_rows(kind: ScalarKind, rows: &[Vec<T>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| AlgebraElement::from_reals(kind, r))
                .collect::<Result<_>>()?,
        )
    }

    /// `count` copies of the constant weight `value`.
    pub fn constant(kind: ScalarKind, fibers: usize, count: usize, value: T) -> Result<Self> {
        Self::new(vec![AlgebraElement::constant(kind, fibers, value)?; count])
    }

    pub fn weights(&self) -> &[AlgebraElement<T>] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn kind(&self) -> ScalarKind {
        self.weights[0].kind()
    }

    pub fn fibers(&self) -> usize {
        self.weights[0].len()
    }

    /// Real weight values `ω_{n,k}` as a matrix (rows are weights).
    pub fn rows(&self) -> Vec<Vec<T>> {
        self.weights.iter().map(AlgebraElement::real_parts).collect()
    }

    /// `‖ω_n‖` for each n.
    pub fn norms(&self) -> Vec<T> {
        self.weights.iter().map(AlgebraElement::norm).collect()
    }

    /// `𝔮(ω) = (‖ω_n‖²)_n`, the ecart weights attached to `ω`.
    pub fn ecart_weights(&self) -> Vec<T> {
        self.norms().into_iter().map(|v| v * v).collect()
    }

    /// `sup_n ‖ω_n‖`.
    pub fn sup_norm(&self) -> T {
        self.norms().into_iter().fold(T::zero(), T::max)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Self::new(
            self.weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a.try_add(b))
                .collect::<Result<_>>()?,
        )
    }

    pub fn scale(&self, lambda: T) -> Result<Self> {
        Self::new(self.weights.iter().map(|w| w.scale(lambda)).collect())
    }
}

/// `S = Σ ω_n² P_n`, one Hermitian PSD block per fiber. Quaternion fibers
/// carry a `1×1` real block.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameOperator<T> {
    kind: ScalarKind,
    fibers: Vec<CMatrix<T>>,
}

impl<T: Real> FrameOperator<T> {
    /// Assembles `S` from submodules and weights, fiber by fiber.
    pub fn assemble(shape: &ModuleShape, submodules: &[Submodule<T>], weights: &WeightSequence<T>) -> Self {
        let fibers = (0..shape.fibers())
            .map(|k| {
                let mut s = CMatrix::zeros(shape.dim(k));
                for (u, w) in submodules.iter().zip(weights.weights()) {
                    let wk = w.fiber(k).re();
                    let w2 = wk * wk;
                    match u.fiber(k) {
                        FiberProjection::Selector(true) => {
                            let v = s.get(0, 0) + Complex::new(w2, T::zero());
                            s.set(0, 0, v);
                        }
                        FiberProjection::Selector(false) => {}
                        FiberProjection::Matrix(p) => s.add_scaled(w2, p),
                    }
                }
                s
            })
            .collect();
        Self {
            kind: shape.kind(),
            fibers,
        }
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn fibers(&self) -> &[CMatrix<T>] {
        &self.fibers
    }

    pub fn fiber(&self, k: usize) -> &CMatrix<T> {
        &self.fibers[k]
    }

    /// `S x`.
    pub fn apply(&self, x: &ModuleVector<T>) -> Result<ModuleVector<T>> {
        if x.kind() != self.kind || x.shape().fibers() != self.fibers.len() {
            return Err(Error::ShapeMismatch("frame operator and vector disagree".into()));
        }
        let fibers = self
            .fibers
            .iter()
            .zip(x.fibers())
            .map(|(s, xk)| match self.kind {
                ScalarKind::Quaternion => xk.iter().map(|v| v.scale(s.get(0, 0).re)).collect(),
                ScalarKind::Complex => {
                    let v: Vec<Complex<T>> = xk.iter().map(|c| c.as_complex().expect("complex fiber")).collect();
                    s.apply(&v).into_iter().map(FiberScalar::Complex).collect()
                }
            })
            .collect();
        Ok(ModuleVector::from_parts(x.shape().clone(), fibers))
    }
}

/// Extreme eigenvalues of one fiber block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberSpectrum<T> {
    pub lambda_min: T,
    pub lambda_max: T,
}

/// Optimal frame bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameBounds<T> {
    pub is_frame: bool,
    /// `A = (√λ_min(S_k))_k`.
    pub lower: AlgebraElement<T>,
    /// `B = (√λ_max(S_k))_k`.
    pub upper: AlgebraElement<T>,
    /// Scalar constant `c = min_k λ_min(S_k)`.
    pub c: T,
    /// Scalar constant `d = max_k λ_max(S_k)`.
    pub d: T,
    pub per_fiber: Vec<FiberSpectrum<T>>,
}

impl<T: Real> FrameBounds<T> {
    /// `‖A⁻¹‖⁻¹`, the smallest fiber of the lower bound.
    pub fn lower_inverse_norm_inv(&self) -> T {
        self.lower.real_parts().into_iter().fold(T::infinity(), T::min)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tightness<T> {
    pub tight: bool,
    /// `(a_k)_k` with `S_k = a_k² I`, when tight.
    pub constant: Option<AlgebraElement<T>>,
    pub parseval: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction<T> {
    /// `Σ ω_n² P_n(S⁻¹ x)`.
    pub xhat: ModuleVector<T>,
    /// `S⁻¹ x`.
    pub preimage: ModuleVector<T>,
    /// `‖xhat − x‖ / ‖x‖`, zero for `x = 0`.
    pub rel_error: T,
}

/// Closed-form multiplier check for coordinate (block) frames.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierCheck<T> {
    pub member: bool,
    /// `Σ_n a_{n,k}² d_{n,k}` per fiber.
    pub fiber_sums: Vec<T>,
    /// `(√Σ_n a_{n,k}² d_{n,k})_k`, when a member.
    pub tight_constant: Option<AlgebraElement<T>>,
    pub series_conditions: &'static str,
}

/// A sequence of complemented submodules with weights, plus its cached
/// frame operator and per-fiber spectra.
#[derive(Clone, Debug)]
pub struct WeightedFrame<T> {
    shape: ModuleShape,
    submodules: Vec<Submodule<T>>,
    weights: WeightSequence<T>,
    operator: FrameOperator<T>,
    spectra: Vec<Vec<T>>,
}

impl<T: Real> WeightedFrame<T> {
    pub fn new(submodules: Vec<Submodule<T>>, weights: WeightSequence<T>) -> Result<Self> {
        let first = submodules
            .first()
            .ok_or_else(|| Error::InvalidArgument("a frame needs at least one submodule".into()))?;
        let shape = first.shape().clone();
        for u in &submodules[1..] {
            shape.ensure_same(u.shape())?;
        }
        if weights.len() != submodules.len() {
            return Err(Error::LengthMismatch {
                expected: submodules.len(),
                found: weights.len(),
            });
        }
        if weights.kind() != shape.kind() {
            return Err(Error::KindMismatch {
                expected: shape.kind(),
                found: weights.kind(),
            });
        }
        if weights.fibers() != shape.fibers() {
            return Err(Error::ShapeMismatch(format!(
                "weights have {} fibers, module has {}",
                weights.fibers(),
                shape.fibers()
            )));
        }
        let operator = FrameOperator::assemble(&shape, &submodules, &weights);
        let spectra = operator.fibers().iter().map(CMatrix::hermitian_eigenvalues).collect();
        Ok(Self {
            shape,
            submodules,
            weights,
            operator,
            spectra,
        })
    }

    /// Frame with every weight equal to `1_𝔄`.
    pub fn unweighted(submodules: Vec<Submodule<T>>) -> Result<Self> {
        let shape = submodules
            .first()
            .ok_or_else(|| Error::InvalidArgument("a frame needs at least one submodule".into()))?
            .shape()
            .clone();
        let weights = WeightSequence::constant(shape.kind(), shape.fibers(), submodules.len(), T::one())?;
        Self::new(submodules, weights)
    }

    pub fn shape(&self) -> &ModuleShape {
        &self.shape
    }

    pub fn submodules(&self) -> &[Submodule<T>] {
        &self.submodules
    }

    pub fn weights(&self) -> &WeightSequence<T> {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.submodules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.submodules.is_empty()
    }

    /// The analysis operator `S`.
    pub fn frame_operator(&self) -> &FrameOperator<T> {
        &self.operator
    }

    /// Sorted eigenvalues of each `S_k`.
    pub fn spectra(&self) -> &[Vec<T>] {
        &self.spectra
    }

    pub fn fiber_spectra(&self) -> Vec<FiberSpectrum<T>> {
        self.spectra
            .iter()
            .map(|e| FiberSpectrum {
                lambda_min: e[0],
                lambda_max: e[e.len() - 1],
            })
            .collect()
    }

    /// Optimal bounds. `rel_tol` sets the singularity floor
    /// `rel_tol · max(1, λ_max)` that `min λ_min` must exceed.
    pub fn frame_bounds(&self, rel_tol: T) -> FrameBounds<T> {
        let per_fiber = self.fiber_spectra();
        let c = per_fiber.iter().map(|s| s.lambda_min).fold(T::infinity(), T::min);
        let d = per_fiber.iter().map(|s| s.lambda_max).fold(T::neg_infinity(), T::max);
        let threshold = rel_tol * T::one().max(d);
        let sqrt = |v: T| v.max(T::zero()).sqrt();
        let kind = self.shape.kind();
        let lower = AlgebraElement::from_reals(kind, &per_fiber.iter().map(|s| sqrt(s.lambda_min)).collect::<Vec<_>>())
            .expect("non-empty");
        let upper = AlgebraElement::from_reals(kind, &per_fiber.iter().map(|s| sqrt(s.lambda_max)).collect::<Vec<_>>())
            .expect("non-empty");
        FrameBounds {
            is_frame: c > threshold,
            lower,
            upper,
            c,
            d,
            per_fiber,
        }
    }

    /// Bounds with the default singularity floor.
    pub fn bounds(&self) -> FrameBounds<T> {
        self.frame_bounds(T::FRAME_TOL)
    }

    pub fn is_frame(&self) -> bool {
        self.bounds().is_frame
    }

    pub(crate) fn require_frame(&self) -> Result<FrameBounds<T>> {
        let b = self.bounds();
        if b.is_frame {
            Ok(b)
        } else {
            Err(Error::NotAFrame {
                lambda_min: b.c.to_f64_lossy(),
                threshold: (T::FRAME_TOL * T::one().max(b.d)).to_f64_lossy(),
            })
        }
    }

    /// `Σ ω_n² P_n(x)` evaluated term by term, without the cached operator.
    pub fn frame_sum(&self, x: &ModuleVector<T>) -> Result<ModuleVector<T>> {
        let mut acc = ModuleVector::zeros(x.shape());
        for (u, w) in self.submodules.iter().zip(self.weights.weights()) {
            let sq: Vec<T> = w.real_parts().into_iter().map(|v| v * v).collect();
            acc = acc.try_add(&u.project(x)?.scale_fibers(&sq))?;
        }
        Ok(acc)
    }

    /// `Σ ω_n² |P_n(x)|²`, the middle term of the frame inequality.
    pub fn frame_energy(&self, x: &ModuleVector<T>) -> Result<AlgebraElement<T>> {
        self.shape.ensure_same(x.shape())?;
        let mut energy = vec![T::zero(); self.shape.fibers()];
        for (u, w) in self.submodules.iter().zip(self.weights.weights()) {
            let px = u.project(x)?;
            for ((acc, e), wk) in energy.iter_mut().zip(px.fiber_norms_sq()).zip(w.real_parts()) {
                *acc += wk * wk * e;
            }
        }
        AlgebraElement::from_reals(self.shape.kind(), &energy)
    }

    /// Synthesis operator `T x = (ω_n ∘ P_n x)_n`.
    pub fn synthesis(&self, x: &ModuleVector<T>) -> Result<ModuleSequence<T>> {
        self.shape.ensure_same(x.shape())?;
        let entries = self
            .submodules
            .iter()
            .zip(self.weights.weights())
            .map(|(u, w)| u.project(x).map(|px| px.scale_fibers(&w.real_parts())))
            .collect::<Result<Vec<_>>>()?;
        ModuleSequence::new(entries)
    }

    /// Adjoint `T* y = Σ ω_n ∘ P_n(y_n)`.
    pub fn synthesis_adjoint(&self, y: &ModuleSequence<T>) -> Result<ModuleVector<T>> {
        if y.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: y.len(),
            });
        }
        let mut acc = ModuleVector::zeros(&self.shape);
        for ((u, w), yn) in self.submodules.iter().zip(self.weights.weights()).zip(y.entries()) {
            acc = acc.try_add(&u.project(yn)?.scale_fibers(&w.real_parts()))?;
        }
        Ok(acc)
    }

    /// Solves `S y = x` fiberwise.
    pub fn solve(&self, x: &ModuleVector<T>) -> Result<ModuleVector<T>> {
        self.shape.ensure_same(x.shape())?;
        self.require_frame()?;
        let fibers = self
            .operator
            .fibers()
            .iter()
            .zip(x.fibers())
            .map(|(s, xk)| match self.shape.kind() {
                ScalarKind::Quaternion => {
                    let inv = T::one() / s.get(0, 0).re;
                    xk.iter().map(|v| v.scale(inv)).collect()
                }
                ScalarKind::Complex => {
                    let b: Vec<Complex<T>> = xk.iter().map(|c| c.as_complex().expect("complex fiber")).collect();
                    solve_hermitian(s, &b).into_iter().map(FiberScalar::Complex).collect()
                }
            })
            .collect();
        Ok(ModuleVector::from_parts(x.shape().clone(), fibers))
    }

    /// Reconstruction `x = Σ ω_n² P_n(S⁻¹ x)`.
    pub fn reconstruct(&self, x: &ModuleVector<T>) -> Result<Reconstruction<T>> {
        let preimage = self.solve(x)?;
        let xhat = self.frame_sum(&preimage)?;
        let xn = x.module_norm();
        let rel_error = if xn == T::zero() {
            xhat.module_norm()
        } else {
            xhat.try_sub(x)?.module_norm() / xn
        };
        Ok(Reconstruction {
            xhat,
            preimage,
            rel_error,
        })
    }

    /// Tightness: every `S_k` is `a_k² I` up to relative spread `tol`.
    pub fn tightness(&self, tol: T) -> Result<Tightness<T>> {
        self.require_frame()?;
        let spectra = self.fiber_spectra();
        let tight = spectra
            .iter()
            .all(|s| s.lambda_max - s.lambda_min <= tol * s.lambda_max.abs());
        if !tight {
            return Ok(Tightness {
                tight,
                constant: None,
                parseval: false,
            });
        }
        let values: Vec<T> = self
            .spectra
            .iter()
            .map(|e| {
                let mean = e.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize(e.len()).expect("small count");
                mean.sqrt()
            })
            .collect();
        let parseval = values.iter().all(|&a| (a - T::one()).abs() <= tol);
        let constant = AlgebraElement::from_reals(self.shape.kind(), &values)?;
        Ok(Tightness {
            tight,
            constant: Some(constant),
            parseval,
        })
    }

    /// Frame with weights `α_n + β_n` over the same submodules; both inputs
    /// must be frames.
    pub fn cone_add(&self, beta: &WeightSequence<T>) -> Result<Self> {
        self.require_frame()?;
        let other = Self::new(self.submodules.clone(), beta.clone())?;
        other.require_frame()?;
        Self::new(self.submodules.clone(), self.weights.try_add(beta)?)
    }

    /// Frame with weights `λ ω_n`, `λ > 0`.
    pub fn cone_scale(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rescaling factor must be positive, got {lambda}"
            )));
        }
        self.require_frame()?;
        Self::new(self.submodules.clone(), self.weights.scale(lambda)?)
    }

    /// Same submodule sequence with different weights.
    pub fn with_weights(&self, weights: WeightSequence<T>) -> Result<Self> {
        Self::new(self.submodules.clone(), weights)
    }

    /// Same weights with a different submodule sequence.
    pub fn with_submodules(&self, submodules: Vec<Submodule<T>>) -> Result<Self> {
        Self::new(submodules, self.weights.clone())
    }

    /// Index sets `I_n` if every submodule is a coordinate (block) submodule.
    pub fn block_index_sets(&self) -> Option<Vec<Vec<usize>>> {
        self.submodules
            .iter()
            .map(|u| {
                u.selectors(T::BASE_TOL)
                    .map(|sel| sel.iter().enumerate().filter(|(_, &s)| s).map(|(k, _)| k).collect())
            })
            .collect()
    }
}

/// Direct Cholesky with one refinement step for small fibers, CG above
/// [`DIRECT_SOLVE_MAX_DIM`].
fn solve_hermitian<T: Real>(s: &CMatrix<T>, b: &[Complex<T>]) -> Vec<Complex<T>> {
    let m = s.dim();
    if m <= DIRECT_SOLVE_MAX_DIM {
        if let Some(mut y) = s.cholesky_solve(b) {
            let sy = s.apply(&y);
            let r: Vec<Complex<T>> = b.iter().zip(&sy).map(|(bi, si)| bi - si).collect();
            if norm(&r) > T::zero() {
                if let Some(dy) = s.cholesky_solve(&r) {
                    for (yi, di) in y.iter_mut().zip(dy) {
                        *yi += di;
                    }
                }
            }
            return y;
        }
    }
    conjugate_gradient(s, b, T::lit(1e-14), 10 * m).solution
}

/// Closed-form check for block frames: index sets `I_n` (0-based fibers)
/// and weight matrix `a_{n,k} > 0`.
pub fn block_multiplier_check<T: Real>(
    shape: &ModuleShape,
    index_sets: &[Vec<usize>],
    weight_rows: &[Vec<T>],
) -> Result<MultiplierCheck<T>> {
    let n_fibers = shape.fibers();
    if index_sets.len() != weight_rows.len() {
        return Err(Error::LengthMismatch {
            expected: index_sets.len(),
            found: weight_rows.len(),
        });
    }
    let mut sums = vec![T::zero(); n_fibers];
    for (set, row) in index_sets.iter().zip(weight_rows) {
        if row.len() != n_fibers {
            return Err(Error::LengthMismatch {
                expected: n_fibers,
                found: row.len(),
            });
        }
        if let Some(&bad) = set.iter().find(|&&k| k >= n_fibers) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                fibers: n_fibers,
            });
        }
        for (k, sum) in sums.iter_mut().enumerate() {
            if set.contains(&k) {
                *sum += row[k] * row[k];
            }
        }
    }
    let member = sums.iter().all(|&s| s > T::zero());
    let tight_constant = if member {
        let roots: Vec<T> = sums.iter().map(|s| s.sqrt()).collect();
        Some(AlgebraElement::from_reals(shape.kind(), &roots)?)
    } else {
        None
    };
    Ok(MultiplierCheck {
        member,
        fiber_sums: sums,
        tight_constant,
        series_conditions: SERIES_CONDITIONS,
    })
}

/// Builds the block frame `((U_n, a_n))` described by index sets and a
/// weight matrix.
pub fn block_frame<T: Real>(
    shape: &ModuleShape,
    index_sets: &[Vec<usize>],
    weight_rows: &[Vec<T>],
) -> Result<WeightedFrame<T>> {
    let subs = index_sets
        .iter()
        .map(|set| Submodule::block(shape, set))
        .collect::<Result<Vec<_>>>()?;
    WeightedFrame::new(subs, WeightSequence::from_rows(shape.kind(), weight_rows)?)
}
