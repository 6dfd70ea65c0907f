//! Seeded random instances for tests, the acceptance suite and the CLI.

use num_complex::Complex;
use rand::Rng;

use crate::algebra::AlgebraElement;
use crate::frame::{WeightSequence, WeightedFrame};
use crate::linalg::{orthonormalize, CMatrix};
use crate::module::{ModuleShape, ModuleVector};
use crate::morphism::{OrthoMap, Rotation};
use crate::scalar::{FiberScalar, Quaternion, ScalarKind};
use crate::submodule::{FiberProjection, Submodule};

pub use crate::oracle::random_unit_vector;

type C64 = Complex<f64>;

pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion<f64> {
    Quaternion::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

pub fn unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion<f64> {
    loop {
        if let Some(q) = quaternion(rng).normalize() {
            if q.norm() > 0.0 {
                return q;
            }
        }
    }
}

pub fn scalar<R: Rng + ?Sized>(kind: ScalarKind, rng: &mut R) -> FiberScalar<f64> {
    match kind {
        ScalarKind::Complex => FiberScalar::Complex(complex(rng)),
        ScalarKind::Quaternion => FiberScalar::Quaternion(quaternion(rng)),
    }
}

/// Element with every fiber drawn from the unit box, scaled by `scale`.
pub fn algebra_element<R: Rng + ?Sized>(
    kind: ScalarKind,
    fibers: usize,
    scale: f64,
    rng: &mut R,
) -> AlgebraElement<f64> {
    AlgebraElement::new((0..fibers).map(|_| scalar(kind, rng).scale(scale)).collect()).expect("non-empty, one kind")
}

pub fn vector<R: Rng + ?Sized>(shape: &ModuleShape, scale: f64, rng: &mut R) -> ModuleVector<f64> {
    let fibers = shape
        .dims()
        .iter()
        .map(|&m| (0..m).map(|_| scalar(shape.kind(), rng).scale(scale)).collect())
        .collect();
    ModuleVector::new(shape.clone(), fibers).expect("layout matches the shape")
}

/// Random shape with `fibers` fibers; complex fiber dimensions in `1..=max_dim`.
pub fn shape<R: Rng + ?Sized>(kind: ScalarKind, fibers: usize, max_dim: usize, rng: &mut R) -> ModuleShape {
    let dims = match kind {
        ScalarKind::Complex => (0..fibers).map(|_| rng.random_range(1..=max_dim)).collect(),
        ScalarKind::Quaternion => vec![1; fibers],
    };
    ModuleShape::new(kind, dims).expect("valid dimensions")
}

/// Random orthonormal set of `rank` vectors in `ℂᵐ`.
pub fn orthonormal_set<R: Rng + ?Sized>(m: usize, rank: usize, rng: &mut R) -> Vec<Vec<C64>> {
    loop {
        let raw: Vec<Vec<C64>> = (0..rank).map(|_| (0..m).map(|_| complex(rng)).collect()).collect();
        let basis = orthonormalize(&raw);
        if basis.len() == rank {
            return basis;
        }
    }
}

/// Random unitary `m × m` matrix (orthonormalized random columns).
pub fn unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMatrix<f64> {
    let cols = orthonormal_set(m, m, rng);
    CMatrix::from_fn(m, |i, j| cols[j][i])
}

/// Random submodule: each complex fiber gets a span of random rank in
/// `0..=m`; each quaternion fiber is selected with probability ½.
pub fn submodule<R: Rng + ?Sized>(shape: &ModuleShape, rng: &mut R) -> Submodule<f64> {
    match shape.kind() {
        ScalarKind::Complex => {
            let sets: Vec<Vec<Vec<C64>>> = shape
                .dims()
                .iter()
                .map(|&m| {
                    let rank = rng.random_range(0..=m);
                    (0..rank).map(|_| (0..m).map(|_| complex(rng)).collect()).collect()
                })
                .collect();
            Submodule::span(shape, &sets).expect("layout matches the shape")
        }
        ScalarKind::Quaternion => {
            let fibers = (0..shape.fibers())
                .map(|_| FiberProjection::Selector(rng.random_bool(0.5)))
                .collect();
            Submodule::from_fibers(shape.clone(), fibers).expect("selectors fit quaternion fibers")
        }
    }
}

/// Random central weights with fibers in `[lo, hi]`.
pub fn weights<R: Rng + ?Sized>(
    kind: ScalarKind,
    fibers: usize,
    count: usize,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> WeightSequence<f64> {
    let rows: Vec<Vec<f64>> = (0..count)
        .map(|_| (0..fibers).map(|_| rng.random_range(lo..=hi)).collect())
        .collect();
    WeightSequence::from_rows(kind, &rows).expect("positive finite weights")
}

/// Worst per-fiber condition number `λ_max / λ_min` of the frame operator.
pub fn condition(frame: &WeightedFrame<f64>) -> f64 {
    frame
        .fiber_spectra()
        .iter()
        .map(|s| {
            if s.lambda_min > 0.0 {
                s.lambda_max / s.lambda_min
            } else {
                f64::INFINITY
            }
        })
        .fold(1.0, f64::max)
}

/// Random frame with `count` members whose operator has condition number at
/// most `max_cond` (rejection sampling).
pub fn frame<R: Rng + ?Sized>(shape: &ModuleShape, count: usize, max_cond: f64, rng: &mut R) -> WeightedFrame<f64> {
    loop {
        let subs = (0..count).map(|_| submodule(shape, rng)).collect();
        let w = weights(shape.kind(), shape.fibers(), count, 0.5, 2.0, rng);
        let f = WeightedFrame::new(subs, w).expect("consistent shapes");
        if f.is_frame() && condition(&f) <= max_cond {
            return f;
        }
    }
}

/// Random `x ↦ c·U x` (complex) or `x ↦ c·x·u` (quaternion), scales in `[lo, hi]`.
pub fn ortho_map<R: Rng + ?Sized>(shape: &ModuleShape, lo: f64, hi: f64, rng: &mut R) -> OrthoMap<f64> {
    let scales = (0..shape.fibers()).map(|_| rng.random_range(lo..=hi)).collect();
    let rotations = shape
        .dims()
        .iter()
        .map(|&m| match shape.kind() {
            ScalarKind::Complex => Rotation::Unitary(unitary(m, rng)),
            ScalarKind::Quaternion => Rotation::Quaternion(unit_quaternion(rng)),
        })
        .collect();
    OrthoMap::new(shape.clone(), scales, rotations).expect("random unitaries are valid")
}

/// Random cover of `0..fibers` by `count` index sets (every fiber lands in
/// at least one set), so that any positive block weights give a frame.
pub fn block_cover<R: Rng + ?Sized>(fibers: usize, count: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = (0..count)
        .map(|_| (0..fibers).filter(|_| rng.random_bool(0.5)).collect())
        .collect();
    for k in 0..fibers {
        if !sets.iter().any(|s| s.contains(&k)) {
            let n = rng.random_range(0..count);
            sets[n].push(k);
            sets[n].sort_unstable();
        }
    }
    sets
}
