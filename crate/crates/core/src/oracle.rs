//! Dense reference implementation used to cross-check the fiberwise fast path.
//!
//! Everything here is assembled as one complex matrix over the flattened
//! module and diagonalized with `nalgebra`. Quaternion fibers are expanded to
//! 2×2 complex blocks through `a + b·j ↦ [[a, b], [−b̄, ā]]`.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex;
use rand::Rng;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::frame::{FrameBounds, WeightedFrame};
use crate::module::{ModuleShape, ModuleVector};
use crate::scalar::{Quaternion, Real, ScalarKind};
use crate::submodule::FiberProjection;

/// Largest flattened dimension the oracle will assemble.
pub const MAX_DENSE_DIM: usize = 2048;

type C64 = Complex<f64>;

/// A square complex matrix acting on the flattened module, with the
/// position of each fiber block.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub matrix: DMatrix<C64>,
    /// `(offset, size)` of each fiber block.
    pub blocks: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenBounds {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// `q = a + b·j` with `a = w + x i`, `b = y + z i`, as `[[a, b], [−b̄, ā]]`.
pub fn quaternion_block<T: Real>(q: Quaternion<T>) -> Matrix2<C64> {
    let [w, x, y, z] = q.components().map(|v| v.to_f64_lossy());
    let a = C64::new(w, x);
    let b = C64::new(y, z);
    Matrix2::new(a, b, -b.conj(), a.conj())
}

fn block_layout(shape: &ModuleShape) -> Vec<(usize, usize)> {
    let width = match shape.kind() {
        ScalarKind::Complex => 1,
        ScalarKind::Quaternion => 2,
    };
    let mut offset = 0;
    shape
        .dims()
        .iter()
        .map(|&m| {
            let here = (offset, m * width);
            offset += m * width;
            here
        })
        .collect()
}

/// Flattens a module vector. A quaternion entry becomes the first column
/// of its 2×2 block, which keeps Euclidean norms.
pub fn flatten_vector<T: Real>(x: &ModuleVector<T>) -> DVector<C64> {
    let mut out = Vec::new();
    for fiber in x.fibers() {
        for v in fiber {
            match v.as_complex() {
                Some(c) if x.kind() == ScalarKind::Complex => {
                    out.push(C64::new(c.re.to_f64_lossy(), c.im.to_f64_lossy()))
                }
                _ => {
                    let blk = quaternion_block(v.as_quaternion());
                    out.push(blk[(0, 0)]);
                    out.push(blk[(1, 0)]);
                }
            }
        }
    }
    DVector::from_vec(out)
}

/// Dense projection of submodule `n` of `frame` onto the flattened module.
fn dense_projection<T: Real>(frame: &WeightedFrame<T>, n: usize, blocks: &[(usize, usize)]) -> DMatrix<C64> {
    let total = blocks.last().map_or(0, |&(o, s)| o + s);
    let mut p = DMatrix::zeros(total, total);
    for (k, &(off, size)) in blocks.iter().enumerate() {
        match frame.submodules()[n].fiber(k) {
            FiberProjection::Selector(on) => {
                if *on {
                    for i in 0..size {
                        p[(off + i, off + i)] = C64::new(1.0, 0.0);
                    }
                }
            }
            FiberProjection::Matrix(m) => {
                for i in 0..size {
                    for j in 0..size {
                        let v = m.get(i, j);
                        p[(off + i, off + j)] = C64::new(v.re.to_f64_lossy(), v.im.to_f64_lossy());
                    }
                }
            }
        }
    }
    p
}

fn weight_squares<T: Real>(frame: &WeightedFrame<T>, n: usize) -> Vec<f64> {
    let w = &frame.weights().weights()[n];
    (0..w.len()).map(|k| w.fiber(k).norm_sqr().to_f64_lossy()).collect()
}

/// `S = Σ ω_n² P_n` as one dense block-diagonal matrix.
pub fn flatten_frame_operator<T: Real>(frame: &WeightedFrame<T>) -> Result<DenseOperator> {
    let blocks = block_layout(frame.shape());
    let total = blocks.last().map_or(0, |&(o, s)| o + s);
    if total > MAX_DENSE_DIM {
        return Err(Error::InvalidArgument(format!(
            "flattened dimension {total} exceeds the oracle cap {MAX_DENSE_DIM}"
        )));
    }
    let mut s = DMatrix::zeros(total, total);
    for n in 0..frame.len() {
        let p = dense_projection(frame, n, &blocks);
        let w2 = weight_squares(frame, n);
        for (k, &(off, size)) in blocks.iter().enumerate() {
            let mut view = s.view_mut((off, off), (size, size));
            view += p.view((off, off), (size, size)) * C64::new(w2[k], 0.0);
        }
    }
    Ok(DenseOperator { matrix: s, blocks })
}

fn hermitian_check(m: &DMatrix<C64>) -> Result<()> {
    let defect = (m - m.adjoint()).norm();
    let scale = m.norm().max(1.0);
    if defect > 1e-12 * scale || !defect.is_finite() {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

fn extremes(m: DMatrix<C64>) -> EigenBounds {
    if m.nrows() == 0 {
        return EigenBounds {
            lambda_min: 0.0,
            lambda_max: 0.0,
        };
    }
    let ev = m.symmetric_eigenvalues();
    EigenBounds {
        lambda_min: ev.min(),
        lambda_max: ev.max(),
    }
}

/// Extreme eigenvalues of the whole operator.
pub fn eigen_bounds(op: &DenseOperator) -> Result<EigenBounds> {
    hermitian_check(&op.matrix)?;
    Ok(extremes(op.matrix.clone()))
}

/// Extreme eigenvalues of each fiber block.
pub fn fiber_eigen_bounds(op: &DenseOperator) -> Result<Vec<EigenBounds>> {
    hermitian_check(&op.matrix)?;
    Ok(op
        .blocks
        .iter()
        .map(|&(off, size)| extremes(op.matrix.view((off, off), (size, size)).into_owned()))
        .collect())
}

/// Largest disagreement between the fast-path fiber spectra of `frame` and
/// the dense oracle's, over all fibers and both extremes.
pub fn spectral_deviation<T: Real>(frame: &WeightedFrame<T>) -> Result<f64> {
    let dense = fiber_eigen_bounds(&flatten_frame_operator(frame)?)?;
    let fast = frame.fiber_spectra();
    Ok(dense.iter().zip(&fast).fold(0.0f64, |acc, (o, f)| {
        acc.max((o.lambda_min - f.lambda_min.to_f64_lossy()).abs())
            .max((o.lambda_max - f.lambda_max.to_f64_lossy()).abs())
    }))
}

/// Outcome of sampling the frame inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleCheck {
    pub passed: bool,
    pub samples: usize,
    /// Smallest and largest `‖Σ ω_n² |P_n x|²‖` seen on unit vectors.
    pub observed_min: f64,
    pub observed_max: f64,
    pub violations: usize,
}

/// Random module vector with `‖x‖ = 1`.
pub fn random_unit_vector<R: Rng + ?Sized>(shape: &ModuleShape, rng: &mut R) -> ModuleVector<f64> {
    loop {
        let fibers: Vec<Vec<f64>> = shape
            .dims()
            .iter()
            .map(|&m| {
                (0..m * shape.kind().width())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        let x = from_flat(shape, &fibers);
        let n = x.module_norm();
        if n > 1e-3 {
            return x.scale(1.0 / n);
        }
    }
}

fn from_flat(shape: &ModuleShape, fibers: &[Vec<f64>]) -> ModuleVector<f64> {
    match shape.kind() {
        ScalarKind::Complex => ModuleVector::from_complex_fibers(
            shape.clone(),
            fibers
                .iter()
                .map(|f| f.chunks(2).map(|c| C64::new(c[0], c[1])).collect())
                .collect(),
        ),
        ScalarKind::Quaternion => ModuleVector::from_quaternions(
            &fibers
                .iter()
                .map(|f| Quaternion::new(f[0], f[1], f[2], f[3]))
                .collect::<Vec<_>>(),
        ),
    }
    .expect("layout matches the shape")
}

/// Samples `‖Σ ω_n² |P_n x|²‖` on random unit vectors and checks it lies in
/// `[c, d]`, and that `A²|x|² ≼ Σ ω_n² |P_n x|² ≼ B²|x|²`, with tolerance 1e-10.
/// The middle term is evaluated through dense projections.
pub fn brute_force_frame_check<R: Rng + ?Sized>(
    frame: &WeightedFrame<f64>,
    bounds: &FrameBounds<f64>,
    samples: usize,
    rng: &mut R,
) -> Result<SampleCheck> {
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    const TOL: f64 = 1e-10;
    let shape = frame.shape();
    let blocks = block_layout(shape);
    let projections: Vec<DMatrix<C64>> = (0..frame.len()).map(|n| dense_projection(frame, n, &blocks)).collect();
    let weights: Vec<Vec<f64>> = (0..frame.len()).map(|n| weight_squares(frame, n)).collect();
    let a2 = bounds.lower.try_mul(&bounds.lower)?;
    let b2 = bounds.upper.try_mul(&bounds.upper)?;

    let mut out = SampleCheck {
        passed: true,
        samples,
        observed_min: f64::INFINITY,
        observed_max: f64::NEG_INFINITY,
        violations: 0,
    };
    for _ in 0..samples {
        let x = random_unit_vector(shape, rng);
        let flat = flatten_vector(&x);
        let mut mid = vec![0.0; shape.fibers()];
        for (p, w2) in projections.iter().zip(&weights) {
            let px = p * &flat;
            for (k, &(off, size)) in blocks.iter().enumerate() {
                mid[k] += w2[k] * px.rows(off, size).norm_squared();
            }
        }
        let value = mid.iter().copied().fold(0.0, f64::max);
        out.observed_min = out.observed_min.min(value);
        out.observed_max = out.observed_max.max(value);
        let mid_el = AlgebraElement::from_reals(shape.kind(), &mid)?;
        let x2 = x.abs_sq();
        let ok = value >= bounds.c - TOL
            && value <= bounds.d + TOL
            && a2.try_mul(&x2)?.order_leq(&mid_el, TOL)?
            && mid_el.order_leq(&b2.try_mul(&x2)?, TOL)?;
        if !ok {
            out.violations += 1;
            out.passed = false;
        }
    }
    Ok(out)
}
