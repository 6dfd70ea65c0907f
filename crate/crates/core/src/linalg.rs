//! Small dense complex linear algebra used per fiber.
//!
//! Everything here works on one fiber at a time, so matrices are tiny
//! (m ≤ 64 in practice) and stored row-major in a flat `Vec`.

use num_complex::Complex;

use crate::scalar::Real;

pub type C<T> = Complex<T>;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds from row-major data; `None` if the length is not a square.
    pub fn from_row_major(dim: usize, data: Vec<C<T>>) -> Option<Self> {
        (data.len() == dim * dim).then_some(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        self.data[i * self.dim + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `self += s · rhs`.
    pub fn add_scaled(&mut self, s: T, rhs: &Self) {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b * s;
        }
    }

    pub fn apply(&self, x: &[C<T>]) -> Vec<C<T>> {
        debug_assert_eq!(self.dim, x.len());
        (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter()
                    .zip(x)
                    .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|c| c.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Frobenius norm of `A − Aᴴ`.
    pub fn hermitian_defect(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Frobenius norm of `A² − A`.
    pub fn idempotent_defect(&self) -> T {
        self.matmul(self).sub(self).frobenius_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// Only the Hermitian part is read. The matrix is embedded as the real
    /// symmetric `[[X, −Y], [Y, X]]`, whose spectrum is that of `X + iY`
    /// with every eigenvalue doubled; cyclic Jacobi is run on the embedding.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let n = self.dim;
        match n {
            0 => return Vec::new(),
            1 => return vec![self.data[0].re],
            _ => {}
        }
        let two = T::lit(2.0);
        let big = 2 * n;
        let mut a = vec![T::zero(); big * big];
        for i in 0..n {
            for j in 0..n {
                // Hermitian part, so asymmetric round-off cannot leak in
                let h = (self.get(i, j) + self.get(j, i).conj()) / two;
                a[i * big + j] = h.re;
                a[(i + n) * big + (j + n)] = h.re;
                a[i * big + (j + n)] = -h.im;
                a[(i + n) * big + j] = h.im;
            }
        }
        let mut eig = jacobi_eigenvalues(a, big);
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        eig.chunks(2).map(|p| (p[0] + p[1]) / two).collect()
    }

    /// Largest eigenvalue modulus of a Hermitian matrix (its spectral norm).
    pub fn hermitian_spectral_norm(&self) -> T {
        self.hermitian_eigenvalues()
            .into_iter()
            .fold(T::zero(), |m, l| m.max(l.abs()))
    }

    /// Solves `A x = b` for Hermitian positive definite `A` by Cholesky.
    /// Returns `None` if a pivot is not positive.
    pub fn cholesky_solve(&self, b: &[C<T>]) -> Option<Vec<C<T>>> {
        let n = self.dim;
        let zero = C::new(T::zero(), T::zero());
        let mut l = vec![zero; n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > T::zero()) {
                return None;
            }
            let ljj = d.sqrt();
            l[j * n + j] = C::new(ljj, T::zero());
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / ljj;
            }
        }
        // L z = b
        let mut z = vec![zero; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= l[i * n + k] * z[k];
            }
            z[i] = s / l[i * n + i].re;
        }
        // Lᴴ x = z
        let mut x = vec![zero; n];
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= l[k * n + i].conj() * x[k];
            }
            x[i] = s / l[i * n + i].re;
        }
        Some(x)
    }
}

/// Cyclic Jacobi on a real symmetric `n × n` matrix (row-major). Returns
/// the diagonal after convergence, unsorted.
pub fn jacobi_eigenvalues<T: Real>(mut a: Vec<T>, n: usize) -> Vec<T> {
    const MAX_SWEEPS: usize = 100;
    let two = T::lit(2.0);
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..n {
            for j in 0..n {
                let v = a[i * n + j] * a[i * n + j];
                total += v;
                if i != j {
                    off += v;
                }
            }
        }
        if off == T::zero() || off.sqrt() <= T::epsilon() * T::lit(0.1) * total.sqrt() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(T::one()));
                let c = T::one() / t.hypot(T::one());
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Outcome of a conjugate-gradient run.
#[derive(Clone, Debug)]
pub struct CgOutcome<T> {
    pub solution: Vec<C<T>>,
    pub iterations: usize,
    pub relative_residual: T,
}

/// Conjugate gradient for Hermitian positive definite `a`, stopping at
/// relative residual `tol` or after `max_iter` steps.
pub fn conjugate_gradient<T: Real>(a: &CMatrix<T>, b: &[C<T>], tol: T, max_iter: usize) -> CgOutcome<T> {
    let n = a.dim();
    let zero = C::new(T::zero(), T::zero());
    let b_norm = norm(b);
    let mut x = vec![zero; n];
    if b_norm == T::zero() {
        return CgOutcome {
            solution: x,
            iterations: 0,
            relative_residual: T::zero(),
        };
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rs = dot(&r, &r).re;
    let mut iterations = 0;
    while iterations < max_iter {
        if rs.sqrt() <= tol * b_norm {
            break;
        }
        let ap = a.apply(&p);
        let pap = dot(&p, &ap).re;
        if !(pap > T::zero()) {
            break;
        }
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += p[i] * alpha;
            r[i] -= ap[i] * alpha;
        }
        let rs_new = dot(&r, &r).re;
        let beta = rs_new / rs;
        for i in 0..n {
            p[i] = r[i] + p[i] * beta;
        }
        rs = rs_new;
        iterations += 1;
    }
    // true residual, not the recursively updated one
    let ax = a.apply(&x);
    let res: Vec<C<T>> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    CgOutcome {
        relative_residual: norm(&res) / b_norm,
        solution: x,
        iterations,
    }
}

/// `xᴴ y`.
pub fn dot<T: Real>(x: &[C<T>], y: &[C<T>]) -> C<T> {
    x.iter()
        .zip(y)
        .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}

pub fn norm<T: Real>(x: &[C<T>]) -> T {
    x.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
}

/// Orthonormal basis of the span of `vectors` by modified Gram–Schmidt
/// with one re-orthogonalization pass. Vectors whose residual falls below
/// `RANK_TOL ×` the largest input norm are dropped.
pub fn orthonormalize<T: Real>(vectors: &[Vec<C<T>>]) -> Vec<Vec<C<T>>> {
    let largest = vectors.iter().map(|v| norm(v)).fold(T::zero(), T::max);
    if largest == T::zero() {
        return Vec::new();
    }
    let drop_tol = T::RANK_TOL * largest;
    let mut basis: Vec<Vec<C<T>>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let coef = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= qi * coef;
                }
            }
        }
        let len = norm(&w);
        if len > drop_tol {
            basis.push(w.into_iter().map(|c| c / len).collect());
        }
    }
    basis
}

/// Orthogonal projector `Σ q qᴴ` onto the span of an orthonormal set.
pub fn projector_from_basis<T: Real>(dim: usize, basis: &[Vec<C<T>>]) -> CMatrix<T> {
    let mut p = CMatrix::zeros(dim);
    for q in basis {
        for i in 0..dim {
            for j in 0..dim {
                let v = p.get(i, j) + q[i] * q[j].conj();
                p.set(i, j, v);
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn real(rows: &[&[f64]]) -> CMatrix<f64> {
        CMatrix::from_fn(rows.len(), |i, j| c(rows[i][j], 0.0))
    }

    #[test]
    fn eigenvalues_of_two_by_two() {
        let m = real(&[&[1.5, 0.5], &[0.5, 1.5]]);
        let e = m.hermitian_eigenvalues();
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_complex_hermitian() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m = CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => c(0.0, 1.0),
            (1, 0) => c(0.0, -1.0),
            _ => c(2.0, 0.0),
        });
        let e = m.hermitian_eigenvalues();
        assert!((e[0] - 1.0).abs() < 1e-14, "{e:?}");
        assert!((e[1] - 3.0).abs() < 1e-14, "{e:?}");
    }

    #[test]
    fn diagonal_is_its_own_spectrum() {
        let m = real(&[&[1.0, 0.0, 0.0], &[0.0, 5.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(m.hermitian_eigenvalues(), vec![1.0, 1.0, 5.0]);
    }

    #[test]
    fn cholesky_matches_known_solution() {
        let m = real(&[&[1.5, 0.5], &[0.5, 1.5]]);
        let x = m.cholesky_solve(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        // inverse is [[0.75, -0.25], [-0.25, 0.75]]
        assert!((x[0] - c(0.75, 0.0)).norm() < 1e-15);
        assert!((x[1] - c(-0.25, 0.0)).norm() < 1e-15);
        assert!(real(&[&[0.0]]).cholesky_solve(&[c(1.0, 0.0)]).is_none());
    }

    #[test]
    fn cg_agrees_with_cholesky() {
        let n = 6;
        let m = CMatrix::from_fn(n, |i, j| {
            if i == j {
                c(4.0 + i as f64, 0.0)
            } else if i < j {
                c(0.3, 0.1 * (j - i) as f64)
            } else {
                c(0.3, -0.1 * (i - j) as f64)
            }
        });
        let b: Vec<_> = (0..n).map(|i| c(i as f64, 1.0)).collect();
        let direct = m.cholesky_solve(&b).unwrap();
        let cg = conjugate_gradient(&m, &b, 1e-14, 10 * n);
        assert!(cg.relative_residual < 1e-13);
        for (a, b) in direct.iter().zip(&cg.solution) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn gram_schmidt_drops_dependent_and_zero_vectors() {
        let v = vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(2.0, 0.0), c(2.0, 0.0)],
        ];
        let q = orthonormalize(&v);
        assert_eq!(q.len(), 1);
        let p = projector_from_basis(2, &q);
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.get(i, j) - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }
}
