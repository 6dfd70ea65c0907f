//! Projection distance, subspace angle, weighted ecart on submodule
//! sequences, and the sufficient conditions under which a perturbed
//! submodule sequence still carries a frame.

use rand::Rng;

use crate::error::{Error, Result};
use crate::frame::WeightedFrame;
use crate::morphism::givens;
use crate::scalar::Real;
use crate::submodule::{FiberProjection, Submodule};

/// `d(U, V) = ‖π_U − π_V‖`: the largest spectral norm of the fiber
/// differences, clamped to `[0, 1]`. Values within `BASE_TOL` of 1 are
/// reported as exactly 1 so that `arcsin` lands on `π/2`.
pub fn proj_distance<T: Real>(u: &Submodule<T>, v: &Submodule<T>) -> Result<T> {
    u.shape().ensure_same(v.shape())?;
    let mut d = T::zero();
    for (pu, pv) in u.fibers().iter().zip(v.fibers()) {
        let here = match (pu, pv) {
            (FiberProjection::Selector(a), FiberProjection::Selector(b)) => {
                if a == b {
                    T::zero()
                } else {
                    T::one()
                }
            }
            (FiberProjection::Matrix(a), FiberProjection::Matrix(b)) => a.sub(b).hermitian_spectral_norm(),
            (a, b) => a.to_matrix().sub(&b.to_matrix()).hermitian_spectral_norm(),
        };
        d = d.max(here);
    }
    if d >= T::one() - T::BASE_TOL {
        d = T::one();
    }
    Ok(d)
}

/// `arcsin d(U, V)`, in `[0, π/2]`.
pub fn angle<T: Real>(u: &Submodule<T>, v: &Submodule<T>) -> Result<T> {
    Ok(proj_distance(u, v)?.asin())
}

fn check_pairing<T: Real>(us: &[Submodule<T>], vs: &[Submodule<T>], w: &[T]) -> Result<()> {
    if us.len() != vs.len() {
        return Err(Error::LengthMismatch {
            expected: us.len(),
            found: vs.len(),
        });
    }
    if w.len() != us.len() {
        return Err(Error::LengthMismatch {
            expected: us.len(),
            found: w.len(),
        });
    }
    if let Some(n) = w.iter().position(|&x| !(x > T::zero()) || !x.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ecart weight {n} must be positive and finite"
        )));
    }
    Ok(())
}

/// `d_w((U_n), (V_n)) = √(Σ w_n d(U_n, V_n)²)`.
pub fn ecart<T: Real>(us: &[Submodule<T>], vs: &[Submodule<T>], w: &[T]) -> Result<T> {
    check_pairing(us, vs, w)?;
    let mut acc = T::zero();
    for ((u, v), &wn) in us.iter().zip(vs).zip(w) {
        let d = proj_distance(u, v)?;
        acc += wn * d * d;
    }
    Ok(acc.sqrt())
}

/// Whether `candidate` lies in the open ecart ball of `radius` about `center`.
pub fn ball_membership<T: Real>(
    center: &[Submodule<T>],
    radius: T,
    candidate: &[Submodule<T>],
    w: &[T],
) -> Result<bool> {
    if !(radius >= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "radius must be non-negative, got {radius}"
        )));
    }
    Ok(ecart(center, candidate, w)? < radius)
}

/// One sufficient condition `lhs < rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Criterion<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

impl<T: Real> Criterion<T> {
    fn strict(lhs: T, rhs: T) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs < rhs,
        }
    }
}

/// The three angle conditions, each sufficient for the ecart condition.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleCriteria<T> {
    /// `Σ ‖ω_n‖² θ_n² < ‖A⁻¹‖⁻²`.
    pub weighted: Criterion<T>,
    /// `Σ θ_n² < (‖A⁻¹‖⁻¹ / ‖ω‖_∞)²`.
    pub bounded_weight: Criterion<T>,
    /// `Σ θ_n^{2p/(p−1)} < (‖A⁻¹‖⁻² / ‖𝔮(ω)‖_p)^{p/(p−1)}`, when `p` is given.
    pub holder: Option<Criterion<T>>,
    pub holder_p: Option<T>,
}

impl<T: Real> AngleCriteria<T> {
    pub fn any_holds(&self) -> bool {
        self.weighted.holds || self.bounded_weight.holds || self.holder.is_some_and(|c| c.holds)
    }
}

/// Observed scalar bounds of the perturbed family `((K_n, ω_n))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservedBounds<T> {
    pub is_frame: bool,
    pub c: T,
    pub d: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbReport<T> {
    pub distances: Vec<T>,
    pub angles: Vec<T>,
    /// `𝔮(ω) = (‖ω_n‖²)_n`.
    pub ecart_weights: Vec<T>,
    pub ecart: T,
    /// `‖A⁻¹‖⁻¹` for the optimal lower bound `A` of the unperturbed frame.
    pub threshold: T,
    /// `ecart < threshold` (strict).
    pub guaranteed: bool,
    /// `(‖A⁻¹‖⁻¹ − ecart)²`, when guaranteed.
    pub predicted_lower: Option<T>,
    /// `(‖B‖ + ecart)²`.
    pub predicted_upper: T,
    pub observed: ObservedBounds<T>,
    /// Guaranteed ⇒ the perturbed family is a frame within the predicted
    /// scalar bounds (up to `FRAME_TOL`). Vacuously true otherwise.
    pub confirmed: bool,
    pub criteria: AngleCriteria<T>,
    /// Every criterion that holds also has `guaranteed` set.
    pub criteria_consistent: bool,
}

fn pairwise<T: Real>(frame: &WeightedFrame<T>, ks: &[Submodule<T>]) -> Result<(Vec<T>, Vec<T>)> {
    if ks.len() != frame.len() {
        return Err(Error::LengthMismatch {
            expected: frame.len(),
            found: ks.len(),
        });
    }
    let distances = frame
        .submodules()
        .iter()
        .zip(ks)
        .map(|(h, k)| proj_distance(h, k))
        .collect::<Result<Vec<_>>>()?;
    let angles = distances.iter().map(|d| d.asin()).collect();
    Ok((distances, angles))
}

fn criteria_from_angles<T: Real>(
    frame: &WeightedFrame<T>,
    angles: &[T],
    threshold: T,
    p: Option<T>,
) -> Result<AngleCriteria<T>> {
    let q = frame.weights().ecart_weights();
    let sq = |v: T| v * v;
    let weighted = Criterion::strict(
        q.iter().zip(angles).fold(T::zero(), |acc, (&qn, &t)| acc + qn * t * t),
        sq(threshold),
    );
    let bounded_weight = Criterion::strict(
        angles.iter().fold(T::zero(), |acc, &t| acc + t * t),
        sq(threshold / frame.weights().sup_norm()),
    );
    let holder = match p {
        None => None,
        Some(p) => {
            if !(p > T::one()) || !p.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "Hölder exponent must lie in (1, ∞), got {p}"
                )));
            }
            let conj = p / (p - T::one());
            let q_norm = q.iter().fold(T::zero(), |acc, &v| acc + v.powf(p)).powf(T::one() / p);
            let lhs = angles
                .iter()
                .fold(T::zero(), |acc, &t| acc + t.powf(T::lit(2.0) * conj));
            Some(Criterion::strict(lhs, (sq(threshold) / q_norm).powf(conj)))
        }
    };
    Ok(AngleCriteria {
        weighted,
        bounded_weight,
        holder,
        holder_p: p,
    })
}

/// Evaluates the three angle conditions for perturbing `frame` to `ks`.
pub fn angle_criteria<T: Real>(
    frame: &WeightedFrame<T>,
    ks: &[Submodule<T>],
    p: Option<T>,
) -> Result<AngleCriteria<T>> {
    let bounds = frame.require_frame()?;
    let (_, angles) = pairwise(frame, ks)?;
    criteria_from_angles(frame, &angles, bounds.lower_inverse_norm_inv(), p)
}

/// Full perturbation analysis of replacing the submodules of `frame` by `ks`.
pub fn perturbation_check<T: Real>(
    frame: &WeightedFrame<T>,
    ks: &[Submodule<T>],
    holder_p: Option<T>,
) -> Result<PerturbReport<T>> {
    let bounds = frame.require_frame()?;
    for k in ks {
        frame.shape().ensure_same(k.shape())?;
    }
    let (distances, angles) = pairwise(frame, ks)?;
    let ecart_weights = frame.weights().ecart_weights();
    let ecart_sq = ecart_weights
        .iter()
        .zip(&distances)
        .fold(T::zero(), |acc, (&w, &d)| acc + w * d * d);
    let ecart = ecart_sq.sqrt();
    let threshold = bounds.lower_inverse_norm_inv();
    let upper_norm = bounds.upper.norm();
    let guaranteed = ecart < threshold;
    let predicted_lower = guaranteed.then(|| (threshold - ecart) * (threshold - ecart));
    let predicted_upper = (upper_norm + ecart) * (upper_norm + ecart);

    let perturbed = frame.with_submodules(ks.to_vec())?.bounds();
    let observed = ObservedBounds {
        is_frame: perturbed.is_frame,
        c: perturbed.c,
        d: perturbed.d,
    };
    let slack = T::FRAME_TOL * T::one().max(predicted_upper);
    let confirmed = match predicted_lower {
        None => true,
        Some(lo) => observed.is_frame && observed.c >= lo - slack && observed.d <= predicted_upper + slack,
    };

    let criteria = criteria_from_angles(frame, &angles, threshold, holder_p)?;
    let criteria_consistent = !criteria.any_holds() || guaranteed;
    Ok(PerturbReport {
        distances,
        angles,
        ecart_weights,
        ecart,
        threshold,
        guaranteed,
        predicted_lower,
        predicted_upper,
        observed,
        confirmed,
        criteria,
        criteria_consistent,
    })
}

/// Rotates every complex fiber (of dimension ≥ 2) of every submodule by a
/// Givens rotation in a random coordinate plane, angle uniform in
/// `[0, theta_max]`. One-dimensional and quaternion fibers are unchanged.
/// Each resulting pair distance is at most `sin θ_max`.
pub fn random_givens_perturbation<T: Real, R: Rng + ?Sized>(
    subs: &[Submodule<T>],
    theta_max: T,
    rng: &mut R,
) -> Vec<Submodule<T>> {
    let theta_max = theta_max.to_f64_lossy();
    subs.iter()
        .map(|u| {
            let fibers = u
                .fibers()
                .iter()
                .map(|f| match f {
                    FiberProjection::Matrix(p) if p.dim() >= 2 => {
                        let m = p.dim();
                        let i = rng.random_range(0..m);
                        let mut j = rng.random_range(0..m - 1);
                        if j >= i {
                            j += 1;
                        }
                        let theta = T::lit(rng.random::<f64>() * theta_max);
                        let g = givens(m, i, j, theta);
                        FiberProjection::Matrix(g.matmul(p).matmul(&g.adjoint()))
                    }
                    other => other.clone(),
                })
                .collect();
            Submodule::from_fibers(u.shape().clone(), fibers).expect("same layout as the input")
        })
        .collect()
}

/// Largest Givens angle for which [`random_givens_perturbation`] stays
/// within `budget · ‖A⁻¹‖⁻¹` in ecart, whatever the random draws.
pub fn budget_theta_max<T: Real>(frame: &WeightedFrame<T>, budget: T) -> Result<T> {
    let bounds = frame.require_frame()?;
    let total: T = frame
        .weights()
        .ecart_weights()
        .into_iter()
        .fold(T::zero(), |a, b| a + b);
    let s = (budget * bounds.lower_inverse_norm_inv() / total.sqrt()).min(T::one());
    Ok(s.asin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::ModuleShape;
    use crate::scalar::ScalarKind;
    use num_complex::Complex;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    fn line(shape: &ModuleShape, v: &[f64]) -> Submodule<f64> {
        Submodule::span(shape, &[vec![v.iter().map(|&x| Complex::new(x, 0.0)).collect()]]).unwrap()
    }

    fn plane() -> ModuleShape {
        ModuleShape::uniform(ScalarKind::Complex, 1, 2).unwrap()
    }

    fn three_lines() -> WeightedFrame<f64> {
        let s = plane();
        WeightedFrame::unweighted(vec![
            line(&s, &[1.0, 0.0]),
            line(&s, &[0.0, 1.0]),
            line(&s, &[1.0, 1.0]),
        ])
        .unwrap()
    }

    fn rotated(frame: &WeightedFrame<f64>, theta: f64) -> Vec<Submodule<f64>> {
        let g = givens(2, 0, 1, theta);
        frame
            .submodules()
            .iter()
            .map(|u| {
                let p = u.fiber_matrix(0);
                Submodule::from_fibers(
                    u.shape().clone(),
                    vec![FiberProjection::Matrix(g.matmul(&p).matmul(&g.adjoint()))],
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn distance_examples() {
        let s = plane();
        let u = line(&s, &[1.0, 0.0]);
        assert_eq!(proj_distance(&u, &u).unwrap(), 0.0);
        let v = line(&s, &[FRAC_PI_6.cos(), FRAC_PI_6.sin()]);
        assert!((proj_distance(&u, &v).unwrap() - 0.5).abs() < 1e-14);
        assert!((angle(&u, &v).unwrap() - FRAC_PI_6).abs() < 1e-14);
        let w = line(&s, &[0.0, 1.0]);
        assert_eq!(angle(&u, &w).unwrap(), FRAC_PI_2);
        assert_eq!(angle(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn non_orthogonal_pair_at_right_angle() {
        let s = ModuleShape::uniform(ScalarKind::Complex, 1, 8).unwrap();
        let e = |i: usize| {
            let mut v = vec![Complex::new(0.0, 0.0); 8];
            v[i] = Complex::new(1.0, 0.0);
            v
        };
        // e₄, e₈ and e₂, e₄, e₆, e₈ in 1-based numbering
        let u0 = Submodule::span(&s, &[vec![e(3), e(7)]]).unwrap();
        let v0 = Submodule::span(&s, &[vec![e(1), e(3), e(5), e(7)]]).unwrap();
        assert_eq!(proj_distance(&u0, &v0).unwrap(), 1.0);
        assert_eq!(angle(&u0, &v0).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn ecart_examples() {
        let s = plane();
        let u = line(&s, &[1.0, 0.0]);
        let v = line(&s, &[FRAC_PI_6.cos(), FRAC_PI_6.sin()]);
        let us = vec![u.clone(), u.clone()];
        let vs = vec![v.clone(), v];
        assert_eq!(ecart(&us, &us, &[1.0, 1.0]).unwrap(), 0.0);
        assert!((ecart(&us, &vs, &[1.0, 1.0]).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        // ‖ω_n‖ = 2 gives weights 4
        assert!((ecart(&us, &vs, &[4.0, 4.0]).unwrap() - 2.0 * 0.5f64.sqrt()).abs() < 1e-14);
        assert!(matches!(
            ecart(&us, &vs[..1], &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn ball_examples() {
        let f = three_lines();
        let center = f.submodules();
        let w = [1.0, 1.0, 1.0];
        assert!(ball_membership(center, 1e-9, center, &w).unwrap());
        assert!(!ball_membership(center, 0.0, center, &w).unwrap());
        assert!(ball_membership(center, 1.0, &rotated(&f, 0.3), &w).unwrap());
        assert!(ball_membership(center, -1.0, center, &w).is_err());
    }

    #[test]
    fn unperturbed_check() {
        let f = three_lines();
        let r = perturbation_check(&f, f.submodules(), Some(2.0)).unwrap();
        assert_eq!(r.ecart, 0.0);
        assert!(r.guaranteed && r.confirmed);
        assert!((r.observed.c - 1.0).abs() < 1e-12 && (r.observed.d - 2.0).abs() < 1e-12);
        assert!(r.criteria.weighted.holds && r.criteria.bounded_weight.holds);
        assert!(r.criteria.holder.unwrap().holds);
    }

    #[test]
    fn small_rotation_is_guaranteed() {
        let f = three_lines();
        let r = perturbation_check(&f, &rotated(&f, 0.3), Some(2.0)).unwrap();
        assert!((r.threshold - 1.0).abs() < 1e-12);
        assert!((r.ecart - 3f64.sqrt() * 0.3f64.sin()).abs() < 1e-12);
        assert!(r.guaranteed && r.confirmed && r.criteria_consistent);
        assert!((r.criteria.weighted.lhs - 0.27).abs() < 1e-12);
        assert!(r.criteria.weighted.holds);
        let h = r.criteria.holder.unwrap();
        assert!((h.lhs - 3.0 * 0.0081).abs() < 1e-12);
        assert!((h.rhs - 1.0 / 3.0).abs() < 1e-12);
        assert!(h.holds);
    }

    #[test]
    fn right_angle_rotation_is_not_guaranteed() {
        let f = three_lines();
        let r = perturbation_check(&f, &rotated(&f, FRAC_PI_2), None).unwrap();
        assert!((r.ecart - 3f64.sqrt()).abs() < 1e-12);
        assert!(!r.guaranteed && r.predicted_lower.is_none());
        assert!(r.confirmed);
        assert!(r.criteria.holder.is_none());
    }

    #[test]
    fn holder_exponent_validated() {
        let f = three_lines();
        assert!(angle_criteria(&f, f.submodules(), Some(1.0)).is_err());
    }

    #[test]
    fn budgeted_perturbations_stay_inside() {
        use rand::SeedableRng;
        let f = three_lines();
        let theta = budget_theta_max(&f, 0.9).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let ks = random_givens_perturbation(f.submodules(), theta, &mut rng);
            let r = perturbation_check(&f, &ks, None).unwrap();
            assert!(r.ecart <= 0.9 * r.threshold + 1e-12);
            assert!(r.guaranteed && r.confirmed);
        }
    }
}
