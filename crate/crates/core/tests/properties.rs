use cstar_fusion::perturbation::{budget_theta_max, random_givens_perturbation};
use cstar_fusion::{
    angle, ecart, proj_distance, quat_mul, AlgebraElement, FiberScalar, ModuleSequence, ModuleShape, ModuleVector,
    Quaternion, ScalarKind, Submodule,
};
use cstar_fusion::{oracle, sample};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn kind() -> impl Strategy<Value = ScalarKind> {
    prop_oneof![Just(ScalarKind::Complex), Just(ScalarKind::Quaternion)]
}

fn dist(a: &AlgebraElement<f64>, b: &AlgebraElement<f64>) -> f64 {
    a.try_sub(b).unwrap().norm()
}

fn reals(kind: ScalarKind, v: &[f64]) -> AlgebraElement<f64> {
    AlgebraElement::from_reals(kind, v).unwrap()
}

fn quat() -> impl Strategy<Value = Quaternion<f64>> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(|[w, x, y, z]| Quaternion::new(w, x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_is_submultiplicative_and_cstar(k in kind(), n in 1usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = sample::algebra_element(k, n, 3.0, &mut r);
        let b = sample::algebra_element(k, n, 3.0, &mut r);
        let ab = a.try_mul(&b).unwrap().norm();
        prop_assert!(ab <= a.norm() * b.norm() * (1.0 + 1e-12));
        let ss = a.star().try_mul(&a).unwrap().norm();
        prop_assert!((ss - a.norm() * a.norm()).abs() <= 1e-12 * ss.max(1.0));
    }

    #[test]
    fn sqrt_squares_back(k in kind(), n in 1usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = sample::algebra_element(k, n, 2.0, &mut r);
        let a = b.star().try_mul(&b).unwrap();
        let s = a.sqrt_positive().unwrap();
        prop_assert!(dist(&s.try_mul(&s).unwrap(), &a) <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn central_multipliers_are_increasing(
        k in kind(),
        rows in prop::collection::vec((0.1f64..5.0, -5.0f64..5.0, 0.0f64..5.0), 1..6),
    ) {
        let mu = reals(k, &rows.iter().map(|r| r.0).collect::<Vec<_>>());
        let a = reals(k, &rows.iter().map(|r| r.1).collect::<Vec<_>>());
        let b = reals(k, &rows.iter().map(|r| r.1 + r.2).collect::<Vec<_>>());
        prop_assert!(a.order_leq(&b, 1e-12).unwrap());
        let (ma, mb) = (mu.try_mul(&a).unwrap(), mu.try_mul(&b).unwrap());
        prop_assert!(ma.order_leq(&mb, 1e-12 * mb.norm().max(1.0)).unwrap());
    }

    #[test]
    fn multiplier_norm_sandwich(k in kind(), mu in prop::collection::vec(0.05f64..8.0, 1..6), seed in any::<u64>()) {
        let mu = reals(k, &mu);
        let a = sample::algebra_element(k, mu.len(), 4.0, &mut rng(seed));
        let lower = 1.0 / mu.invert().unwrap().norm();
        let mid = mu.try_mul(&a).unwrap().norm();
        prop_assert!(lower * a.norm() <= mid * (1.0 + 1e-12));
        prop_assert!(mid <= mu.norm() * a.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn quaternion_product_laws(a in quat(), b in quat(), c in quat()) {
        let l = quat_mul(quat_mul(a, b), c);
        let r = quat_mul(a, quat_mul(b, c));
        let scale = a.norm() * b.norm() * c.norm();
        prop_assert!((l - r).norm() <= 1e-12 * scale.max(1.0));
        let ab = quat_mul(a, b).norm();
        prop_assert!((ab - a.norm() * b.norm()).abs() <= 1e-12 * ab.max(1.0));
    }

    #[test]
    fn cauchy_schwarz(k in kind(), n in 1usize..4, len in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(k, n, 4, &mut r);
        let xs = ModuleSequence::new((0..len).map(|_| sample::vector(&shape, 2.0, &mut r)).collect()).unwrap();
        let ys = ModuleSequence::new((0..len).map(|_| sample::vector(&shape, 2.0, &mut r)).collect()).unwrap();
        let xy = xs.inner_product(&ys).unwrap().norm();
        let xx = xs.inner_product(&xs).unwrap().norm();
        let yy = ys.inner_product(&ys).unwrap().norm();
        prop_assert!(xy * xy <= xx * yy * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn inner_product_is_conjugate_linear_on_the_right(k in kind(), n in 1usize..4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(k, n, 4, &mut r);
        let x = sample::vector(&shape, 2.0, &mut r);
        let y = sample::vector(&shape, 2.0, &mut r);
        let a = sample::algebra_element(k, n, 2.0, &mut r);
        let lhs = x.inner_product(&y.left_action(&a).unwrap()).unwrap();
        let rhs = x.inner_product(&y).unwrap().try_mul(&a.star()).unwrap();
        prop_assert!(dist(&lhs, &rhs) <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn module_action_norm_sandwich(k in kind(), n in 1usize..4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(k, n, 4, &mut r);
        let x = sample::vector(&shape, 2.0, &mut r);
        let a = sample::algebra_element(k, n, 2.0, &mut r);
        prop_assert!(x.left_action(&a).unwrap().module_norm() <= a.norm() * x.module_norm() * (1.0 + 1e-12));
        let mu = reals(k, &(0..n).map(|_| rand::Rng::random_range(&mut r, 0.1..4.0)).collect::<Vec<_>>());
        let lower = 1.0 / mu.invert().unwrap().norm();
        prop_assert!(lower * x.module_norm() <= x.left_action(&mu).unwrap().module_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn projection_splits_the_module(k in kind(), n in 1usize..4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(k, n, 5, &mut r);
        let u = sample::submodule(&shape, &mut r);
        let (x, y) = (sample::vector(&shape, 2.0, &mut r), sample::vector(&shape, 2.0, &mut r));
        let uc = u.complement();
        let sum = u.project(&x).unwrap().try_add(&uc.project(&x).unwrap()).unwrap();
        prop_assert!(sum.try_sub(&x).unwrap().module_norm() <= 1e-12 * x.module_norm().max(1.0));
        let cross = u.project(&x).unwrap().inner_product(&uc.project(&y).unwrap()).unwrap();
        prop_assert!(cross.norm() <= 1e-12 * (x.module_norm() * y.module_norm()).max(1.0));
        let a = match k {
            ScalarKind::Complex => sample::algebra_element(k, n, 2.0, &mut r),
            ScalarKind::Quaternion => reals(k, &(0..n).map(|_| rand::Rng::random_range(&mut r, -2.0..2.0)).collect::<Vec<_>>()),
        };
        let lhs = u.project(&x.left_action(&a).unwrap()).unwrap();
        let rhs = u.project(&x).unwrap().left_action(&a).unwrap();
        prop_assert!(lhs.try_sub(&rhs).unwrap().module_norm() <= 1e-12 * x.module_norm().max(1.0) * a.norm().max(1.0));
    }

    #[test]
    fn analysis_equals_adjoint_of_synthesis(k in kind(), n in 1usize..4, count in 1usize..7, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(k, n, 4, &mut r);
        let f = sample::frame(&shape, count.max(2), 1e4, &mut r);
        let x = sample::vector(&shape, 2.0, &mut r);
        let sx = f.frame_operator().apply(&x).unwrap();
        let tt = f.synthesis_adjoint(&f.synthesis(&x).unwrap()).unwrap();
        prop_assert!(sx.try_sub(&tt).unwrap().module_norm() <= 1e-12 * x.module_norm().max(1.0) * f.bounds().d.max(1.0));

        let b = f.bounds();
        prop_assert!(f.synthesis(&x).unwrap().norm() <= b.upper.norm() * x.module_norm() * (1.0 + 1e-12));
        let mid = f.frame_energy(&x).unwrap();
        let x2 = x.abs_sq();
        let tol = 1e-10 * x.module_norm().max(1.0).powi(2) * b.d.max(1.0);
        prop_assert!(b.lower.try_mul(&b.lower).unwrap().try_mul(&x2).unwrap().order_leq(&mid, tol).unwrap());
        prop_assert!(mid.order_leq(&b.upper.try_mul(&b.upper).unwrap().try_mul(&x2).unwrap(), tol).unwrap());
    }

    #[test]
    fn reconstruction_recovers_input(n in 1usize..4, count in 2usize..9, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(ScalarKind::Complex, n, 6, &mut r);
        let f = sample::frame(&shape, count, 1e6, &mut r);
        let x = sample::vector(&shape, 1.0, &mut r);
        let rec = f.reconstruct(&x).unwrap();
        let err = rec.xhat.try_sub(&x).unwrap().module_norm() / x.module_norm().max(1e-300);
        prop_assert!(err <= 1e-10, "relative error {err}");
    }

    #[test]
    fn transport_round_trips(k in kind(), n in 1usize..4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(k, n, 4, &mut r);
        let f = sample::frame(&shape, 4, 1e4, &mut r);
        let psi = sample::ortho_map(&shape, 0.3, 3.0, &mut r);
        let t = psi.transport_frame(&f).unwrap();
        for u in t.frame.submodules() {
            prop_assert!(u.validate_projection(1e-12));
        }
        let back = psi.inverse().transport_frame(&t.frame).unwrap();
        for (a, b) in back.frame.submodules().iter().zip(f.submodules()) {
            prop_assert!(proj_distance(a, b).unwrap() <= 1e-10);
        }
        let (x, y) = (sample::vector(&shape, 1.0, &mut r), sample::vector(&shape, 1.0, &mut r));
        let lhs = psi.apply(&x).unwrap().inner_product(&psi.apply(&y).unwrap()).unwrap();
        let rhs = psi.nu().try_mul(&x.inner_product(&y).unwrap()).unwrap();
        prop_assert!(dist(&lhs, &rhs) <= 1e-12 * rhs.norm().max(1.0) * psi.nu().norm().max(1.0));
    }

    #[test]
    fn distance_axioms(n in 1usize..3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(ScalarKind::Complex, n, 5, &mut r);
        let (u, v, w) = (sample::submodule(&shape, &mut r), sample::submodule(&shape, &mut r), sample::submodule(&shape, &mut r));
        let duv = proj_distance(&u, &v).unwrap();
        prop_assert!((0.0..=1.0).contains(&duv));
        prop_assert!((duv - proj_distance(&v, &u).unwrap()).abs() <= 1e-12);
        prop_assert!(duv <= proj_distance(&u, &w).unwrap() + proj_distance(&w, &v).unwrap() + 1e-12);
        prop_assert_eq!(proj_distance(&u, &u).unwrap(), 0.0);
        if duv < 1e-12 {
            for k in 0..n {
                prop_assert!(u.fiber_matrix(k).sub(&v.fiber_matrix(k)).frobenius_norm() <= 1e-10);
            }
        }
        let a = angle(&u, &v).unwrap();
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&a));
    }

    #[test]
    fn ecart_is_symmetric_and_subadditive(len in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(ScalarKind::Complex, 2, 4, &mut r);
        let mut seq = || (0..len).map(|_| sample::submodule(&shape, &mut r)).collect::<Vec<Submodule<f64>>>();
        let (a, b, c) = (seq(), seq(), seq());
        let w: Vec<f64> = (0..len).map(|i| 0.5 + i as f64).collect();
        let ab = ecart(&a, &b, &w).unwrap();
        prop_assert!((ab - ecart(&b, &a, &w).unwrap()).abs() <= 1e-12);
        prop_assert!(ab <= ecart(&a, &c, &w).unwrap() + ecart(&c, &b, &w).unwrap() + 1e-12);
    }

    #[test]
    fn perturbation_ball_is_open(k in 1usize..3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(ScalarKind::Complex, k, 4, &mut r);
        let f = sample::frame(&shape, 5, 1e3, &mut r);
        let theta = budget_theta_max(&f, 0.99).unwrap();
        let thr = f.bounds().lower_inverse_norm_inv();
        for _ in 0..5 {
            let ks = random_givens_perturbation(f.submodules(), theta, &mut r);
            let e = ecart(f.submodules(), &ks, &f.weights().ecart_weights()).unwrap();
            prop_assert!(e < thr);
            prop_assert!(f.with_submodules(ks).unwrap().is_frame());
        }
    }

    #[test]
    fn dense_oracle_agrees(k in kind(), n in 1usize..4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = sample::shape(k, n, 5, &mut r);
        let f = sample::frame(&shape, 5, 1e5, &mut r);
        prop_assert!(oracle::spectral_deviation(&f).unwrap() <= 1e-10);
    }

    #[test]
    fn quaternion_blocks_keep_modulus(q in quat()) {
        let sv = oracle::quaternion_block(q).singular_values();
        prop_assert!((sv[0] - q.norm()).abs() <= 1e-12 * q.norm().max(1.0));
        prop_assert!((sv[1] - q.norm()).abs() <= 1e-12 * q.norm().max(1.0));
    }
}

#[test]
fn mixed_kinds_are_rejected() {
    let c = AlgebraElement::new(vec![FiberScalar::complex(1.0, 0.0)]).unwrap();
    let q = AlgebraElement::new(vec![FiberScalar::quaternion(1.0, 0.0, 0.0, 0.0)]).unwrap();
    assert!(c.try_mul(&q).is_err());
    let shape = ModuleShape::uniform(ScalarKind::Complex, 1, 2).unwrap();
    let x = ModuleVector::zeros(&shape);
    assert!(x.left_action(&q).is_err());
}
