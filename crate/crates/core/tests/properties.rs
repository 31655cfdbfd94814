mod common;

use alleedyn::equilibria::{boundary_equilibria, is_equilibrium, predator1_only, predator2_only};
use alleedyn::integrator::{integrate, IntegrationOpts};
use alleedyn::model::{jacobian, jacobian_fd, nondimensionalize, vector_field, RawParams, State};
use alleedyn::stability::{
    alpha1_star, alpha2_star_window, char_cubic, e5_jacobian, eigenvalues, ZERO_TOL,
};
use common::{params, rel_err, states};
use num_complex::Complex64;
use proptest::prelude::*;

fn raw() -> impl Strategy<Value = RawParams> {
    (
        (
            0.1..5.0f64,
            1.0..50.0f64,
            0.1..0.9f64,
            0.1..3.0f64,
            0.1..3.0f64,
            0.001..0.5f64,
        ),
        (
            0.1..5.0f64,
            0.1..5.0f64,
            0.1..5.0f64,
            0.1..5.0f64,
            0.01..1.0f64,
            0.01..1.0f64,
        ),
    )
        .prop_map(
            |((r, k, mf, c1, c2, th), (s1, s2, a1, a2, b1, b2))| RawParams {
                r,
                k,
                m_dim: mf * k,
                c1,
                c2,
                theta_dim: th,
                s1_dim: s1,
                s2_dim: s2,
                alpha1_dim: a1,
                alpha2_dim: a2,
                beta1_dim: b1,
                beta2_dim: b2,
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jacobian_matches_finite_differences(p in params(), s in states()) {
        let j = jacobian(&p, &s);
        let fd = jacobian_fd(&p, &s, 1e-5).unwrap();
        let mut diff = 0.0f64;
        for r in 0..3 {
            for c in 0..3 {
                diff = diff.max((j[(r, c)] - fd[(r, c)]).abs());
            }
        }
        prop_assert!(diff <= 1e-5 * j.max_abs().max(1e-3), "diff {diff:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rescaling_divides_by_the_documented_units(raw in raw(), factor in 0.5..4.0f64) {
        let p = nondimensionalize(&raw).unwrap();
        prop_assert!(rel_err(p.m, raw.m_dim / raw.k) < 1e-15);
        prop_assert!(rel_err(p.s1, raw.s1_dim / (raw.r * raw.k)) < 1e-15);
        // Rescaling all rates by the same factor as r leaves the model unchanged.
        let mut scaled = raw;
        scaled.r *= factor;
        scaled.s1_dim *= factor;
        scaled.s2_dim *= factor;
        scaled.alpha1_dim *= factor;
        scaled.alpha2_dim *= factor;
        let q = nondimensionalize(&scaled).unwrap();
        for ((_, a), (_, b)) in p.fields().iter().zip(q.fields()) {
            prop_assert!(rel_err(*a, b) < 1e-12);
        }
    }

    #[test]
    fn species_free_planes_are_invariant(p in params(), s in states(), axis in 0usize..3) {
        let mut a = s.to_array();
        a[axis] = 0.0;
        let init = State::from_array(a);
        prop_assert_eq!(vector_field(&p, &init)[axis], 0.0);
        let t = integrate(&p, &init, &IntegrationOpts::rk4(1e-2, 5.0)).unwrap();
        prop_assert!(t.states.iter().all(|s| s.to_array()[axis] == 0.0));
    }

    #[test]
    fn spectrum_matches_cubic_coefficients(p in params(), s in states()) {
        let c = char_cubic(&jacobian(&p, &s));
        let e = eigenvalues(&c, ZERO_TOL);
        let sum: Complex64 = e.iter().sum();
        let prod: Complex64 = e.iter().product();
        let scale = c.scale();
        prop_assert!((sum.re + c.a2).abs() <= 1e-9 * scale && sum.im.abs() <= 1e-9 * scale);
        prop_assert!((prod.re + c.a0).abs() <= 1e-9 * scale.powi(3) && prod.im.abs() <= 1e-9 * scale.powi(3));
    }

    #[test]
    fn prey_only_and_allee_spectra(p in params()) {
        let b = boundary_equilibria(&p);
        let spec = |pt: &State| {
            let mut re: Vec<f64> = eigenvalues(&char_cubic(&jacobian(&p, pt)), ZERO_TOL).iter().map(|z| z.re).collect();
            re.sort_by(f64::total_cmp);
            re
        };
        let sorted = |mut v: Vec<f64>| { v.sort_by(f64::total_cmp); v };
        let e1 = sorted(vec![p.m - 1.0, p.alpha1 / (1.0 + p.theta) - p.s1, p.alpha2 - p.s2]);
        let e2 = sorted(vec![p.m - p.m * p.m, p.alpha1 * p.m / (1.0 + p.theta * p.m) - p.s1, p.alpha2 * p.m - p.s2]);
        for (a, b) in spec(&b.e1.point).iter().zip(&e1) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        for (a, b) in spec(&b.e2.point).iter().zip(&e2) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!(p.m - p.m * p.m > 0.0);
    }

    #[test]
    fn boundary_points_are_equilibria(p in params()) {
        prop_assert!(is_equilibrium(&p, &predator2_only(&p).point));
        if let Ok(e4) = predator1_only(&p) {
            prop_assert!(is_equilibrium(&p, &e4.point));
        }
    }

    #[test]
    fn alpha1_star_zeroes_determinant(base in (0.1..2.0f64, 0.02..0.48f64), u in 0.01..0.99f64) {
        let (beta1, frac) = base;
        let s1 = frac * beta1;
        let (lo, hi) = alpha2_star_window(s1, beta1).unwrap();
        let a2 = lo + u * (hi - lo);
        if let Ok(a1) = alpha1_star(s1, beta1, a2) {
            let j = e5_jacobian(s1, beta1, a2, a1);
            prop_assert!(j.det().abs() < 1e-10 * j.max_abs().max(1.0).powi(3));
        }
    }
}

#[test]
fn rk4_and_rk45_agree_on_reference_setups() {
    use alleedyn::presets::*;
    for (p, init) in [
        (PREY_ONLY_ATTRACTOR, PREY_ONLY_INIT),
        (PREDATOR2_ATTRACTOR, PREDATOR2_INIT),
    ] {
        let a = integrate(&p, &init, &IntegrationOpts::rk4(1e-2, 2000.0))
            .unwrap()
            .last();
        let b = integrate(&p, &init, &IntegrationOpts::rk45(2000.0))
            .unwrap()
            .last();
        assert!(a.dist_inf(&b) < 1e-6, "{a} vs {b}");
    }
}
