use mwright::fraccalc::{caputo_power, rl_derivative_power, rl_integral_power};
use mwright::gamma::gamma;
use mwright::ggbm::{covariance_matrix, sample_paths, CovSpec};
use mwright::greens::{green_density, GreenSpec};
use mwright::grid::GridFunction;
use mwright::specfun::{f_wright, m_wright, mittag_leffler_neg, AuxIndex};
use mwright::xform::m2;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn m_wright_is_nonnegative(nu in 0.0f64..0.98, r in 0.0f64..40.0) {
        let v = m_wright(AuxIndex::new(nu).unwrap(), r, 1e-15).unwrap().value;
        prop_assert!(v >= 0.0, "M_{nu}({r}) = {v}");
    }

    #[test]
    fn f_wright_is_nu_r_m(nu in 0.01f64..0.98, r in 0.0f64..20.0) {
        let idx = AuxIndex::new(nu).unwrap();
        let f = f_wright(idx, r, 1e-15).unwrap().value;
        let m = m_wright(idx, r, 1e-15).unwrap().value;
        prop_assert!((f - nu * r * m).abs() <= 1e-15 * (1.0 + f.abs()));
    }

    #[test]
    fn mittag_leffler_decreases_in_unit_interval(nu in 0.05f64..=1.0, s in 0.0f64..30.0, ds in 0.0f64..5.0) {
        let a = mittag_leffler_neg(nu, s, 1e-15).unwrap().value;
        let b = mittag_leffler_neg(nu, s + ds, 1e-15).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-14).contains(&a));
        prop_assert!(b <= a + 1e-13, "E_{nu}(-{s}) = {a} < E_{nu}(-{}) = {b}", s + ds);
    }

    #[test]
    fn integral_semigroup(a in 0.05f64..3.0, b in 0.05f64..3.0, g in 0.0f64..4.0, t in 0.1f64..5.0) {
        let lhs = rl_integral_power(b, g, 1.0).unwrap() * rl_integral_power(a, g + b, t).unwrap();
        let rhs = rl_integral_power(a + b, g, t).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn derivative_is_left_inverse(a in 0.05f64..3.0, g in 0.0f64..4.0, t in 0.1f64..5.0) {
        let lhs = rl_integral_power(a, g, 1.0).unwrap() * rl_derivative_power(a, g + a, t).unwrap();
        prop_assert!(rel(lhs, t.powf(g)) < 1e-12);
    }

    #[test]
    fn rl_caputo_gap_is_initial_value_term(mu in 0.05f64..0.95, c in -3.0f64..3.0, g in 0.1f64..3.0, t in 0.1f64..5.0) {
        prop_assume!(g.fract() != 0.0);
        let rl = c * rl_derivative_power(mu, 0.0, t).unwrap() + rl_derivative_power(mu, g, t).unwrap();
        let cap = c * caputo_power(mu, 0.0, t).unwrap() + caputo_power(mu, g, t).unwrap();
        let gap = c * t.powf(-mu) / gamma(1.0 - mu);
        prop_assert!((rl - cap - gap).abs() <= 1e-12 * (1.0 + rl.abs()));
    }

    #[test]
    fn two_variable_function_self_similar(nu in 0.05f64..0.95, x in 0.0f64..5.0, t in 0.1f64..4.0, lam in 0.2f64..5.0) {
        let idx = AuxIndex::new(nu).unwrap();
        let scaled = m2(idx, lam.powf(nu) * x, lam * t).unwrap();
        let base = m2(idx, x, t).unwrap();
        prop_assert!((scaled - lam.powf(-nu) * base).abs() <= 1e-12 * (1.0 + base));
    }

    #[test]
    fn green_is_even_and_self_similar(alpha in 0.1f64..2.0, beta in 0.1f64..1.0, x in 0.0f64..6.0, t in 0.1f64..5.0) {
        let spec = GreenSpec::new(alpha, beta, 1.0).unwrap();
        let g = green_density(spec, x, t).unwrap();
        prop_assert_eq!(g, green_density(spec, -x, t).unwrap());
        let s = t.powf(0.5 * alpha);
        let h = green_density(spec, x / s, 1.0).unwrap() / s;
        prop_assert!(rel(g, h) < 1e-12 || (g - h).abs() < 1e-300);
    }

    #[test]
    fn covariance_is_positive_definite(
        alpha in 0.05f64..1.95,
        beta in 0.05f64..=1.0,
        steps in prop::collection::vec(0.01f64..1.0, 1..12),
    ) {
        let times: Vec<f64> = steps.iter().scan(0.0, |acc, d| { *acc += d; Some(*acc) }).collect();
        let spec = CovSpec::new(alpha, beta, times).unwrap();
        prop_assert!(covariance_matrix(&spec).is_ok());
    }

    #[test]
    fn grid_csv_round_trip(ys in prop::collection::vec(-1e300f64..1e300, 2..40)) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64 * 0.1).collect();
        let g = GridFunction::new(xs, ys, "k=v").unwrap();
        prop_assert_eq!(GridFunction::from_csv(&g.to_csv(("x", "y"))).unwrap(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn same_seed_same_paths(seed in any::<u64>(), alpha in 0.1f64..1.9, beta in 0.1f64..=1.0) {
        let spec = CovSpec::uniform(alpha, beta, 1.0, 6).unwrap();
        let a = sample_paths(&spec, 50, seed).unwrap();
        let b = sample_paths(&spec, 50, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
