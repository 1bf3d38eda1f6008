use fris_covert::analytics::{
    cop_at_threshold, dbm_to_watts, fa_probability, gamma_moment_match, md_probability, outage_probability,
    ClosedForm, GammaFit, ScenarioConfig,
};
use fris_covert::montecarlo::EstimateWithCI;
use fris_covert::specfun::{bessel_j0, reg_lower_incomplete_gamma};
use fris_covert::surface::{correlation_matrix, reduce, PortSelection, SurfaceGeometry};
use proptest::prelude::*;

fn scenario() -> impl Strategy<Value = ScenarioConfig> {
    (-80.0..20.0f64, 0.0..3.0f64, 0.05..20.0f64, 0.01..0.99f64, 1.8..4.0f64).prop_map(|(p_dbm, r_b, mu, p0, alpha)| {
        let base = ScenarioConfig::default();
        ScenarioConfig {
            p_a: dbm_to_watts(p_dbm),
            r_b,
            mu_offset: mu * base.sigma2_w,
            p0,
            p1: 1.0 - p0,
            alpha,
            ..base
        }
    })
}

fn fit() -> impl Strategy<Value = GammaFit> {
    (0.05..200.0f64, 1e-3..1e3f64).prop_map(|(k, t)| GammaFit::new(k, t).unwrap())
}

proptest! {
    #[test]
    fn j0_is_even_and_bounded(x in -500.0..500.0f64) {
        let a = bessel_j0(x).unwrap();
        prop_assert!(a.abs() <= 1.0);
        prop_assert_eq!(a, bessel_j0(-x).unwrap());
    }

    #[test]
    fn incomplete_gamma_is_monotone(k in 0.05..150.0f64, x in 0.0..400.0f64, dx in 0.0..10.0f64) {
        let lo = reg_lower_incomplete_gamma(k, x).unwrap();
        let hi = reg_lower_incomplete_gamma(k, x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo - 1e-14);
    }

    #[test]
    fn metrics_are_probabilities(cfg in scenario(), fit in fit(), z in 0.0..5.0f64) {
        let zeta = z * cfg.sigma2_w;
        let md = md_probability(&fit, &cfg, zeta).unwrap();
        let fa = fa_probability(&cfg, zeta);
        let cop = cop_at_threshold(&fit, &cfg, zeta).unwrap();
        let op = outage_probability(&fit, &cfg).unwrap();
        for p in [md, fa, cop, op] {
            prop_assert!((0.0..=1.0).contains(&p));
        }
        let cf = ClosedForm::evaluate(&fit, &cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&cf.success));
        prop_assert!(cf.success <= 1.0 - cf.op + 1e-15);
    }

    #[test]
    fn fit_mean_equals_trace_of_square(m_x in 1usize..7, m_z in 1usize..7, w in 0.2..3.0f64, pick in 0.0..1.0f64) {
        let geom = SurfaceGeometry::new(m_x, m_z, w, w, 0.125).unwrap();
        let j = correlation_matrix(&geom).unwrap();
        let n = geom.len();
        let k = 1 + ((n - 1) as f64 * pick) as usize;
        let sel = PortSelection::new((0..n).step_by(n / k).take(k).collect()).unwrap();
        let jt = reduce(&j, &sel).unwrap();
        let fit = gamma_moment_match(&jt).unwrap();
        let tr2: f64 = jt.matrix().norm_squared();
        prop_assert!((fit.kappa * fit.theta - tr2).abs() <= 1e-9 * tr2);
    }

    #[test]
    fn wilson_interval_brackets_the_estimate(n in 1u64..1_000_000, frac in 0.0..=1.0f64) {
        let k = ((n as f64) * frac).floor() as u64;
        let e = EstimateWithCI::wilson(k, n);
        prop_assert!(e.ci_low <= e.value && e.value <= e.ci_high);
        prop_assert!(e.ci_low >= 0.0 && e.ci_high <= 1.0);
    }
}
