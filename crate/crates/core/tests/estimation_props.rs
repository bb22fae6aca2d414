use proptest::prelude::*;
use rad_core::estimation::{bernstein_bound, competitiveness_report, competitiveness_report_relative, estimate_from_counts, BoundMode};
use rad_core::rng;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bound_shrinks_with_more_data(p in 0.0f64..=1.0, k in 10usize..5000, pool in 10usize..100_000, delta in 0.001f64..0.5) {
        let base = bernstein_bound(p, pool, k, delta).unwrap();
        prop_assert!(base > 0.0);
        prop_assert!(bernstein_bound(p, pool, 2 * k, delta).unwrap() < base);
        prop_assert!(bernstein_bound(p, 2 * pool, k, delta).unwrap() < base);
        prop_assert!(bernstein_bound(p, pool, k, delta / 2.0).unwrap() > base);
    }

    #[test]
    fn conservative_bound_dominates_plug_in(wrong in 0usize..1000, extra in 0usize..1000, pool in 1usize..50_000) {
        let k = wrong + extra + 1;
        let plug = estimate_from_counts(wrong, k, pool, 0.05, BoundMode::PlugIn).unwrap();
        let cons = estimate_from_counts(wrong, k, pool, 0.05, BoundMode::Conservative).unwrap();
        prop_assert_eq!(plug.m_hat, cons.m_hat);
        prop_assert!(cons.bound >= plug.bound);
    }

    #[test]
    fn shrunk_budget_keeps_its_guarantee(
        gains in prop::collection::vec(0.05f64..1.0, 2..120),
        m_frac in 0.0f64..0.9,
        eps_frac in 0.0f64..1.0,
        dev in -1.0f64..1.0,
    ) {
        let n = gains.len();
        let m = (m_frac * n as f64).floor();
        let probe = competitiveness_report(&gains, m, m, 0.0).unwrap();
        let eps = eps_frac * probe.beta;
        let m_hat = m * (1.0 + dev * eps);
        let r = competitiveness_report(&gains, m, m_hat, eps).unwrap();
        prop_assert!(r.precondition_ok);
        prop_assert!(r.realized_ratio >= r.guaranteed_ratio, "{:?}", r);
    }

    #[test]
    fn relative_variant_scales_the_budget(gains in prop::collection::vec(0.05f64..1.0, 2..60), w in 0.0f64..1.0) {
        let n = gains.len() as f64;
        let m = ((n - 1.0) / (1.0 + w)).floor().min(n - 1.0);
        let r = competitiveness_report_relative(&gains, m, m, 0.0, w).unwrap();
        prop_assert_eq!(r.m_true, m * (1.0 + w));
        prop_assert_eq!(r.realized_ratio, 1.0);
    }
}

#[test]
fn bernstein_interval_covers_the_truth() {
    let (pool, k, delta, p) = (5_000usize, 500usize, 0.05, 0.3);
    let mut rng = rng::seeded(5);
    let trials = 2_000;
    let mut misses = 0;
    for _ in 0..trials {
        let m = (0..pool).filter(|_| rng.random::<f64>() < p).count();
        let wrong = (0..k).filter(|_| rng.random::<f64>() < p).count();
        let est = estimate_from_counts(wrong, k, pool, delta, BoundMode::PlugIn).unwrap();
        if ((m as f64 - est.m_hat) / pool as f64).abs() > est.bound {
            misses += 1;
        }
    }
    assert!((misses as f64 / trials as f64) <= delta);
}
