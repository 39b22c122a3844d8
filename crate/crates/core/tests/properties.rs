use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use cvdisc::chernoff::{bhattacharyya_global, s_overlap_global};
use cvdisc::gaussian::{williamson_numeric, williamson_symmetric, SymmetricTwoModeCM};
use cvdisc::local::{
    fidelity_heterodyne, heterodyne_epsilon, local_bounds, p_lower_local, s_overlap_heterodyne,
};
use cvdisc::report::DiscriminationReport;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn symmetric_williamson_agrees_with_numeric(mu in 1.0f64..200.0, frac in -1.0f64..1.0) {
        let cm = SymmetricTwoModeCM::separable(mu, frac * (mu - 1.0)).unwrap();
        let closed = williamson_symmetric(&cm).unwrap();
        let numeric = williamson_numeric(&cm.matrix()).unwrap();
        let scale = mu.max(1.0);
        prop_assert!((closed.nu_minus - numeric.nu_minus).abs() <= 1e-9 * scale);
        prop_assert!((closed.nu_plus - numeric.nu_plus).abs() <= 1e-9 * scale);
        prop_assert!(closed.nu_minus >= 1.0 && closed.nu_minus <= closed.nu_plus);
        prop_assert!(closed.reconstruction_residual(&cm.matrix()) <= 1e-10 * scale);
    }

    #[test]
    fn report_orderings_hold(mu in 1.0f64..1e4) {
        let r = DiscriminationReport::compute(mu).unwrap();
        prop_assert!(r.violations().is_empty(), "{:?}", r.violations());
        prop_assert!(r.delta >= 0.0);
    }

    #[test]
    fn overlaps_lie_in_unit_interval(mu in 1.0f64..1e3, s in 0.01f64..0.99) {
        let global = s_overlap_global(mu, s).unwrap();
        let local = s_overlap_heterodyne(mu, s).unwrap();
        prop_assert!(global > 0.0 && global <= 1.0 + 1e-12);
        prop_assert!(local > 0.0 && local <= 1.0 + 1e-12);
        prop_assert!(global <= local + 1e-12);
    }

    #[test]
    fn global_bounds_bracket(mu in 1.0f64..1e3) {
        let g = bhattacharyya_global(mu).unwrap();
        let l = local_bounds(mu).unwrap();
        prop_assert!(g.p_lower <= g.p_upper && g.p_upper <= l.p_upper + 1e-12);
        prop_assert!(l.p_lower <= l.p_upper);
    }
}

/// Monte-Carlo estimate of the averaged fidelity bound, sampling the steered
/// displacement directly.
#[test]
fn local_lower_bound_matches_monte_carlo() {
    const SAMPLES: usize = 1_000_000;
    let mu = 2.0;
    let eps = heterodyne_epsilon(mu).unwrap();
    let gain = eps / std::f64::consts::SQRT_2;
    let normal = Normal::new(0.0, (mu - 1.0 - eps).sqrt()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..SAMPLES {
        let d = [normal.sample(&mut rng), normal.sample(&mut rng)];
        let f = fidelity_heterodyne(mu, [d[0] / gain, d[1] / gain]).unwrap();
        let bound = 0.5 * (1.0 - (1.0 - f).sqrt());
        sum += bound;
        sum_sq += bound * bound;
    }
    let n = SAMPLES as f64;
    let mean = sum / n;
    let stderr = ((sum_sq / n - mean * mean) / n).sqrt();
    let exact = p_lower_local(mu).unwrap();
    assert!((mean - exact).abs() <= 3.0 * stderr, "mc {mean} +- {stderr}, quadrature {exact}");
}
