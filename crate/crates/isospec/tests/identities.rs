//! Cross-module identity sweeps that sit outside the numbered acceptance
//! criteria: the classical ODE residual out to n = 10 and a full default
//! suite run.

use isospec::verify::{run_identity_at_points, SuiteConfig};
use isospec::{default_families, run_suite, spec_for, Identity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn classical_ode_residual_to_n_10() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for family in default_families::<f64>() {
        let spec = spec_for(family).unwrap();
        let (lo, hi) = spec.default_range();
        for n in 0..=10 {
            let mut pts: Vec<f64> = (0..100).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect();
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let r = run_identity_at_points(
                Identity::ClassicalOde,
                &family,
                n,
                None,
                &pts,
                1e-10,
            )
            .unwrap();
            assert!(
                r.pass,
                "{} n={n}: ODE residual {}",
                spec.name(),
                r.max_rel_residual
            );
        }
    }
}

#[test]
fn full_default_suite_passes() {
    let cfg = SuiteConfig {
        n_max: 4,
        grid_count: 160,
        random_points: 60,
        seed: 42,
        ..SuiteConfig::default()
    };
    let out = run_suite(&default_families::<f64>(), &cfg);
    let failures: Vec<String> = out
        .reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| {
            format!(
                "{} {} n={} gamma={:?}: rel={}",
                r.identity.name(),
                r.family.name(),
                r.n,
                r.gamma,
                r.max_rel_residual
            )
        })
        .collect();
    assert!(failures.is_empty(), "{:#?}", failures);
    assert!(!out.reports.is_empty());
}
