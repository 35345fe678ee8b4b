//! Property tests for the quadrature layer, driven by the family
//! integrands it exists to serve.

use isospec::{cumulative, integrate, spec_for, FamilyId, QuadConfig};
use proptest::prelude::*;

fn family(idx: usize) -> FamilyId<f64> {
    match idx {
        0 => FamilyId::Hermite,
        1 => FamilyId::Laguerre { alpha: 0.5 },
        2 => FamilyId::Legendre,
        3 => FamilyId::JacobiPolynomial {
            alpha: 0.5,
            beta: -0.25,
        },
        _ => FamilyId::JacobiFunction {
            alpha: 2.0,
            lambda: 1.5,
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn additivity_over_family_integrands(
        fam_idx in 0usize..5,
        n in 0u32..6,
        a in 0.05f64..0.45,
        b in 0.55f64..0.95,
    ) {
        let spec = spec_for(family(fam_idx)).unwrap();
        let (lo, hi) = spec.default_range();
        let xa = lo + (hi - lo) * a;
        let xb = lo + (hi - lo) * b;
        let cfg = QuadConfig::default();
        let f = |y: f64| spec.denom_integrand(n, y);
        let whole = integrate(f, xa, xb, &cfg).unwrap().value;
        let mid = 0.5 * (xa + xb);
        let split = integrate(f, xa, mid, &cfg).unwrap().value
            + integrate(f, mid, xb, &cfg).unwrap().value;
        let tol = 1e-10 * whole.abs().max(1.0);
        prop_assert!((whole - split).abs() <= tol, "{} vs {}", whole, split);
    }

    #[test]
    fn cumulative_monotone_for_nonnegative_integrands(
        fam_idx in 0usize..5,
        n in 0u32..6,
    ) {
        let spec = spec_for(family(fam_idx)).unwrap();
        let (lo, hi) = spec.default_range();
        let xs: Vec<f64> = (0..40).map(|i| lo + (hi - lo) * i as f64 / 39.0).collect();
        let out = cumulative(
            |y| spec.denom_integrand(n, y),
            xs[0],
            &xs,
            &QuadConfig::default(),
        )
        .unwrap();
        for w in out.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-13);
        }
    }

    #[test]
    fn cumulative_antisymmetric_for_even_integrands(shift in 0.0f64..3.0) {
        // the Hermite integrand is even and anchored at x0 = 0
        let spec = spec_for(FamilyId::<f64>::Hermite).unwrap();
        let xs = [-shift - 0.5, 0.0, shift + 0.5];
        let out = cumulative(
            |y| spec.denom_integrand(0, y),
            0.0,
            &xs,
            &QuadConfig::default(),
        )
        .unwrap();
        prop_assert!((out[0] + out[2]).abs() <= 1e-12);
        prop_assert!(out[1].abs() <= 1e-13);
    }
}
