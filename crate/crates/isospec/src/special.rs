//! Small special-function helpers needed for the gamma-bound constants.

use crate::scalar::{lit, Scalar};

/// Lanczos coefficients, g = 7, 9 terms.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive real argument.
///
/// Lanczos approximation, ~1e-14 relative accuracy in f64.
pub fn ln_gamma<S: Scalar>(z: S) -> S {
    let half = lit::<S>(0.5);
    let one = S::one();
    if z < half {
        // reflection: ln G(z) = ln(pi / sin(pi z)) - ln G(1 - z)
        let pi = lit::<S>(std::f64::consts::PI);
        return (pi / (pi * z).sin()).ln() - ln_gamma(one - z);
    }
    let z = z - one;
    let mut acc = lit::<S>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + lit::<S>(c) / (z + lit::<S>(i as f64));
    }
    let g = lit::<S>(7.5);
    let t = z + g;
    let ln_sqrt_2pi = lit::<S>(0.918_938_533_204_672_74); // ln sqrt(2 pi)
    ln_sqrt_2pi + (z + half) * t.ln() - t + acc.ln()
}

/// Gamma function for positive real argument.
pub fn gamma<S: Scalar>(z: S) -> S {
    ln_gamma(z).exp()
}
