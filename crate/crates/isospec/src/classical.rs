//! Evaluation of the seven classical special-function families together with
//! their first two derivatives.
//!
//! Polynomial families run their three-term recurrences simultaneously for
//! (value, d1, d2), so the derivatives are independent of the defining ODE
//! and the ODE residual stays an honest consistency oracle. Bessel J_n uses
//! the ascending series for x < n + 2 and Miller backward recurrence with
//! sum normalization otherwise; derivatives come from the neighbour-order
//! relations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{idx, lit, Scalar};

/// One of the seven supported Sturm-Liouville families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyId<S> {
    Hermite,
    Laguerre { alpha: S },
    Legendre,
    Chebyshev,
    JacobiFunction { alpha: S, lambda: S },
    JacobiPolynomial { alpha: S, beta: S },
    Bessel,
}

impl<S: Scalar> FamilyId<S> {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyId::Hermite => "hermite",
            FamilyId::Laguerre { .. } => "laguerre",
            FamilyId::Legendre => "legendre",
            FamilyId::Chebyshev => "chebyshev",
            FamilyId::JacobiFunction { .. } => "jacobi-function",
            FamilyId::JacobiPolynomial { .. } => "jacobi-polynomial",
            FamilyId::Bessel => "bessel",
        }
    }

    /// Check the parameter constraints for this family.
    #[allow(clippy::collapsible_match)] // keep the three parameter arms uniform
    pub fn validate(&self) -> Result<()> {
        let neg_one = -S::one();
        match *self {
            FamilyId::Laguerre { alpha } => {
                if !(alpha > neg_one) || !alpha.is_finite() {
                    return Err(Error::Parameter(format!(
                        "laguerre requires alpha > -1, got {:?}",
                        alpha
                    )));
                }
            }
            FamilyId::JacobiPolynomial { alpha, beta } => {
                if !(alpha > neg_one && beta > neg_one) || !alpha.is_finite() || !beta.is_finite()
                {
                    return Err(Error::Parameter(format!(
                        "jacobi-polynomial requires alpha > -1 and beta > -1, got ({:?}, {:?})",
                        alpha, beta
                    )));
                }
            }
            FamilyId::JacobiFunction { alpha, lambda } => {
                // alpha > -1 keeps every recurrence denominator 2m+alpha+1
                // positive; lambda > 0 keeps the hypergeometric parameter c
                // away from non-positive integers.
                if !(alpha > neg_one && lambda > S::zero())
                    || !alpha.is_finite()
                    || !lambda.is_finite()
                {
                    return Err(Error::Parameter(format!(
                        "jacobi-function requires alpha > -1 and lambda > 0, got ({:?}, {:?})",
                        alpha, lambda
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn check_domain(&self, x: S) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::Domain {
                family: self.name(),
                x: x.to_f64().unwrap_or(f64::NAN),
            });
        }
        let inside = match self {
            FamilyId::Hermite => true,
            FamilyId::Laguerre { .. } | FamilyId::Bessel => x > S::zero(),
            // closed-interval evaluation is fine for polynomials
            FamilyId::Legendre | FamilyId::Chebyshev | FamilyId::JacobiPolynomial { .. } => {
                x.abs() <= S::one()
            }
            FamilyId::JacobiFunction { .. } => x >= S::zero() && x <= S::one(),
        };
        if inside {
            Ok(())
        } else {
            Err(Error::Domain {
                family: self.name(),
                x: x.to_f64().unwrap_or(f64::NAN),
            })
        }
    }
}

/// psi_n(x) with two derivatives.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalEval<S> {
    pub x: S,
    pub n: u32,
    pub value: S,
    pub d1: S,
    pub d2: S,
}

/// Evaluate psi_n, psi_n', psi_n'' for the given family.
///
/// ```
/// use isospec::{eval_classical, FamilyId};
///
/// // H_1(x) = 2x
/// let e = eval_classical(&FamilyId::<f64>::Hermite, 1, 0.5).unwrap();
/// assert_eq!(e.value, 1.0);
/// assert_eq!(e.d1, 2.0);
/// ```
pub fn eval_classical<S: Scalar>(family: &FamilyId<S>, n: u32, x: S) -> Result<ClassicalEval<S>> {
    family.validate()?;
    family.check_domain(x)?;
    let (value, d1, d2) = match *family {
        FamilyId::Hermite => hermite_rows(n, x),
        FamilyId::Laguerre { alpha } => laguerre_rows(n, alpha, x),
        FamilyId::Legendre => legendre_rows(n, x),
        FamilyId::Chebyshev => chebyshev_rows(n, x),
        FamilyId::JacobiFunction { alpha, lambda } => jacobi_function_rows(n, alpha, lambda, x),
        FamilyId::JacobiPolynomial { alpha, beta } => jacobi_polynomial_rows(n, alpha, beta, x),
        FamilyId::Bessel => bessel_rows(n, x),
    };
    Ok(ClassicalEval {
        x,
        n,
        value,
        d1,
        d2,
    })
}

/// One step of p_{k+1} = (a x + b) p_k - c p_{k-1}, carried for three rows.
#[inline]
fn recurrence_step<S: Scalar>(
    a: S,
    b: S,
    c: S,
    x: S,
    prev: (S, S, S),
    cur: (S, S, S),
) -> (S, S, S) {
    let m = a * x + b;
    let two = lit::<S>(2.0);
    (
        m * cur.0 - c * prev.0,
        m * cur.1 + a * cur.0 - c * prev.1,
        m * cur.2 + two * a * cur.1 - c * prev.2,
    )
}

fn run_recurrence<S: Scalar>(
    n: u32,
    x: S,
    p0: (S, S, S),
    p1: (S, S, S),
    coeffs: impl Fn(u32) -> (S, S, S),
) -> (S, S, S) {
    if n == 0 {
        return p0;
    }
    let (mut prev, mut cur) = (p0, p1);
    for k in 1..n {
        let (a, b, c) = coeffs(k);
        let next = recurrence_step(a, b, c, x, prev, cur);
        prev = cur;
        cur = next;
    }
    cur
}

fn hermite_rows<S: Scalar>(n: u32, x: S) -> (S, S, S) {
    let two = lit::<S>(2.0);
    run_recurrence(
        n,
        x,
        (S::one(), S::zero(), S::zero()),
        (two * x, two, S::zero()),
        |k| (two, S::zero(), two * idx(k)),
    )
}

fn laguerre_rows<S: Scalar>(n: u32, alpha: S, x: S) -> (S, S, S) {
    let one = S::one();
    run_recurrence(
        n,
        x,
        (one, S::zero(), S::zero()),
        (one + alpha - x, -one, S::zero()),
        |k| {
            let kf = idx::<S>(k);
            let kp1 = kf + one;
            (
                -one / kp1,
                (lit::<S>(2.0) * kf + one + alpha) / kp1,
                (kf + alpha) / kp1,
            )
        },
    )
}

fn legendre_rows<S: Scalar>(n: u32, x: S) -> (S, S, S) {
    let one = S::one();
    run_recurrence(
        n,
        x,
        (one, S::zero(), S::zero()),
        (x, one, S::zero()),
        |k| {
            let kf = idx::<S>(k);
            let kp1 = kf + one;
            ((lit::<S>(2.0) * kf + one) / kp1, S::zero(), kf / kp1)
        },
    )
}

fn chebyshev_rows<S: Scalar>(n: u32, x: S) -> (S, S, S) {
    let two = lit::<S>(2.0);
    run_recurrence(
        n,
        x,
        (S::one(), S::zero(), S::zero()),
        (x, S::one(), S::zero()),
        |_| (two, S::zero(), S::one()),
    )
}

fn jacobi_polynomial_rows<S: Scalar>(n: u32, alpha: S, beta: S, x: S) -> (S, S, S) {
    let one = S::one();
    let two = lit::<S>(2.0);
    let half = lit::<S>(0.5);
    run_recurrence(
        n,
        x,
        (one, S::zero(), S::zero()),
        (
            half * (alpha + beta + two) * x + half * (alpha - beta),
            half * (alpha + beta + two),
            S::zero(),
        ),
        |k| {
            let kf = idx::<S>(k);
            let s = two * kf + alpha + beta;
            let denom = two * (kf + one) * (kf + alpha + beta + one) * s;
            (
                (s + one) * s * (s + two) / denom,
                (s + one) * (alpha * alpha - beta * beta) / denom,
                two * (kf + alpha) * (kf + beta) * (s + two) / denom,
            )
        },
    )
}

/// f_n = 2F1(-n, n + alpha; lambda; x), normalized so f_n(0) = 1.
///
/// Three-term recurrence obtained by eliminating f' between the family's
/// raising and lowering relations.
fn jacobi_function_rows<S: Scalar>(n: u32, alpha: S, lambda: S, x: S) -> (S, S, S) {
    let one = S::one();
    run_recurrence(
        n,
        x,
        (one, S::zero(), S::zero()),
        (one - (one + alpha) * x / lambda, -(one + alpha) / lambda, S::zero()),
        |m| {
            let mf = idx::<S>(m);
            let rho = (mf + alpha) * (mf + lambda) / (lit::<S>(2.0) * mf + alpha + one);
            let sigma =
                mf * (mf + alpha - lambda) / (lit::<S>(2.0) * mf + alpha - one);
            let s_m = (mf + lambda) / (lit::<S>(2.0) * mf + alpha + one);
            let t_m = (mf + alpha - lambda) / (lit::<S>(2.0) * mf + alpha - one);
            (
                -(lit::<S>(2.0) * mf + alpha) / rho,
                ((mf + alpha) * s_m + mf * t_m) / rho,
                sigma / rho,
            )
        },
    )
}

fn bessel_rows<S: Scalar>(n: u32, x: S) -> (S, S, S) {
    let vals = bessel_j_array(n + 2, x);
    let j = |k: i64| -> S {
        // J_{-k} = (-1)^k J_k
        if k >= 0 {
            vals[k as usize]
        } else if (-k) % 2 == 0 {
            vals[(-k) as usize]
        } else {
            -vals[(-k) as usize]
        }
    };
    let ni = n as i64;
    let value = j(ni);
    let d1 = if n == 0 {
        -vals[1]
    } else {
        (j(ni - 1) - j(ni + 1)) * lit::<S>(0.5)
    };
    let d2 = (j(ni - 2) - lit::<S>(2.0) * j(ni) + j(ni + 2)) * lit::<S>(0.25);
    (value, d1, d2)
}

/// All of J_0(x) .. J_{n_max}(x).
///
/// Per order: ascending series when x < k + 2, otherwise the shared Miller
/// backward-recurrence array; the crossover keeps series cancellation mild
/// while Miller covers the oscillatory regime.
fn bessel_j_array<S: Scalar>(n_max: u32, x: S) -> Vec<S> {
    let miller = if x >= lit::<S>(2.0) {
        Some(miller_array(n_max, x))
    } else {
        None
    };
    (0..=n_max)
        .map(|k| {
            if x < idx::<S>(k) + lit::<S>(2.0) {
                bessel_j_series(k, x)
            } else {
                miller.as_ref().expect("x >= k + 2 implies x >= 2")[k as usize]
            }
        })
        .collect()
}

fn bessel_j_series<S: Scalar>(n: u32, x: S) -> S {
    let half_x = x * lit::<S>(0.5);
    // first term (x/2)^n / n!
    let mut term = S::one();
    for k in 1..=n {
        term = term * half_x / idx::<S>(k);
    }
    let q = half_x * half_x;
    let mut sum = term;
    let mut j = 0u32;
    loop {
        j += 1;
        term = -term * q / (idx::<S>(j) * idx::<S>(n + j));
        let next = sum + term;
        if next == sum || j > 256 {
            return next;
        }
        sum = next;
    }
}

fn miller_array<S: Scalar>(n_max: u32, x: S) -> Vec<S> {
    let start = (n_max as usize).max(x.to_f64().unwrap_or(0.0).ceil() as usize) + 32;
    let mut vals = vec![S::zero(); start + 1];
    let rescale_at = lit::<S>(1e30);
    let rescale_by = lit::<S>(1e-30);

    let mut above = S::zero();
    let mut cur = lit::<S>(1e-30);
    vals[start] = cur;
    for k in (1..=start).rev() {
        let below = lit::<S>(2.0) * idx::<S>(k as u32) / x * cur - above;
        vals[k - 1] = below;
        above = cur;
        cur = below;
        if cur.abs() > rescale_at {
            for v in vals[k - 1..].iter_mut() {
                *v = *v * rescale_by;
            }
            above = above * rescale_by;
            cur = cur * rescale_by;
        }
    }

    // J_0 + 2 (J_2 + J_4 + ...) = 1
    let mut norm = vals[0];
    let mut k = 2;
    while k <= start {
        norm = norm + lit::<S>(2.0) * vals[k];
        k += 2;
    }
    vals.truncate(n_max as usize + 1);
    for v in vals.iter_mut() {
        *v = *v / norm;
    }
    vals
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(f: &FamilyId<f64>, n: u32, x: f64) -> ClassicalEval<f64> {
        eval_classical(f, n, x).unwrap()
    }

    #[test]
    fn hermite_h1_is_2x() {
        let e = eval(&FamilyId::Hermite, 1, 0.5);
        assert_eq!(e.value, 1.0);
        assert_eq!(e.d1, 2.0);
        assert_eq!(e.d2, 0.0);
    }

    #[test]
    fn legendre_p0_is_constant() {
        for x in [-0.9, 0.0, 0.4, 1.0] {
            let e = eval(&FamilyId::Legendre, 0, x);
            assert_eq!(e.value, 1.0);
            assert_eq!(e.d1, 0.0);
        }
    }

    #[test]
    fn small_order_closed_forms() {
        let x = 0.37;
        // H_3 = 8x^3 - 12x
        let e = eval(&FamilyId::Hermite, 3, x);
        assert!((e.value - (8.0 * x.powi(3) - 12.0 * x)).abs() < 1e-13);
        assert!((e.d1 - (24.0 * x * x - 12.0)).abs() < 1e-12);
        assert!((e.d2 - 48.0 * x).abs() < 1e-12);
        // P_2 = (3x^2 - 1)/2
        let e = eval(&FamilyId::Legendre, 2, x);
        assert!((e.value - (1.5 * x * x - 0.5)).abs() < 1e-14);
        // T_3 = 4x^3 - 3x
        let e = eval(&FamilyId::Chebyshev, 3, x);
        assert!((e.value - (4.0 * x.powi(3) - 3.0 * x)).abs() < 1e-14);
        // L_2^a = x^2/2 - (a+2)x + (a+1)(a+2)/2 at a = 0.5
        let a = 0.5;
        let e = eval(&FamilyId::Laguerre { alpha: a }, 2, x);
        let want = 0.5 * x * x - (a + 2.0) * x + 0.5 * (a + 1.0) * (a + 2.0);
        assert!((e.value - want).abs() < 1e-13);
        // P_1^{(a,b)} = (a+b+2)x/2 + (a-b)/2
        let (a, b) = (0.5, -0.25);
        let e = eval(&FamilyId::JacobiPolynomial { alpha: a, beta: b }, 1, x);
        assert!((e.value - (0.5 * (a + b + 2.0) * x + 0.5 * (a - b))).abs() < 1e-14);
        // f_1 = 1 - (1+a)x/lam
        let (a, lam) = (2.0, 1.5);
        let e = eval(
            &FamilyId::JacobiFunction {
                alpha: a,
                lambda: lam,
            },
            1,
            x,
        );
        assert!((e.value - (1.0 - (1.0 + a) * x / lam)).abs() < 1e-14);
    }

    #[test]
    fn jacobi_function_matches_terminating_series() {
        // independent oracle: direct hypergeometric sum
        fn hyp_series(n: u32, a: f64, lam: f64, x: f64) -> f64 {
            let mut s = 1.0;
            let mut term = 1.0;
            for k in 0..n {
                let kf = k as f64;
                term *= (-(n as f64) + kf) * (n as f64 + a + kf) / ((lam + kf) * (kf + 1.0)) * x;
                s += term;
            }
            s
        }
        let (a, lam) = (2.0, 1.5);
        let fam = FamilyId::JacobiFunction {
            alpha: a,
            lambda: lam,
        };
        for n in 0..9 {
            for x in [0.05, 0.3, 0.55, 0.92] {
                let got = eval(&fam, n, x).value;
                let want = hyp_series(n, a, lam, x);
                assert!(
                    (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                    "n={n} x={x}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn bessel_j0_first_zero() {
        // oracle: independent ascending series + bisection
        fn j0_series(x: f64) -> f64 {
            let mut term = 1.0;
            let mut sum = 1.0;
            let q = 0.25 * x * x;
            for j in 1..200 {
                term *= -q / ((j * j) as f64);
                sum += term;
                if term.abs() < 1e-18 {
                    break;
                }
            }
            sum
        }
        let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if j0_series(lo) * j0_series(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let zero = 0.5 * (lo + hi);
        assert!((zero - 2.404_825_557_695_773).abs() < 1e-12);
        let e = eval(&FamilyId::Bessel, 0, zero);
        assert!(e.value.abs() < 1e-9);
    }

    #[test]
    fn bessel_reference_values() {
        // frozen from an independent multi-precision evaluation
        let cases = [
            (0, 1.0, 0.765_197_686_557_966_55),
            (1, 1.0, 0.440_050_585_744_933_52),
            (5, 2.0, 0.007_039_629_755_871_685_5),
            (2, 7.0, -0.301_417_220_085_940_12),
            (10, 8.0, 0.060_767_026_774_251_156),
            (0, 15.0, -0.014_224_472_826_780_773),
            (7, 22.0, 0.058_197_263_116_058_934),
        ];
        for (n, x, want) in cases {
            let e = eval(&FamilyId::Bessel, n, x);
            assert!(
                (e.value - want).abs() < 1e-13,
                "J_{n}({x}) = {} vs {want}",
                e.value
            );
        }
    }

    #[test]
    fn bessel_series_miller_crossover_consistency() {
        // both evaluation paths must agree at the handover argument
        for n in [3u32, 6, 11] {
            let x = n as f64 + 2.0;
            let series = bessel_j_series::<f64>(n, x);
            let miller = miller_array::<f64>(n, x)[n as usize];
            assert!(
                (series - miller).abs() < 1e-13,
                "n={n}: series {series} vs miller {miller}"
            );
        }
    }

    #[test]
    fn derivative_consistency_central_differences() {
        let h = 1e-5;
        let fams: [FamilyId<f64>; 7] = [
            FamilyId::Hermite,
            FamilyId::Laguerre { alpha: 0.5 },
            FamilyId::Legendre,
            FamilyId::Chebyshev,
            FamilyId::JacobiFunction {
                alpha: 2.0,
                lambda: 1.5,
            },
            FamilyId::JacobiPolynomial {
                alpha: 0.5,
                beta: -0.25,
            },
            FamilyId::Bessel,
        ];
        for fam in &fams {
            let xs: &[f64] = match fam {
                FamilyId::Hermite => &[-2.1, 0.3, 1.7],
                FamilyId::Laguerre { .. } | FamilyId::Bessel => &[0.4, 2.3, 7.1],
                FamilyId::JacobiFunction { .. } => &[0.2, 0.5, 0.8],
                _ => &[-0.7, 0.1, 0.6],
            };
            for n in [0u32, 1, 4, 9] {
                for &x in xs {
                    let e = eval(fam, n, x);
                    let fd = (eval(fam, n, x + h).value - eval(fam, n, x - h).value) / (2.0 * h);
                    let scale = e.d1.abs().max(1.0);
                    assert!(
                        (e.d1 - fd).abs() <= 1e-6 * scale,
                        "{} n={n} x={x}: d1={} fd={}",
                        fam.name(),
                        e.d1,
                        fd
                    );
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            eval_classical(&FamilyId::Laguerre { alpha: 0.0 }, 1, -1.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            eval_classical(&FamilyId::Bessel, 0, 0.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            eval_classical(&FamilyId::Legendre, 2, 1.5),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            eval_classical(&FamilyId::Hermite, 2, f64::NAN),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            eval_classical(&FamilyId::Laguerre { alpha: -1.0 }, 1, 1.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            eval_classical(
                &FamilyId::JacobiPolynomial {
                    alpha: -1.5,
                    beta: 0.0
                },
                1,
                0.0
            ),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            eval_classical(
                &FamilyId::JacobiFunction {
                    alpha: 1.0,
                    lambda: 0.0
                },
                1,
                0.5
            ),
            Err(Error::Parameter(_))
        ));
    }
}
