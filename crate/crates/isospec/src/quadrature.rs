//! Adaptive Gauss-Kronrod quadrature for the denominator integrals.
//!
//! A 15-point Kronrod rule over the embedded 7-point Gauss rule, refined by
//! global adaptive bisection. All abscissae are interior, so integrable
//! endpoint behaviour never gets sampled at the endpoint itself; endpoints
//! flagged as algebraically singular are additionally handled by the
//! substitution y = endpoint ± t^2, which removes square-root-type
//! singularities exactly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Positive 15-point Kronrod abscissae (symmetric rule, center first).
const KRONROD_NODES: [f64; 8] = [
    0.0,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.991_455_371_120_812_639_206_854_697_526_329,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.209_482_141_084_727_828_012_999_174_891_714,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.022_935_322_010_529_224_963_732_008_058_970,
];

/// Gauss weights for the nodes at even positions (0, 2, 4, 6) above.
const GAUSS_WEIGHTS: [f64; 4] = [
    0.417_959_183_673_469_387_755_102_040_816_327,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.129_484_966_168_869_693_270_611_432_679_082,
];

/// Result of one adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<S> {
    pub value: S,
    pub abs_error_estimate: S,
    pub evaluations: usize,
}

/// Tolerances and budget for the adaptive scheme.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig<S> {
    pub rel_tol: S,
    pub abs_tol: S,
    pub max_evaluations: usize,
}

impl<S: Scalar> Default for QuadConfig<S> {
    fn default() -> Self {
        // 1e-11 / 1e-13 in f64; wider scalar epsilons scale up accordingly
        let eps = S::epsilon().to_f64().unwrap_or(2.2e-16);
        let (rel, abs) = if eps <= 2.3e-16 {
            (1e-11, 1e-13)
        } else {
            (eps.powf(0.7), eps.powf(0.85))
        };
        QuadConfig {
            rel_tol: lit(rel),
            abs_tol: lit(abs),
            max_evaluations: 1_000_000,
        }
    }
}

struct Panel<S> {
    lo: S,
    hi: S,
    value: S,
    error: S,
}

impl<S: Scalar> PartialEq for Panel<S> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<S: Scalar> Eq for Panel<S> {}
impl<S: Scalar> PartialOrd for Panel<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for Panel<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        // errors are finite by construction
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn eval_panel<S: Scalar>(f: &dyn Fn(S) -> S, lo: S, hi: S) -> Result<(Panel<S>, usize)> {
    let half = (hi - lo) * lit::<S>(0.5);
    let mid = (lo + hi) * lit::<S>(0.5);
    let mut kronrod = S::zero();
    let mut gauss = S::zero();
    let mut evals = 0usize;

    let fc = f(mid);
    evals += 1;
    if !fc.is_finite() {
        return Err(Error::NonFinite {
            x: mid.to_f64().unwrap_or(f64::NAN),
        });
    }
    kronrod = kronrod + lit::<S>(KRONROD_WEIGHTS[0]) * fc;
    gauss = gauss + lit::<S>(GAUSS_WEIGHTS[0]) * fc;

    for i in 1..8 {
        let offset = half * lit::<S>(KRONROD_NODES[i]);
        let xl = mid - offset;
        let xr = mid + offset;
        let fl = f(xl);
        let fr = f(xr);
        evals += 2;
        if !fl.is_finite() {
            return Err(Error::NonFinite {
                x: xl.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !fr.is_finite() {
            return Err(Error::NonFinite {
                x: xr.to_f64().unwrap_or(f64::NAN),
            });
        }
        let pair = fl + fr;
        kronrod = kronrod + lit::<S>(KRONROD_WEIGHTS[i]) * pair;
        if i % 2 == 0 {
            gauss = gauss + lit::<S>(GAUSS_WEIGHTS[i / 2]) * pair;
        }
    }

    let value = half * kronrod;
    let error = (half * (kronrod - gauss)).abs();
    Ok((Panel {
        lo,
        hi,
        value,
        error,
    }, evals))
}

/// Adaptive integral of `f` over the finite interval `[lo, hi]`.
///
/// Satisfies `|value - I| <= max(abs_tol, rel_tol * |value|)` with high
/// confidence for integrands that are smooth away from the endpoints.
pub fn integrate<S: Scalar>(
    f: impl Fn(S) -> S,
    lo: S,
    hi: S,
    cfg: &QuadConfig<S>,
) -> Result<QuadResult<S>> {
    integrate_dyn(&f, lo, hi, cfg)
}

fn integrate_dyn<S: Scalar>(
    f: &dyn Fn(S) -> S,
    lo: S,
    hi: S,
    cfg: &QuadConfig<S>,
) -> Result<QuadResult<S>> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Parameter("integration limits must be finite".into()));
    }
    if lo > hi {
        return Err(Error::Parameter("integration limits out of order".into()));
    }
    if lo == hi {
        return Ok(QuadResult {
            value: S::zero(),
            abs_error_estimate: S::zero(),
            evaluations: 0,
        });
    }

    let (root, mut evaluations) = eval_panel(f, lo, hi)?;
    let mut heap = BinaryHeap::new();
    let mut total = root.value;
    let mut total_err = root.error;
    heap.push(root);

    let width_floor = (hi - lo).abs() * lit::<S>(1e-15) + lit::<S>(1e-300);

    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if evaluations >= cfg.max_evaluations {
            return Err(Error::Convergence {
                evaluations,
                error_estimate: total_err.to_f64().unwrap_or(f64::NAN),
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        if (worst.hi - worst.lo).abs() <= width_floor {
            // cannot refine further in this precision
            return Err(Error::Convergence {
                evaluations,
                error_estimate: total_err.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mid = (worst.lo + worst.hi) * lit::<S>(0.5);
        let (left, e1) = eval_panel(f, worst.lo, mid)?;
        let (right, e2) = eval_panel(f, mid, worst.hi)?;
        evaluations += e1 + e2;
        total = total + (left.value + right.value - worst.value);
        total_err = total_err + (left.error + right.error - worst.error);
        if total_err < S::zero() {
            total_err = S::zero();
        }
        heap.push(left);
        heap.push(right);
    }

    // re-accumulate the panel sums to shed drift from incremental updates
    let mut panels: Vec<&Panel<S>> = heap.iter().collect();
    panels.sort_by(|a, b| {
        a.value
            .abs()
            .partial_cmp(&b.value.abs())
            .unwrap_or(Ordering::Equal)
    });
    let mut value = S::zero();
    let mut err = S::zero();
    for p in panels {
        value = value + p.value;
        err = err + p.error;
    }

    Ok(QuadResult {
        value,
        abs_error_estimate: err,
        evaluations,
    })
}

/// int_0^width f(s) ds where f behaves like s^mu (mu > -1, integrable) at
/// s = 0 and is supplied as a function of the distance s from the endpoint.
///
/// Substituting s = t^m with m = max(2, 2/(1+mu)) turns the algebraic
/// factor into t^{m(1+mu)-1}, bounded and at least linear, so the adaptive
/// rule converges without chasing the singularity. Callers must supply f in
/// a form that does not reconstruct s by cancellation (e.g. (1 - y^2)
/// evaluated as s(2 - s) near y = -1); this is what keeps the transformed
/// integrand clean arbitrarily close to the endpoint.
pub fn integrate_power_endpoint<S: Scalar>(
    f: impl Fn(S) -> S,
    width: S,
    mu: S,
    cfg: &QuadConfig<S>,
) -> Result<QuadResult<S>> {
    let one = S::one();
    if !(mu > -one) {
        return Err(Error::Parameter(
            "endpoint exponent must exceed -1 for an integrable singularity".into(),
        ));
    }
    if !(width >= S::zero()) || !width.is_finite() {
        return Err(Error::Parameter("endpoint width must be finite and nonnegative".into()));
    }
    if width == S::zero() {
        return Ok(QuadResult {
            value: S::zero(),
            abs_error_estimate: S::zero(),
            evaluations: 0,
        });
    }
    let m = (lit::<S>(2.0) / (one + mu)).max(lit::<S>(2.0));
    // below this, s^mu can overflow while the true contribution ~ t^{>=1}
    // is negligible
    let s_floor = S::min_positive_value() * lit::<S>(1e8);
    let g = move |t: S| {
        let s = t.powf(m);
        if s < s_floor {
            return S::zero();
        }
        m * t.powf(m - one) * f(s)
    };
    integrate_dyn(&g, S::zero(), width.powf(one / m), cfg)
}

fn per_step_config<S: Scalar>(cfg: &QuadConfig<S>, steps: usize) -> QuadConfig<S> {
    QuadConfig {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol / lit::<S>(steps.max(1) as f64),
        max_evaluations: cfg.max_evaluations,
    }
}

/// Prefix integrals from a common origin over a sorted grid.
///
/// Returns the list of integrals from `x0` to each grid point, computed
/// incrementally so that the whole grid costs one pass of panel work. The
/// integrand must be well behaved at the origin; use
/// [`cumulative_from_singular_origin`] when x0 carries an algebraic
/// singularity.
pub fn cumulative<S: Scalar>(
    f: impl Fn(S) -> S,
    x0: S,
    xs: &[S],
    cfg: &QuadConfig<S>,
) -> Result<Vec<S>> {
    for w in xs.windows(2) {
        if w[0] > w[1] {
            return Err(Error::Parameter("cumulative grid must be sorted".into()));
        }
    }
    let per_step = per_step_config(cfg, xs.len());

    let mut out = vec![S::zero(); xs.len()];
    let split = xs.partition_point(|&x| x < x0);

    // points >= x0, ascending
    let mut acc = S::zero();
    let mut prev = x0;
    for i in split..xs.len() {
        let step = integrate_dyn(&f, prev, xs[i], &per_step)?;
        acc = acc + step.value;
        out[i] = acc;
        prev = xs[i];
    }

    // points < x0, descending from the origin
    let mut acc = S::zero();
    let mut prev = x0;
    for i in (0..split).rev() {
        let step = integrate_dyn(&f, xs[i], prev, &per_step)?;
        acc = acc - step.value;
        out[i] = acc;
        prev = xs[i];
    }

    Ok(out)
}

/// Prefix integrals from an origin where the integrand behaves like
/// (y - x0)^mu, for grids entirely above x0.
///
/// `f_offset` is the integrand as a function of the distance s = y - x0,
/// in a cancellation-free closed form; only the leg that touches the
/// origin uses it, every later increment integrates `f` directly.
pub fn cumulative_from_singular_origin<S: Scalar>(
    f: impl Fn(S) -> S,
    f_offset: impl Fn(S) -> S,
    mu: S,
    x0: S,
    xs: &[S],
    cfg: &QuadConfig<S>,
) -> Result<Vec<S>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    for w in xs.windows(2) {
        if w[0] > w[1] {
            return Err(Error::Parameter("cumulative grid must be sorted".into()));
        }
    }
    if xs[0] <= x0 {
        return Err(Error::Parameter(
            "singular-origin cumulative needs all grid points above x0".into(),
        ));
    }
    let per_step = per_step_config(cfg, xs.len());
    let mut out = vec![S::zero(); xs.len()];
    let mut acc = integrate_power_endpoint(&f_offset, xs[0] - x0, mu, &per_step)?.value;
    out[0] = acc;
    for i in 1..xs.len() {
        let step = integrate_dyn(&f, xs[i - 1], xs[i], &per_step)?;
        acc = acc + step.value;
        out[i] = acc;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig<f64> {
        QuadConfig::default()
    }

    #[test]
    fn unit_constant() {
        let r = integrate(|_y: f64| 1.0, 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_reference() {
        // int_0^6 e^{-y^2} dy; the tail beyond 6 is below 1e-16 of the total
        let r = integrate(|y: f64| (-y * y).exp(), 0.0, 6.0, &cfg()).unwrap();
        assert!((r.value - 0.886_226_925_452_758).abs() < 1e-12);
    }

    #[test]
    fn arcsine_singular_endpoints() {
        // int_{-1}^{1} (1-y^2)^{-1/2} dy = pi, as two offset-form halves
        // with the cancellation-free factorization 1 - y^2 = s (2 - s)
        let f = |s: f64| 1.0 / (s * (2.0 - s)).sqrt();
        let left = integrate_power_endpoint(f, 1.0, -0.5, &cfg()).unwrap();
        let right = integrate_power_endpoint(f, 1.0, -0.5, &cfg()).unwrap();
        assert!((left.value + right.value - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn strong_algebraic_singularity() {
        // s^{-0.92}: far past what a square-root substitution can heal
        let mu = -0.92;
        let r = integrate_power_endpoint(|s: f64| s.powf(mu), 1.0, mu, &cfg()).unwrap();
        let exact = 1.0 / (1.0 + mu);
        assert!(
            (r.value - exact).abs() < 1e-9 * exact,
            "{} vs {exact}",
            r.value
        );
    }

    #[test]
    fn power_endpoint_rejects_non_integrable_exponent() {
        let err = integrate_power_endpoint(|s: f64| s.powf(-1.5), 1.0, -1.5, &cfg()).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }

    #[test]
    fn cumulative_identity_function() {
        let out = cumulative(|_y: f64| 1.0, 0.0, &[0.0, 0.5, 1.0], &cfg()).unwrap();
        assert!((out[0] - 0.0).abs() < 1e-15);
        assert!((out[1] - 0.5).abs() < 1e-14);
        assert!((out[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_spanning_origin() {
        // erf oracle value for int_0^1 e^{-y^2}, frozen from an independent
        // series evaluation
        let erf_part = 0.746_824_132_812_427_025_4;
        let out = cumulative(
            |y: f64| (-y * y).exp(),
            0.0,
            &[-1.0, 0.0, 1.0],
            &cfg(),
        )
        .unwrap();
        assert!((out[0] + erf_part).abs() < 1e-10);
        assert!(out[1].abs() < 1e-13);
        assert!((out[2] - erf_part).abs() < 1e-10);
    }

    #[test]
    fn cumulative_legendre_weight() {
        // int_{-1}^{1} (1-y^2) dy = 4/3
        let out = cumulative(|y: f64| 1.0 - y * y, -1.0, &[1.0], &cfg()).unwrap();
        assert!((out[0] - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn unresolvable_oscillation_reports_convergence_failure() {
        // bounded but oscillating infinitely fast near an interior point
        let f = |y: f64| (1.0 / (y - 0.3141592653589793).abs().max(1e-300)).sin();
        let err = integrate(f, 0.0, 1.0, &cfg()).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }

    #[test]
    fn non_finite_integrand_reported() {
        let f = |y: f64| if y < 0.5 { 1.0 } else { f64::NAN };
        let err = integrate(f, 0.0, 1.0, &cfg()).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn reversed_limits_rejected() {
        let err = integrate(|_y: f64| 1.0, 1.0, 0.0, &cfg()).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }
}
