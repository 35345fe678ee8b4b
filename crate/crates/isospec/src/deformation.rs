//! The one-parameter deformation: b_n^+(x; gamma), the deformed
//! eigenfunctions psi~_{n+1} = B_n^+ psi_n, the deformed operator
//! L~_{n+1} = L_{n+1} - 2 sqrt(P) db/dx, and the third-order ladder
//! operators C+-.
//!
//! b is e^delta / (gamma - int_{x0}^x e^delta / sqrt(P)); its derivatives
//! come from the Riccati relation, never from numerical differentiation.
//! The denominator integral is cached on the working grid and extended to
//! off-grid points by one short adaptive panel from the nearest cached
//! abscissa. L~ is assembled from the general formula with R_{n+1} rather
//! than from per-family expanded coefficients.

use crate::classical::{eval_classical, ClassicalEval, FamilyId};
use crate::error::{Error, Result};
use crate::families::{
    denominator_prefix_integrals, gamma_admissible, spec_for, FamilySpec, IntegralOrigin,
};
use crate::quadrature::{integrate, QuadConfig};
use crate::scalar::{idx, lit, Scalar};
use crate::verify::GridSpec;

/// Denominator must stay above this multiple of |gamma| on the grid.
const MIN_DENOM_FACTOR: f64 = 1e-8;

/// Ladder direction for the first- and third-order operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderDirection {
    Plus,
    Minus,
}

/// A function value with its first derivative.
#[derive(Debug, Clone, Copy)]
pub struct Jet1<S> {
    pub value: S,
    pub d1: S,
}

/// A function value with two derivatives.
#[derive(Debug, Clone, Copy)]
pub struct Jet2<S> {
    pub value: S,
    pub d1: S,
    pub d2: S,
}

impl<S: Scalar> From<&ClassicalEval<S>> for Jet2<S> {
    fn from(e: &ClassicalEval<S>) -> Self {
        Jet2 {
            value: e.value,
            d1: e.d1,
            d2: e.d2,
        }
    }
}

/// psi~_{n+1} and b at one abscissa.
#[derive(Debug, Clone, Copy)]
pub struct DeformedEval<S> {
    pub x: S,
    pub b: S,
    pub db: S,
    pub psi_tilde: S,
    pub psi_tilde_d1: S,
    pub psi_tilde_d2: S,
}

/// Result of applying a composed operator, with the largest constituent
/// term magnitude for relative-residual scaling.
#[derive(Debug, Clone, Copy)]
pub struct OperatorApplication<S> {
    pub value: S,
    pub scale: S,
}

/// A bound (family, n, gamma) triple with the cached denominator evaluator.
#[derive(Debug, Clone)]
pub struct DeformationContext<S> {
    spec: FamilySpec<S>,
    n: u32,
    gamma: S,
    xs: Vec<S>,
    /// Prefix integrals from x0 at each grid point; `None` for Bessel,
    /// where b has the closed form 2n / (gamma x^{2n+1} + x).
    integrals: Option<Vec<S>>,
    quad: QuadConfig<S>,
}

impl<S: Scalar> DeformationContext<S> {
    /// Build a context, checking gamma admissibility and the
    /// denominator-does-not-vanish invariant on the grid.
    ///
    /// ```
    /// use isospec::{DeformationContext, FamilyId, GridSpec};
    ///
    /// let grid = GridSpec::uniform(-4.0, 4.0, 201);
    /// let ctx = DeformationContext::new(FamilyId::<f64>::Hermite, 0, 2.0, &grid).unwrap();
    /// let e = ctx.eval_psi_tilde(0.0).unwrap();
    /// // psi~_1(0) = -H_1(0) + b(0) H_0(0) = e^0 / (2 - 0)
    /// assert!((e.psi_tilde - 0.5).abs() < 1e-12);
    /// ```
    pub fn new(family: FamilyId<S>, n: u32, gamma: S, grid: &GridSpec<S>) -> Result<Self> {
        let spec = spec_for(family)?;
        spec.deformation_well_posed(n)?;

        let xs = grid.points();
        if xs.len() < 2 {
            return Err(Error::Parameter("grid needs at least two points".into()));
        }
        let (dlo, dhi) = spec.domain();
        if !(xs[0] > dlo && *xs.last().unwrap() < dhi) {
            return Err(Error::Domain {
                family: spec.name(),
                x: xs[0].to_f64().unwrap_or(f64::NAN),
            });
        }
        if !gamma_admissible(&spec, n, gamma) {
            return Err(Error::InadmissibleGamma {
                family: spec.name(),
                n,
                gamma: gamma.to_f64().unwrap_or(f64::NAN),
                requirement: spec.gamma_bound(n).requirement(),
            });
        }

        let quad = QuadConfig::default();
        let integrals = match spec.x0() {
            IntegralOrigin::PlusInfinity => None,
            IntegralOrigin::Point(x0) => {
                let ints = denominator_prefix_integrals(&spec, n, x0, &xs, &quad)?;
                let mut min_abs = S::infinity();
                let mut min_x = xs[0];
                for (&x, &i) in xs.iter().zip(&ints) {
                    let d = (gamma - i).abs();
                    if d < min_abs {
                        min_abs = d;
                        min_x = x;
                    }
                }
                if min_abs <= lit::<S>(MIN_DENOM_FACTOR) * gamma.abs() {
                    return Err(Error::DenominatorVanishes {
                        x: min_x.to_f64().unwrap_or(f64::NAN),
                        min_abs: min_abs.to_f64().unwrap_or(f64::NAN),
                    });
                }
                Some(ints)
            }
        };

        Ok(DeformationContext {
            spec,
            n,
            gamma,
            xs,
            integrals,
            quad,
        })
    }

    pub fn spec(&self) -> &FamilySpec<S> {
        &self.spec
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn gamma(&self) -> S {
        self.gamma
    }

    pub fn grid_points(&self) -> &[S] {
        &self.xs
    }

    fn check_in_domain(&self, x: S) -> Result<()> {
        let (dlo, dhi) = self.spec.domain();
        if x > dlo && x < dhi && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain {
                family: self.spec.name(),
                x: x.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    /// int_{x0}^{x} e^delta / sqrt(P), anchored at the nearest cached point.
    fn integral_to(&self, x: S) -> Result<S> {
        let ints = self
            .integrals
            .as_ref()
            .expect("integral_to not used for closed-form families");
        let pos = self.xs.partition_point(|&p| p <= x);
        if pos == 0 {
            let step = integrate(
                |y| self.spec.denom_integrand(self.n, y),
                x,
                self.xs[0],
                &self.quad,
            )?;
            Ok(ints[0] - step.value)
        } else {
            let anchor = self.xs[pos - 1];
            if anchor == x {
                return Ok(ints[pos - 1]);
            }
            let step = integrate(
                |y| self.spec.denom_integrand(self.n, y),
                anchor,
                x,
                &self.quad,
            )?;
            Ok(ints[pos - 1] + step.value)
        }
    }

    /// D(x) = gamma - int_{x0}^x e^delta / sqrt(P) dy.
    pub fn denominator(&self, x: S) -> Result<S> {
        self.check_in_domain(x)?;
        match self.integrals {
            None => {
                // folded Bessel form: b = e^delta / D with
                // D = (gamma + x^{-2n}) / (2n); surfaced for diagnostics
                let two_n = idx::<S>(2 * self.n);
                if self.n == 0 {
                    return Ok(S::infinity());
                }
                Ok((self.gamma + x.powi(-(2 * self.n as i32))) / two_n)
            }
            Some(_) => Ok(self.gamma - self.integral_to(x)?),
        }
    }

    /// b_n^+(x; gamma) and its derivative from the Riccati relation.
    pub fn eval_b(&self, x: S) -> Result<(S, S)> {
        let jet = self.b_jet(x)?;
        Ok((jet.0, jet.1))
    }

    /// (b, b', b'') with all derivatives from the Riccati relation
    /// sqrt(P) b' = b^2 + b (a+ - a-), differentiated once more for b''.
    fn b_jet(&self, x: S) -> Result<(S, S, S)> {
        self.check_in_domain(x)?;
        let n = self.n;
        let b = match self.integrals {
            None => {
                // 2n / (gamma x^{2n+1} + x); identically zero at n = 0
                if n == 0 {
                    S::zero()
                } else {
                    idx::<S>(2 * n) / (self.gamma * x.powi(2 * n as i32 + 1) + x)
                }
            }
            Some(_) => {
                let d = self.gamma - self.integral_to(x)?;
                if d == S::zero() {
                    return Err(Error::DenominatorVanishes {
                        x: x.to_f64().unwrap_or(f64::NAN),
                        min_abs: 0.0,
                    });
                }
                self.spec.delta(n, x).exp() / d
            }
        };
        let sp = self.spec.sqrt_p(x);
        let c = self.spec.a_plus(n, x) - self.spec.a_minus(n, x);
        let dc = self.spec.da_plus(n, x) - self.spec.da_minus(n, x);
        let db = (b * b + b * c) / sp;
        let d2b = (lit::<S>(2.0) * b * db + db * c + b * dc) / sp - db * self.spec.dsqrt_p(x) / sp;
        Ok((b, db, d2b))
    }

    /// psi~_{n+1} = raise_coeff(n) psi_{n+1} + b psi_n with analytic
    /// derivatives assembled from the classical rows and the b jet.
    pub fn eval_psi_tilde(&self, x: S) -> Result<DeformedEval<S>> {
        let (b, db, d2b) = self.b_jet(x)?;
        let en = eval_classical(self.spec.family(), self.n, x)?;
        let en1 = eval_classical(self.spec.family(), self.n + 1, x)?;
        let r = self.spec.raise_coeff(self.n);
        let two = lit::<S>(2.0);
        Ok(DeformedEval {
            x,
            b,
            db,
            psi_tilde: r * en1.value + b * en.value,
            psi_tilde_d1: r * en1.d1 + db * en.value + b * en.d1,
            psi_tilde_d2: r * en1.d2 + d2b * en.value + two * db * en.d1 + b * en.d2,
        })
    }

    /// (psi~, psi~', psi~'', psi~''') with the third derivative pulled from
    /// the deformed ODE, which psi~ satisfies by construction.
    fn psi_tilde_jet3(&self, x: S) -> Result<(S, S, S, S)> {
        let e = self.eval_psi_tilde(x)?;
        let (_, db, d2b) = self.b_jet(x)?;
        let n1 = self.n + 1;
        let two = lit::<S>(2.0);
        let p = self.spec.p(x);
        let r_t = self.spec.r(n1, x) - two * self.spec.sqrt_p(x) * db;
        let dr_t = self.spec.dr(n1, x)
            - two * (self.spec.dsqrt_p(x) * db + self.spec.sqrt_p(x) * d2b);
        let d3 = -((self.spec.dp(x) + self.spec.q(x)) * e.psi_tilde_d2
            + (self.spec.dq(x) + r_t) * e.psi_tilde_d1
            + dr_t * e.psi_tilde)
            / p;
        Ok((e.psi_tilde, e.psi_tilde_d1, e.psi_tilde_d2, d3))
    }

    /// Apply L~_{n+1} = P d^2 + Q d + R_{n+1} - 2 sqrt(P) db to a function
    /// given as a value/d1/d2 triple.
    pub fn apply_l_tilde(&self, f: Jet2<S>, x: S) -> Result<S> {
        let (_, db, _) = self.b_jet(x)?;
        Ok(self.spec.p(x) * f.d2
            + self.spec.q(x) * f.d1
            + self.spec.r(self.n + 1, x) * f.value
            - lit::<S>(2.0) * self.spec.sqrt_p(x) * db * f.value)
    }

    /// Same application, reporting the largest constituent term.
    pub fn apply_l_tilde_scaled(&self, f: Jet2<S>, x: S) -> Result<OperatorApplication<S>> {
        let (_, db, _) = self.b_jet(x)?;
        let t1 = self.spec.p(x) * f.d2;
        let t2 = self.spec.q(x) * f.d1;
        let t3 = self.spec.r(self.n + 1, x) * f.value;
        let t4 = -lit::<S>(2.0) * self.spec.sqrt_p(x) * db * f.value;
        Ok(OperatorApplication {
            value: t1 + t2 + t3 + t4,
            scale: t1.abs().max(t2.abs()).max(t3.abs()).max(t4.abs()),
        })
    }

    /// First-order coefficient of B: a_n^+ + b for plus, a_{n+1}^- - b for
    /// minus, as a (value, d1, d2) jet at x.
    fn b_op_phi(&self, dir: LadderDirection, x: S) -> Result<(S, S, S)> {
        let (b, db, d2b) = self.b_jet(x)?;
        let n = self.n;
        Ok(match dir {
            LadderDirection::Plus => (
                self.spec.a_plus(n, x) + b,
                self.spec.da_plus(n, x) + db,
                self.spec.d2a_plus(n, x) + d2b,
            ),
            LadderDirection::Minus => (
                self.spec.a_minus(n, x) - b,
                self.spec.da_minus(n, x) - db,
                self.spec.d2a_minus(n, x) - d2b,
            ),
        })
    }

    /// B_n^+ f = sqrt(P) f' + (a_n^+ + b) f, or
    /// B_{n+1}^- f = sqrt(P) f' + (a_{n+1}^- - b) f.
    pub fn apply_b(&self, dir: LadderDirection, f: Jet1<S>, x: S) -> Result<S> {
        let (phi, _, _) = self.b_op_phi(dir, x)?;
        Ok(self.spec.sqrt_p(x) * f.d1 + phi * f.value)
    }

    /// B application together with its derivative (consumes f'').
    pub fn apply_b_with_derivative(&self, dir: LadderDirection, f: Jet2<S>, x: S) -> Result<Jet1<S>> {
        let (phi, dphi, _) = self.b_op_phi(dir, x)?;
        let sp = self.spec.sqrt_p(x);
        let dsp = self.spec.dsqrt_p(x);
        Ok(Jet1 {
            value: sp * f.d1 + phi * f.value,
            d1: dsp * f.d1 + sp * f.d2 + dphi * f.value + phi * f.d1,
        })
    }

    /// The undeformed A_n^+ / A_{n+1}^- application with derivative.
    pub fn apply_a_with_derivative(
        &self,
        dir: LadderDirection,
        f: Jet2<S>,
        x: S,
    ) -> Result<Jet1<S>> {
        let n = self.n;
        let (phi, dphi) = match dir {
            LadderDirection::Plus => (self.spec.a_plus(n, x), self.spec.da_plus(n, x)),
            LadderDirection::Minus => (self.spec.a_minus(n, x), self.spec.da_minus(n, x)),
        };
        let sp = self.spec.sqrt_p(x);
        Ok(Jet1 {
            value: sp * f.d1 + phi * f.value,
            d1: self.spec.dsqrt_p(x) * f.d1 + sp * f.d2 + dphi * f.value + phi * f.d1,
        })
    }
}

/// Two contexts at consecutive indices and the same gamma, as consumed by
/// the third-order ladder operators.
///
/// `lower` has index m - 1 (so its deformed eigenfunction is psi~_m) and
/// `upper` has index m (psi~_{m+1}).
#[derive(Debug, Clone)]
pub struct LadderChain<S> {
    lower: DeformationContext<S>,
    upper: DeformationContext<S>,
}

impl<S: Scalar> LadderChain<S> {
    /// Chain for the ladder step at psi~ index m; the space of deformed
    /// eigenfunctions has no n = 0 element, so m = 0 is an index error.
    pub fn new(family: FamilyId<S>, m: u32, gamma: S, grid: &GridSpec<S>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Index(
                "C ladder operators are undefined at n = 0: B^- lacks the n = 0 element".into(),
            ));
        }
        let lower = DeformationContext::new(family, m - 1, gamma, grid)?;
        let upper = DeformationContext::new(family, m, gamma, grid)?;
        Ok(LadderChain { lower, upper })
    }

    pub fn lower(&self) -> &DeformationContext<S> {
        &self.lower
    }

    pub fn upper(&self) -> &DeformationContext<S> {
        &self.upper
    }

    /// Index m of the psi~ the plus operator acts on.
    pub fn m(&self) -> u32 {
        self.upper.n()
    }

    /// The deformed eigenfunction each direction consumes: psi~_m for plus,
    /// psi~_{m+1} for minus.
    pub fn input_psi_tilde(&self, dir: LadderDirection, x: S) -> Result<DeformedEval<S>> {
        match dir {
            LadderDirection::Plus => self.lower.eval_psi_tilde(x),
            LadderDirection::Minus => self.upper.eval_psi_tilde(x),
        }
    }

    /// The deformed eigenfunction each direction should be proportional to:
    /// psi~_{m+1} for plus, psi~_m for minus.
    pub fn output_psi_tilde(&self, dir: LadderDirection, x: S) -> Result<DeformedEval<S>> {
        match dir {
            LadderDirection::Plus => self.upper.eval_psi_tilde(x),
            LadderDirection::Minus => self.lower.eval_psi_tilde(x),
        }
    }

    /// Apply C_m^+ = B_m^+ A_{m-1}^+ B_m^- to psi~_m, or
    /// C_{m+1}^- = B_{m-1}^+ A_m^- B_{m+1}^- to psi~_{m+1}.
    ///
    /// The third derivative of the input is completed analytically from the
    /// deformed ODE; each first-order stage then propagates one derivative.
    pub fn apply_c(&self, dir: LadderDirection, x: S) -> Result<OperatorApplication<S>> {
        let spec = self.lower.spec();
        let sp = spec.sqrt_p(x);
        let dsp = spec.dsqrt_p(x);
        let d2sp = spec.d2sqrt_p(x);
        let nl = self.lower.n(); // = m - 1

        // input jet and the three first-order coefficients
        let (f0, f1, f2, f3, phi1, phi2, phi3) = match dir {
            LadderDirection::Plus => {
                let jet = self.lower.psi_tilde_jet3(x)?;
                // B_m^- = A_m^- - b_{m-1}^+
                let p1 = self.lower.b_op_phi(LadderDirection::Minus, x)?;
                // A_{m-1}^+
                let p2 = (spec.a_plus(nl, x), spec.da_plus(nl, x));
                // B_m^+ = A_m^+ + b_m^+
                let p3 = self.upper.b_op_phi(LadderDirection::Plus, x)?.0;
                (jet.0, jet.1, jet.2, jet.3, p1, p2, p3)
            }
            LadderDirection::Minus => {
                let jet = self.upper.psi_tilde_jet3(x)?;
                // B_{m+1}^- = A_{m+1}^- - b_m^+
                let p1 = self.upper.b_op_phi(LadderDirection::Minus, x)?;
                // A_m^-
                let p2 = (spec.a_minus(nl, x), spec.da_minus(nl, x));
                // B_{m-1}^+ = A_{m-1}^+ + b_{m-1}^+
                let p3 = self.lower.b_op_phi(LadderDirection::Plus, x)?.0;
                (jet.0, jet.1, jet.2, jet.3, p1, p2, p3)
            }
        };

        let two = lit::<S>(2.0);
        // stage 1: jet3 -> jet2
        let g0 = sp * f1 + phi1.0 * f0;
        let g1 = dsp * f1 + sp * f2 + phi1.1 * f0 + phi1.0 * f1;
        let g2 = d2sp * f1 + two * dsp * f2 + sp * f3 + phi1.2 * f0 + two * phi1.1 * f1
            + phi1.0 * f2;
        // stage 2: jet2 -> jet1
        let h0 = sp * g1 + phi2.0 * g0;
        let h1 = dsp * g1 + sp * g2 + phi2.1 * g0 + phi2.0 * g1;
        // stage 3: jet1 -> value
        let value = sp * h1 + phi3 * h0;

        let scale = (sp * f1)
            .abs()
            .max((phi1.0 * f0).abs())
            .max((sp * g1).abs())
            .max((phi2.0 * g0).abs())
            .max((sp * h1).abs())
            .max((phi3 * h0).abs());
        Ok(OperatorApplication { value, scale })
    }
}
