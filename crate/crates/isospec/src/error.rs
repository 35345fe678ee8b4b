//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by evaluation, deformation construction, and verification.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Abscissa outside the family's natural domain.
    #[error("domain error: x = {x} outside the {family} domain")]
    Domain { family: &'static str, x: f64 },

    /// Invalid family parameters or malformed inputs.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The deformation parameter violates the family's admissibility bound.
    #[error("inadmissible gamma = {gamma} for {family} at n = {n}: requires {requirement}")]
    InadmissibleGamma {
        family: &'static str,
        n: u32,
        gamma: f64,
        requirement: String,
    },

    /// gamma satisfies the closed-form bound but the denominator still gets too
    /// close to zero on the working grid.
    #[error("denominator gamma - integral vanishes near x = {x} (min |D| = {min_abs})")]
    DenominatorVanishes { x: f64, min_abs: f64 },

    /// Adaptive quadrature exhausted its evaluation budget.
    #[error("quadrature did not converge within {evaluations} evaluations (error estimate {error_estimate})")]
    Convergence {
        evaluations: usize,
        error_estimate: f64,
    },

    /// Integrand returned NaN or infinity at an interior point.
    #[error("integrand non-finite at x = {x}")]
    NonFinite { x: f64 },

    /// Ladder operation requested below its defined index range.
    #[error("index error: {0}")]
    Index(String),

    /// Identity/family combination outside the identity's applicability.
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
