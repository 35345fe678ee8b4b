//! One-parameter isospectral deformations of classical special-function
//! operators.
//!
//! For each of seven Sturm-Liouville families (Hermite, Laguerre, Legendre,
//! Chebyshev, Jacobi functions, Jacobi polynomials, Bessel) the crate
//! factorizes the classical operator through its ladder operators, shifts
//! them by the Riccati solution b_n^+(x; gamma), and builds the deformed
//! operator L~_{n+1} together with its parametric eigenfunctions
//! psi~_{n+1}(x; gamma). The `verify` module re-derives every identity this
//! construction rests on by independent numerical oracles.
//!
//! Core math is generic over the scalar type via [`scalar::Scalar`]
//! (f32 or f64); the `*64` aliases below fix the default precision.

pub mod classical;
pub mod deformation;
pub mod error;
pub mod families;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod verify;

pub use classical::{eval_classical, ClassicalEval, FamilyId};
pub use deformation::{
    DeformationContext, DeformedEval, Jet1, Jet2, LadderChain, LadderDirection,
};
pub use error::{Error, Result};
pub use families::{gamma_admissible, spec_for, FamilySpec, GammaBound, GammaBoundKind};
pub use quadrature::{
    cumulative, cumulative_from_singular_origin, integrate, integrate_power_endpoint, QuadConfig,
    QuadResult,
};
pub use scalar::Scalar;
pub use verify::{
    default_families, default_grid, run_identity, run_suite, GridSpec, Identity, ResidualReport,
    Spacing, SuiteConfig, SuiteResult,
};

pub type FamilyId64 = FamilyId<f64>;
pub type FamilySpec64 = FamilySpec<f64>;
pub type ClassicalEval64 = ClassicalEval<f64>;
pub type DeformationContext64 = DeformationContext<f64>;
pub type DeformedEval64 = DeformedEval<f64>;
pub type GridSpec64 = GridSpec<f64>;
pub type ResidualReport64 = ResidualReport<f64>;
pub type QuadResult64 = QuadResult<f64>;

pub type FamilyId32 = FamilyId<f32>;
pub type FamilySpec32 = FamilySpec<f32>;
pub type DeformationContext32 = DeformationContext<f32>;

#[cfg(test)]
mod shareability {
    use super::*;

    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn immutable_types_are_shareable_across_threads() {
        assert_send_sync::<FamilySpec64>();
        assert_send_sync::<DeformationContext64>();
        assert_send_sync::<LadderChain<f64>>();
        assert_send_sync::<ResidualReport64>();
    }
}
