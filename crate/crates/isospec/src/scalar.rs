//! Floating-point scalar abstraction: f32 or f64.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

/// Real scalar the whole crate is generic over.
pub trait Scalar: Float + FromPrimitive + Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Send + Sync + 'static {}

/// Shorthand for casting an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn lit<S: Scalar>(x: f64) -> S {
    S::from(x).expect("constant representable in scalar type")
}

/// Shorthand for casting a small integer index into the working scalar type.
#[inline]
pub(crate) fn idx<S: Scalar>(n: u32) -> S {
    S::from(n).expect("index representable in scalar type")
}
