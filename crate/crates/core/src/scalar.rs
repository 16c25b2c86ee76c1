//! Floating-point abstraction for the numeric core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Scalar type the embedding, difficulty and baseline math is generic over.
///
/// `f32` and `f64` both satisfy it; the crate-root aliases pin `f64` for
/// everything that touches a file format.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used at parse boundaries.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from(v).expect("finite f64 converts to any float scalar")
    }

    /// Lossless widening to `f64`, used at serialization boundaries.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("float scalar widens to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Dot product of two equal-length slices.
pub fn dot<S: Scalar>(u: &[S], v: &[S]) -> S {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(&a, &b)| a * b).sum()
}

/// Euclidean norm.
pub fn norm<S: Scalar>(u: &[S]) -> S {
    dot(u, u).sqrt()
}
