//! Scalar abstraction over the supported floating-point precisions.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point value type for matrix entries and vectors.
///
/// Every data structure in the library is generic over this trait with a
/// 64-bit default. `f32` is supported for the full solver stack; expect to
/// relax tolerances to roughly `1e-5` when using it.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Send + Sync + Debug + Display + 'static
{
    /// Lossy conversion from `f64`, used for constants and defaults.
    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite f64 constant")
    }

    /// Lossy conversion to `f64`, used for reporting.
    fn to_f64_lossy(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("scalar representable as f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
