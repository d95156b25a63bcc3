//! Scalar abstraction for the numeric core.
//!
//! Everything numeric in this crate is generic over [`Scalar`], which is any
//! IEEE float with the conversions we need. `f32` and `f64` are the two
//! instantiations; concrete `f64` aliases live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless-enough conversion from `f64` for constants and parameters.
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }

    /// Conversion from a row/sample count.
    fn from_usize_c(v: usize) -> Self {
        Self::from_usize(v).expect("count fits in scalar")
    }

    /// Widening conversion to `f64` (exact for both supported widths).
    fn to_f64_c(self) -> f64 {
        self.to_f64().expect("float widens to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
