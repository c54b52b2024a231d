//! The real scalar abstraction the kernels are written against.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real field underlying every amplitude. Implemented for `f32` and `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` constant, rounding where the type is narrower.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Smallest pivot modulus LU elimination will divide by.
    fn pivot_floor() -> Self {
        Self::lit(1e-300).max(Self::min_positive_value())
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn is_finite<T: Real>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `|a - b| / max(1, |b|)`: relative error with a unit floor so that
/// values near zero are compared absolutely.
pub fn residual<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    (a - b).norm() / b.norm().max(T::one())
}
