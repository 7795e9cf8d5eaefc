//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point type the geometry is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Reduces a curve parameter into `[0, 1)`.
#[inline]
pub(crate) fn wrap_unit<T: Scalar>(x: T) -> T {
    let r = x - x.floor();
    // `x - floor(x)` rounds up to 1 for tiny negative inputs.
    if r >= T::one() {
        T::zero()
    } else {
        r
    }
}

/// Distance between two parameters on the circle `R/Z`.
#[inline]
pub fn circle_distance<T: Scalar>(x: T, y: T) -> T {
    let d = wrap_unit(x - y);
    d.min(T::one() - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_handles_negative_and_large() {
        assert_eq!(wrap_unit(1.25_f64), 0.25);
        assert_eq!(wrap_unit(-0.25_f64), 0.75);
        assert_eq!(wrap_unit(-1e-20_f64), 0.0);
        assert_eq!(wrap_unit(3.0_f32), 0.0);
    }

    #[test]
    fn circle_distance_is_symmetric_and_short_way_round() {
        assert!((circle_distance(0.05_f64, 0.95) - 0.1).abs() < 1e-15);
        assert!((circle_distance(0.95_f64, 0.05) - 0.1).abs() < 1e-15);
        assert_eq!(circle_distance(0.0_f64, 0.5), 0.5);
    }
}
