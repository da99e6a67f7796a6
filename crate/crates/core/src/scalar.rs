//! Floating-point abstraction for the numeric kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Scalar type the simulation kernels are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Display + Debug + Send + Sync + 'static
{
    /// Convert any primitive number into the scalar.
    fn cast<T: ToPrimitive>(x: T) -> Self {
        Self::from_f64(x.to_f64().expect("numeric cast")).expect("numeric cast")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cast_is_exact_for_f64() {
        assert_eq!(f64::cast(0.3_f64), 0.3);
        assert_eq!(f64::cast(7_u32), 7.0);
        assert_eq!(f32::cast(1.5_f64), 1.5_f32);
    }
}
