//! Scalar abstraction.
//!
//! Every numeric kernel in this crate is generic over a floating-point type
//! implementing [`Real`]. Concrete `f64` aliases live at the crate root;
//! `f32` is supported for cheap exploratory sweeps.

use std::fmt;

/// Floating-point scalar used for all field, action and grid arithmetic.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal into `Self`.
    fn of(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("scalar literal not representable")
    }

    /// Convert a sample count into `Self`.
    fn of_count(n: usize) -> Self {
        <Self as num_traits::NumCast>::from(n).expect("count not representable")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar not representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex sample type shared by all modules.
pub type Cx<T> = num_complex::Complex<T>;

/// `exp(i * phase)` on the unit circle.
pub fn cis<T: Real>(phase: T) -> Cx<T> {
    Cx::from_polar(T::one(), phase)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_conversion_round_trips() {
        assert_eq!(f64::of(2.5), 2.5);
        assert_eq!(f32::of(0.5), 0.5f32);
        assert_eq!(f64::of_count(7), 7.0);
        assert_eq!(2.5f64.as_f64(), 2.5);
    }

    #[test]
    fn cis_is_unit_circle() {
        let z = cis(std::f64::consts::FRAC_PI_2);
        assert!((z.re).abs() < 1e-15);
        assert!((z.im - 1.0).abs() < 1e-15);
    }
}
