use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// Coefficient field for [`super::ZPoly`]: exact rationals or `f64`.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static {
    fn from_ratio(num: i128, den: i128) -> Self;

    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Zero test for a nonnegative quantity of size `scale`: exact for
    /// rationals, relative for floats.
    fn negligible(&self, scale: f64) -> bool;
}

impl Scalar for f64 {
    fn from_ratio(num: i128, den: i128) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn negligible(&self, scale: f64) -> bool {
        self.abs() <= 1e-24 * scale.max(1.0)
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i128, den: i128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Exact binary value of `x`.
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let r = BigRational::from_ratio(-7, 12);
        assert_eq!(Scalar::to_f64(&r), -7.0 / 12.0);
        assert_eq!(<BigRational as Scalar>::from_f64(0.375), BigRational::from_ratio(3, 8));
        assert!(BigRational::from_ratio(0, 5).negligible(1.0));
        assert!(!BigRational::from_ratio(1, 1_000_000_000_000).negligible(1.0));
    }
}
