//! Scalar abstraction used by every numerical routine in this crate.
//!
//! All algorithms are written against [`Real`], so the same code runs at
//! `f32`, `f64`, or the double-double type [`crate::dd::Dd`]. The trait adds
//! a few operations that `num_traits::Float` lacks: exact embedding of `f64`
//! seeds, wide-integer conversion, and full-precision decimal parsing for
//! data files.

use core::fmt;
use core::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst};

use crate::dd::Dd;
use crate::Error;

/// Floating-point scalar with known significand width and exact seeding.
pub trait Real:
    Float
    + FloatConst
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Significand width in bits of the format.
    const BITS: u32;

    /// Embeds an `f64` exactly.
    fn from_f64(x: f64) -> Self;

    /// Nearest `f64`.
    fn as_f64(self) -> f64;

    /// Exact conversion of a wide integer, up to format precision.
    fn from_i128_near(n: i128) -> Self;

    /// Quotient of integers at working precision.
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i128_near(num as i128) / Self::from_i128_near(den as i128)
    }

    /// Parses a decimal literal keeping every digit the format can hold.
    fn parse_full(s: &str) -> Result<Self, Error>;

    /// Unit roundoff of the format, `2^-BITS`.
    fn unit_roundoff() -> Self {
        Self::from_f64(2.0).powi(-(Self::BITS as i32))
    }

    /// Renders the value with close to full precision for data files.
    fn to_decimal_full(self) -> String;
}

impl Real for f32 {
    const BITS: u32 = 24;

    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
    fn from_i128_near(n: i128) -> Self {
        n as f32
    }
    fn parse_full(s: &str) -> Result<Self, Error> {
        s.trim().parse().map_err(|_| Error::parse(s))
    }
    fn to_decimal_full(self) -> String {
        format!("{self:e}")
    }
}

impl Real for f64 {
    const BITS: u32 = 53;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn as_f64(self) -> f64 {
        self
    }
    fn from_i128_near(n: i128) -> Self {
        n as f64
    }
    fn parse_full(s: &str) -> Result<Self, Error> {
        s.trim().parse().map_err(|_| Error::parse(s))
    }
    fn to_decimal_full(self) -> String {
        format!("{self:e}")
    }
}

impl Real for Dd {
    const BITS: u32 = 104;

    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    fn as_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    fn from_i128_near(n: i128) -> Self {
        Dd::from_i128(n)
    }
    fn parse_full(s: &str) -> Result<Self, Error> {
        s.parse().map_err(|_| Error::parse(s))
    }
    fn to_decimal_full(self) -> String {
        self.to_sci(33)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_roundoff_is_tiny<T: Real>() -> f64 {
        T::unit_roundoff().as_f64()
    }

    #[test]
    fn bits_drive_unit_roundoff() {
        assert!((unit_roundoff_is_tiny::<f64>() - 2.0f64.powi(-53)).abs() < 1e-40);
        assert!(unit_roundoff_is_tiny::<Dd>() < 1e-30);
    }

    #[test]
    fn parse_full_keeps_extra_digits() {
        let x = Dd::parse_full("0.333333333333333333333333333333333").unwrap();
        let third = Dd::from_ratio(1, 3);
        let diff = (x - third).as_f64().abs();
        assert!(diff < 1e-30);
    }
}
