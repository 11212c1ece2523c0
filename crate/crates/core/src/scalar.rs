//! Leaf payloads.
//!
//! Leaves hold natural numbers. The machine is generic over the concrete
//! representation: [`num_bigint::BigUint`] gives unbounded naturals, while
//! fixed-width unsigned integers are faster and report [`Error::Overflow`]
//! instead of wrapping.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, Num, ToPrimitive};

use crate::error::{Error, Result};

/// A natural-number type usable as a leaf payload.
pub trait Natural:
    Num
    + CheckedAdd
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Clone
    + Ord
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn add_checked(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(rhs).ok_or(Error::Overflow)
    }

    fn mul_checked(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(rhs).ok_or(Error::Overflow)
    }

    /// Truncated subtraction: `a - b` when `a >= b`, else zero.
    fn monus(&self, rhs: &Self) -> Self {
        if self >= rhs {
            self.clone() - rhs.clone()
        } else {
            Self::zero()
        }
    }

    fn rem_checked(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.clone() % rhs.clone())
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Self::one()
        } else {
            Self::zero()
        }
    }

    /// `Some(b)` when the value is 0 or 1.
    fn as_bool(&self) -> Option<bool> {
        if self.is_zero() {
            Some(false)
        } else if self.is_one() {
            Some(true)
        } else {
            None
        }
    }

    /// Parses a decimal literal, `None` if it does not fit.
    fn parse_decimal(digits: &str) -> Option<Self> {
        Self::from_str_radix(digits, 10).ok()
    }

    fn from_char(c: char) -> Option<Self> {
        Self::from_u32(c as u32)
    }

    fn to_char(&self) -> Option<char> {
        self.to_u32().and_then(char::from_u32)
    }
}

impl<T> Natural for T where
    T: Num
        + CheckedAdd
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + Clone
        + Ord
        + Hash
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn fixed_width_overflow_is_an_error() {
        assert!(matches!(u8::MAX.add_checked(&1), Err(Error::Overflow)));
        assert!(matches!(u64::MAX.mul_checked(&2), Err(Error::Overflow)));
    }

    #[test]
    fn bigint_does_not_overflow() {
        let big = BigUint::from(u64::MAX);
        let sq = big.mul_checked(&big).unwrap();
        assert!(sq > big);
    }

    #[test]
    fn monus_truncates() {
        assert_eq!(5u64.monus(&3), 2);
        assert_eq!(3u64.monus(&5), 0);
    }

    #[test]
    fn booleans() {
        assert_eq!(0u64.as_bool(), Some(false));
        assert_eq!(1u64.as_bool(), Some(true));
        assert_eq!(7u64.as_bool(), None);
    }

    #[test]
    fn decimal_parsing_respects_width() {
        assert_eq!(u8::parse_decimal("255"), Some(255));
        assert_eq!(u8::parse_decimal("256"), None);
        assert!(BigUint::parse_decimal("123456789012345678901234567890").is_some());
    }
}
