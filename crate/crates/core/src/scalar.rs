//! Scalar traits shared by the exact and floating coefficient domains.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};

/// A commutative field usable as a series coefficient.
///
/// Exact inversion is exposed as `checked_inv`; every other operation is
/// total. By-reference compound assignment is required so the
/// multiplication kernels can accumulate without cloning both operands.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + FromPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'r> AddAssign<&'r Self>
    + for<'r> SubAssign<&'r Self>
    + for<'r> MulAssign<&'r Self>
    + Send
    + Sync
{
    /// Multiplicative inverse, `None` for zero.
    fn checked_inv(&self) -> Option<Self>;

    /// `self += a * b`
    #[inline]
    fn add_product(&mut self, a: &Self, b: &Self) {
        let mut t = a.clone();
        t *= b;
        *self += &t;
    }
}

impl Field for BigRational {
    fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Field for f64 {
    fn checked_inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }

    #[inline]
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

/// `n/d` as a big rational. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Text form `num/den`, always with an explicit denominator.
pub fn rational_fraction_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
