//! Arithmetic in the quadratic field Q(sqrt 5) and the closed-form
//! trigonometric values that live in it.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::scalar::{ratio, Field};
use crate::{Error, Result};

/// `a + b*sqrt(5)` over a base field `T`.
///
/// With `T = BigRational` this is the exact coefficient field of every
/// series in the crate (aliased as [`crate::K5`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Sqrt5<T> {
    pub a: T,
    pub b: T,
}

impl<T> Sqrt5<T> {
    pub const fn new(a: T, b: T) -> Self {
        Sqrt5 { a, b }
    }
}

impl<T: Field> Sqrt5<T> {
    pub fn from_base(a: T) -> Self {
        Sqrt5 { a, b: T::zero() }
    }

    #[allow(clippy::self_named_constructors)]
    pub fn sqrt5() -> Self {
        Sqrt5 { a: T::zero(), b: T::one() }
    }

    /// `a - b*sqrt(5)`
    pub fn conjugate(&self) -> Self {
        Sqrt5 { a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm `a^2 - 5 b^2`.
    pub fn norm(&self) -> T {
        let five = T::from_u8(5).expect("5 is representable");
        self.a.clone() * self.a.clone() - five * self.b.clone() * self.b.clone()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        self.checked_inv().ok_or(Error::DivisionByZero)
    }

    fn times5(x: T) -> T {
        // 5x = 4x + x avoids materialising the constant
        let mut t = x.clone() + x.clone();
        t = t.clone() + t;
        t + x
    }
}

impl<T: Field> Zero for Sqrt5<T> {
    fn zero() -> Self {
        Sqrt5 { a: T::zero(), b: T::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl<T: Field> One for Sqrt5<T> {
    fn one() -> Self {
        Sqrt5 { a: T::one(), b: T::zero() }
    }
}

impl<T: Field> Add for Sqrt5<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

impl<T: Field> Sub for Sqrt5<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= &rhs;
        self
    }
}

impl<T: Field> Mul for Sqrt5<T> {
    type Output = Self;
    fn mul(mut self, rhs: Self) -> Self {
        self *= &rhs;
        self
    }
}

impl<T: Field> Neg for Sqrt5<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Sqrt5 { a: -self.a, b: -self.b }
    }
}

impl<'r, T: Field> AddAssign<&'r Sqrt5<T>> for Sqrt5<T> {
    fn add_assign(&mut self, rhs: &'r Self) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl<'r, T: Field> SubAssign<&'r Sqrt5<T>> for Sqrt5<T> {
    fn sub_assign(&mut self, rhs: &'r Self) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl<'r, T: Field> MulAssign<&'r Sqrt5<T>> for Sqrt5<T> {
    fn mul_assign(&mut self, rhs: &'r Self) {
        if rhs.b.is_zero() {
            self.a *= &rhs.a;
            self.b *= &rhs.a;
            return;
        }
        if self.b.is_zero() {
            let a = self.a.clone();
            self.a = a.clone() * rhs.a.clone();
            self.b = a * rhs.b.clone();
            return;
        }
        let mut aa = self.a.clone();
        aa *= &rhs.a;
        let mut bb = self.b.clone();
        bb *= &rhs.b;
        let mut ab = self.a.clone();
        ab *= &rhs.b;
        let mut ba = self.b.clone();
        ba *= &rhs.a;
        self.a = aa + Self::times5(bb);
        self.b = ab + ba;
    }
}

impl<T: Field> FromPrimitive for Sqrt5<T> {
    fn from_i64(n: i64) -> Option<Self> {
        T::from_i64(n).map(Self::from_base)
    }
    fn from_u64(n: u64) -> Option<Self> {
        T::from_u64(n).map(Self::from_base)
    }
}

impl<T: Field> Field for Sqrt5<T> {
    fn checked_inv(&self) -> Option<Self> {
        if self.b.is_zero() {
            return self.a.checked_inv().map(Self::from_base);
        }
        let n = self.norm().checked_inv()?;
        Some(Sqrt5 { a: self.a.clone() * n.clone(), b: -self.b.clone() * n })
    }

    fn add_product(&mut self, x: &Self, y: &Self) {
        if x.is_zero() || y.is_zero() {
            return;
        }
        let mut t = x.clone();
        t *= y;
        *self += &t;
    }
}

/// Conversion of an exact or floating base value into a real type `F`.
pub trait ToReal {
    fn to_real<F: Float + FromPrimitive>(&self) -> F;
}

impl ToReal for f64 {
    fn to_real<F: Float + FromPrimitive>(&self) -> F {
        F::from_f64(*self).expect("finite f64")
    }
}

impl ToReal for BigRational {
    fn to_real<F: Float + FromPrimitive>(&self) -> F {
        let mut n = self.numer().clone();
        let mut d = self.denom().clone();
        // keep both below the f64 exponent range; relative precision is kept
        const LIMIT: u64 = 900;
        let excess = n.bits().max(d.bits()).saturating_sub(LIMIT);
        if excess > 0 {
            n >>= excess;
            d >>= excess;
            if d.is_zero() {
                return if n.is_negative() { F::neg_infinity() } else { F::infinity() };
            }
        }
        bigint_to_real::<F>(&n) / bigint_to_real::<F>(&d)
    }
}

fn bigint_to_real<F: Float + FromPrimitive>(x: &BigInt) -> F {
    let radix = F::from_u64(1 << 32).unwrap();
    let mut acc = F::zero();
    for digit in x.magnitude().to_u32_digits().iter().rev() {
        acc = acc * radix + F::from_u32(*digit).unwrap();
    }
    if x.is_negative() {
        -acc
    } else {
        acc
    }
}

impl<T: ToReal> Sqrt5<T> {
    /// Real value `a + b*sqrt(5)` at the working precision of `F`.
    pub fn embed<F: Float + FromPrimitive>(&self) -> F {
        let root5 = F::from_u8(5).unwrap().sqrt();
        self.a.to_real::<F>() + self.b.to_real::<F>() * root5
    }
}

impl Sqrt5<BigRational> {
    pub fn rational(n: i64, d: i64) -> Self {
        Sqrt5::from_base(ratio(n, d))
    }

    pub fn from_ratios(a: (i64, i64), b: (i64, i64)) -> Self {
        Sqrt5 { a: ratio(a.0, a.1), b: ratio(b.0, b.1) }
    }

    pub fn integer(n: i64) -> Self {
        Sqrt5::rational(n, 1)
    }

    /// `(1 - sqrt 5)/2`
    pub fn alpha() -> Self {
        Sqrt5::from_ratios((1, 2), (-1, 2))
    }

    /// `(1 + sqrt 5)/2`, the golden ratio.
    pub fn beta() -> Self {
        Sqrt5::from_ratios((1, 2), (1, 2))
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * 5f64.sqrt()
    }
}

/// Canonical text: `a` when the sqrt 5 part is zero, else `a + b*r5`
/// (`a - |b|*r5` for negative `b`).
impl<T> fmt::Display for Sqrt5<T>
where
    T: fmt::Display + PartialOrd + Zero + Neg<Output = T> + Clone,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.b < T::zero() {
            write!(f, "{} - {}*r5", self.a, -self.b.clone())
        } else {
            write!(f, "{} + {}*r5", self.a, self.b)
        }
    }
}

type K5 = Sqrt5<BigRational>;

fn sin_pi_over_10() -> K5 {
    K5::from_ratios((-1, 4), (1, 4))
}

fn sin_3pi_over_10() -> K5 {
    K5::from_ratios((1, 4), (1, 4))
}

/// Exact `sin(k*pi/10)`.
///
/// Only odd `k` and multiples of 5 give values in Q(sqrt 5); any other
/// `k` is rejected with [`Error::NotRepresentable`].
pub fn sin_tenths(k: i64) -> Result<K5> {
    let r = k.rem_euclid(20);
    let (sign, base) = if r < 10 { (1, r) } else { (-1, r - 10) };
    let v = match base {
        0 => K5::zero(),
        1 | 9 => sin_pi_over_10(),
        3 | 7 => sin_3pi_over_10(),
        5 => K5::one(),
        _ => {
            return Err(Error::NotRepresentable(format!(
                "sin({k}*pi/10) is not in Q(sqrt 5)"
            )))
        }
    };
    Ok(if sign < 0 { -v } else { v })
}

/// Exact `cos(n*pi/5)`; defined for every integer `n`.
pub fn cos_fifths(n: i64) -> K5 {
    let cos_pi_5 = K5::from_ratios((1, 4), (1, 4));
    let cos_2pi_5 = K5::from_ratios((-1, 4), (1, 4));
    match n.rem_euclid(10) {
        0 => K5::one(),
        1 | 9 => cos_pi_5,
        2 | 8 => cos_2pi_5,
        3 | 7 => -cos_2pi_5,
        4 | 6 => -cos_pi_5,
        _ => -K5::one(),
    }
}

/// Exact `cos(k*pi/10)`, via `cos(x) = sin(pi/2 - x)`.
pub fn cos_tenths(k: i64) -> Result<K5> {
    sin_tenths(5 - k).map_err(|_| {
        Error::NotRepresentable(format!("cos({k}*pi/10) is not in Q(sqrt 5)"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(a: (i64, i64), b: (i64, i64)) -> K5 {
        K5::from_ratios(a, b)
    }

    #[test]
    fn alpha_beta_relations() {
        assert_eq!(K5::alpha() + K5::beta(), K5::one());
        assert_eq!(K5::alpha() * K5::beta(), -K5::one());
        assert_eq!(K5::beta().inv().unwrap(), -K5::alpha());
        let conj = k((1, 2), (1, 3)) + k((1, 2), (-1, 3));
        assert_eq!(conj, K5::one());
    }

    #[test]
    fn sqrt5_squared_and_inverse() {
        let r5 = K5::sqrt5();
        assert_eq!(r5.clone() * r5.clone(), K5::integer(5));
        assert_eq!(r5.inv().unwrap(), k((0, 1), (1, 5)));
        assert_eq!(K5::one().inv().unwrap(), K5::one());
        assert!(matches!(K5::zero().inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn sine_table() {
        assert_eq!(sin_tenths(5).unwrap(), K5::one());
        assert_eq!(sin_tenths(3).unwrap(), k((1, 4), (1, 4)));
        assert_eq!(sin_tenths(11).unwrap(), k((1, 4), (-1, 4)));
        assert_eq!(sin_tenths(1).unwrap() * sin_tenths(3).unwrap(), K5::rational(1, 4));
        assert!(matches!(sin_tenths(2), Err(Error::NotRepresentable(_))));
        assert!(sin_tenths(20).unwrap().is_zero());
        for k in -60..60 {
            if k % 2 != 0 || k % 5 == 0 {
                let v = sin_tenths(k).unwrap();
                assert_eq!(v, sin_tenths(k + 20).unwrap());
                assert_eq!(-v.clone(), sin_tenths(-k).unwrap());
                let exact = (k as f64 * std::f64::consts::PI / 10.0).sin();
                assert!((v.to_f64() - exact).abs() < 1e-14, "k={k}");
            } else {
                assert!(sin_tenths(k).is_err());
            }
        }
    }

    #[test]
    fn cosine_table() {
        assert_eq!(cos_fifths(0), K5::one());
        assert_eq!(cos_fifths(1), k((1, 4), (1, 4)));
        assert_eq!(cos_fifths(5), -K5::one());
        for n in -30..30 {
            let exact = (n as f64 * std::f64::consts::PI / 5.0).cos();
            assert!((cos_fifths(n).to_f64() - exact).abs() < 1e-14, "n={n}");
            assert_eq!(cos_fifths(n), cos_fifths(-n));
        }
        assert!(cos_tenths(1).is_err());
        assert_eq!(cos_tenths(2).unwrap(), cos_fifths(1));
        assert!(cos_tenths(5).unwrap().is_zero());
    }

    #[test]
    fn embedding() {
        assert_eq!(K5::one().embed::<f64>(), 1.0);
        assert!((K5::beta().embed::<f64>() - 1.618_033_988_749_895).abs() < 1e-15);
        let s: f64 = sin_tenths(1).unwrap().embed();
        assert!((s - 0.309_016_994_374_947_4).abs() < 1e-15);
        let tf: twofloat::TwoFloat = K5::beta().embed();
        let golden = (tf - twofloat::TwoFloat::from(1.0)) * tf;
        assert!((golden - twofloat::TwoFloat::from(1.0)).abs() < twofloat::TwoFloat::from(1e-30));
    }

    #[test]
    fn display_form() {
        assert_eq!(K5::rational(3, 4).to_string(), "3/4");
        assert_eq!(K5::alpha().to_string(), "1/2 - 1/2*r5");
        assert_eq!(K5::sqrt5().to_string(), "0 + 1*r5");
    }

    fn small_rational() -> impl Strategy<Value = BigRational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| ratio(n, d))
    }

    fn k5_value() -> impl Strategy<Value = K5> {
        (small_rational(), small_rational()).prop_map(|(a, b)| Sqrt5::new(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn field_axioms(x in k5_value(), y in k5_value(), z in k5_value()) {
            prop_assert_eq!((x.clone() + y.clone()) + z.clone(), x.clone() + (y.clone() + z.clone()));
            prop_assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
            prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
            prop_assert_eq!(x.clone() * (y.clone() + z.clone()), x.clone() * y.clone() + x.clone() * z.clone());
            prop_assert_eq!(x.clone() - x.clone(), K5::zero());
            if !x.is_zero() {
                prop_assert_eq!(x.clone() * x.inv().unwrap(), K5::one());
                prop_assert!(!x.norm().is_zero());
            }
        }

        #[test]
        fn embed_is_a_ring_map(x in k5_value(), y in k5_value()) {
            let scale = |v: &K5| v.embed::<f64>().abs().max(1.0);
            let lhs = (x.clone() * y.clone()).embed::<f64>();
            let rhs = x.embed::<f64>() * y.embed::<f64>();
            prop_assert!((lhs - rhs).abs() < 1e-12 * scale(&x) * scale(&y));
        }
    }
}
