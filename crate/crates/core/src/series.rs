//! Truncated formal power series in `q` with exponents in `(1/D)Z>=0`.
//!
//! A series of order `N` stores the coefficients of `q^(j/D)` for
//! `0 <= j < N*D` densely; every stored coefficient is exact. Binary
//! operations return the smaller of the two operand orders, so a result
//! never claims more precision than its inputs.

use std::fmt;

use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{Float, FromPrimitive, One, Signed, Zero};
use serde_json::{json, Value};

use crate::field::{Sqrt5, ToReal};
use crate::scalar::{rational_fraction_text, Field};
use crate::{Error, Result};

/// Below this many coefficient slots the Karatsuba kernel falls back to
/// schoolbook multiplication.
pub const KARATSUBA_CUTOFF: usize = 32;

/// Multiplication kernel. Both produce identical coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Kernel {
    Naive,
    #[default]
    Karatsuba,
}

impl Kernel {
    pub fn name(self) -> &'static str {
        match self {
            Kernel::Naive => "naive",
            Kernel::Karatsuba => "karatsuba",
        }
    }
}

impl std::str::FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Kernel::Naive),
            "karatsuba" => Ok(Kernel::Karatsuba),
            other => Err(Error::InvalidArgument(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Outcome of [`Series::compare`].
#[derive(Clone, Debug, PartialEq)]
pub enum Comparison<C> {
    Equal,
    Mismatch { exp: Rational64, lhs: C, rhs: C },
}

impl<C> Comparison<C> {
    pub fn is_equal(&self) -> bool {
        matches!(self, Comparison::Equal)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    den: i64,
    order: Rational64,
    coeffs: Vec<C>,
}

fn slot_count(order: Rational64, den: i64) -> Result<usize> {
    let slots = order * Rational64::from_integer(den);
    if !slots.is_integer() {
        return Err(Error::InvalidArgument(format!(
            "order {order} is not a multiple of 1/{den}"
        )));
    }
    usize::try_from(slots.to_integer())
        .map_err(|_| Error::InvalidArgument(format!("negative order {order}")))
}

fn check_order(order: Rational64) -> Result<()> {
    if order <= Rational64::zero() {
        return Err(Error::InvalidArgument(format!("order must be positive, got {order}")));
    }
    Ok(())
}

impl<C: Field> Series<C> {
    /// Series with the given exponent denominator and dense coefficients;
    /// `coeffs.len()` must equal `order * den`.
    pub fn from_coeffs(den: i64, order: Rational64, coeffs: Vec<C>) -> Result<Self> {
        if den < 1 {
            return Err(Error::InvalidArgument(format!("exponent denominator {den} < 1")));
        }
        check_order(order)?;
        let slots = slot_count(order, den)?;
        if slots != coeffs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients supplied for {slots} slots",
                coeffs.len()
            )));
        }
        Ok(Series { den, order, coeffs })
    }

    /// Integer-exponent series `sum coeffs[n] q^n`, order = `coeffs.len()`.
    pub fn from_integer_coeffs(coeffs: Vec<C>) -> Result<Self> {
        let order = Rational64::from_integer(coeffs.len() as i64);
        Self::from_coeffs(1, order, coeffs)
    }

    pub fn zero(order: Rational64) -> Result<Self> {
        Self::constant(C::zero(), order)
    }

    pub fn one(order: Rational64) -> Result<Self> {
        Self::constant(C::one(), order)
    }

    pub fn constant(c: C, order: Rational64) -> Result<Self> {
        Self::monomial(c, Rational64::zero(), order)
    }

    /// `c * q^exp` truncated at `order`.
    pub fn monomial(c: C, exp: Rational64, order: Rational64) -> Result<Self> {
        check_order(order)?;
        if exp < Rational64::zero() {
            return Err(Error::InvalidArgument(format!("negative exponent {exp}")));
        }
        let den = order.denom().lcm(exp.denom());
        let slots = slot_count(order, den)?;
        let mut coeffs = vec![C::zero(); slots];
        let j = (exp * den).to_integer() as usize;
        if j < slots {
            coeffs[j] = c;
        }
        Ok(Series { den, order, coeffs })
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn order(&self) -> Rational64 {
        self.order
    }

    /// Dense coefficients; slot `j` holds the coefficient of `q^(j/D)`.
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn slot_exponent(&self, j: usize) -> Rational64 {
        Rational64::new(j as i64, self.den)
    }

    /// Coefficient of `q^exp`; zero off the exponent lattice.
    /// Panics if `exp` is outside `[0, order)`.
    pub fn coeff(&self, exp: Rational64) -> C {
        assert!(
            exp >= Rational64::zero() && exp < self.order,
            "exponent {exp} outside [0, {})",
            self.order
        );
        let slot = exp * Rational64::from_integer(self.den);
        if slot.is_integer() {
            self.coeffs[slot.to_integer() as usize].clone()
        } else {
            C::zero()
        }
    }

    /// Nonzero terms as `(exponent, coefficient)`, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (Rational64, &C)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(j, c)| (Rational64::new(j as i64, self.den), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Re-express on the finer lattice `1/den`; `den` must be a multiple
    /// of the current denominator. Lossless.
    pub fn aligned(&self, den: i64) -> Self {
        assert!(den % self.den == 0, "{den} is not a multiple of {}", self.den);
        if den == self.den {
            return self.clone();
        }
        let step = (den / self.den) as usize;
        let mut coeffs = vec![C::zero(); self.coeffs.len() * step];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[j * step] = c.clone();
        }
        Series { den, order: self.order, coeffs }
    }

    /// Drop everything at or above `q^order`.
    pub fn truncate(&self, order: Rational64) -> Result<Self> {
        check_order(order)?;
        if order > self.order {
            return Err(Error::OrderTooSmall { requested: order, available: self.order });
        }
        let den = self.den.lcm(order.denom());
        let mut out = self.aligned(den);
        out.coeffs.truncate(slot_count(order, den)?);
        out.order = order;
        Ok(out)
    }

    /// Common lattice and order for a binary operation.
    fn unify(&self, other: &Self) -> (Self, Self) {
        let den = self.den.lcm(&other.den);
        let order = self.order.min(other.order);
        let mut a = self.aligned(den);
        let mut b = other.aligned(den);
        let slots = slot_count(order, den).expect("order lies on the common lattice");
        a.coeffs.truncate(slots);
        b.coeffs.truncate(slots);
        a.order = order;
        b.order = order;
        (a, b)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.unify(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (mut a, b) = self.unify(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a
    }

    pub fn neg(&self) -> Self {
        Series {
            den: self.den,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = self.clone();
        for x in out.coeffs.iter_mut() {
            *x *= c;
        }
        out
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self, kernel: Kernel) -> Self {
        let (a, b) = self.unify(other);
        let len = a.coeffs.len();
        let coeffs = lattice_product(&a.coeffs, &b.coeffs, len, kernel);
        Series { den: a.den, order: a.order, coeffs }
    }

    /// `self^k`, `k >= 1`, by repeated squaring.
    pub fn pow(&self, k: u32, kernel: Kernel) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("power must be at least 1".into()));
        }
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        let mut e = k;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base, kernel),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base, kernel);
        }
        Ok(acc.expect("k >= 1"))
    }

    /// Reciprocal by long division; the constant term must be nonzero.
    pub fn inv(&self) -> Result<Self> {
        let c0_inv = self
            .coeffs
            .first()
            .and_then(Field::checked_inv)
            .ok_or(Error::NotInvertible)?;
        let support: Vec<usize> = (1..self.coeffs.len())
            .filter(|&k| !self.coeffs[k].is_zero())
            .collect();
        let mut out: Vec<C> = Vec::with_capacity(self.coeffs.len());
        out.push(c0_inv.clone());
        for n in 1..self.coeffs.len() {
            let mut acc = C::zero();
            for &k in support.iter().take_while(|&&k| k <= n) {
                acc.add_product(&self.coeffs[k], &out[n - k]);
            }
            acc *= &c0_inv;
            out.push(-acc);
        }
        Ok(Series { den: self.den, order: self.order, coeffs: out })
    }

    /// `q -> q^k`; the order scales to `k * order`.
    pub fn subst_qk(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("substitution power must be at least 1".into()));
        }
        let k = k as usize;
        let mut coeffs = vec![C::zero(); self.coeffs.len() * k];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[j * k] = c.clone();
        }
        Ok(Series {
            den: self.den,
            order: self.order * Rational64::from_integer(k as i64),
            coeffs,
        })
    }

    /// `q -> -q`; every nonzero coefficient must sit at an integer exponent.
    pub fn subst_negq(&self) -> Result<Self> {
        let mut out = self.clone();
        for (j, c) in out.coeffs.iter_mut().enumerate() {
            if c.is_zero() {
                continue;
            }
            let exp = Rational64::new(j as i64, self.den);
            if !exp.is_integer() {
                return Err(Error::FractionalExponent(exp));
            }
            if exp.to_integer() % 2 == 1 {
                *c = -c.clone();
            }
        }
        Ok(out)
    }

    /// Multiply by `q^r`, `r >= 0`; the order grows by `r`.
    pub fn shift(&self, r: Rational64) -> Result<Self> {
        if r < Rational64::zero() {
            return Err(Error::InvalidArgument(format!("negative shift {r}")));
        }
        let den = self.den.lcm(r.denom());
        let base = self.aligned(den);
        let offset = (r * den).to_integer() as usize;
        let mut coeffs = vec![C::zero(); offset];
        coeffs.extend(base.coeffs);
        Ok(Series { den, order: self.order + r, coeffs })
    }

    /// Divide by `q^r`; everything below `q^r` must vanish. The order drops
    /// by `r`.
    pub fn unshift(&self, r: Rational64) -> Result<Self> {
        if r < Rational64::zero() || r >= self.order {
            return Err(Error::InvalidArgument(format!(
                "cannot divide a series of order {} by q^{r}",
                self.order
            )));
        }
        let den = self.den.lcm(r.denom());
        let base = self.aligned(den);
        let offset = (r * den).to_integer() as usize;
        if let Some(j) = base.coeffs[..offset].iter().position(|c| !c.is_zero()) {
            return Err(Error::InvalidArgument(format!(
                "q^{} has a nonzero coefficient below q^{r}",
                Rational64::new(j as i64, den)
            )));
        }
        Ok(Series { den, order: self.order - r, coeffs: base.coeffs[offset..].to_vec() })
    }

    /// Find the first exponent below `up_to` where the two series differ.
    pub fn compare(&self, other: &Self, up_to: Rational64) -> Result<Comparison<C>> {
        let available = self.order.min(other.order);
        if up_to > available {
            return Err(Error::OrderTooSmall { requested: up_to, available });
        }
        let den = self.den.lcm(&other.den);
        let a = self.aligned(den);
        let b = other.aligned(den);
        let limit = (up_to * den).ceil().to_integer().max(0) as usize;
        for j in 0..limit {
            if a.coeffs[j] != b.coeffs[j] {
                return Ok(Comparison::Mismatch {
                    exp: Rational64::new(j as i64, den),
                    lhs: a.coeffs[j].clone(),
                    rhs: b.coeffs[j].clone(),
                });
            }
        }
        Ok(Comparison::Equal)
    }

    /// In-place multiplication by the sparse polynomial
    /// `sum_i c_i q^(slot_i / D)` (slots on this series' own lattice).
    ///
    /// Terms at slots beyond the truncation simply drop out.
    pub fn mul_sparse_in_place(&mut self, factor: &[(usize, C)]) {
        let len = self.coeffs.len();
        let (constant, rest): (Vec<_>, Vec<_>) = factor.iter().partition(|(s, _)| *s == 0);
        let c0 = constant
            .into_iter()
            .fold(C::zero(), |acc, (_, c)| acc + c.clone());
        let rest: Vec<&(usize, C)> = rest.into_iter().filter(|(s, _)| *s < len).collect();
        for j in (0..len).rev() {
            let mut acc = C::zero();
            acc.add_product(&self.coeffs[j], &c0);
            for (s, c) in rest.iter().filter(|(s, _)| *s <= j) {
                acc.add_product(&self.coeffs[j - s], c);
            }
            self.coeffs[j] = acc;
        }
    }
}

/// First nonzero index and the gcd of the index differences of the support
/// (0 for a single nonzero entry); `None` for an all-zero slice.
fn support_lattice<C: Field>(a: &[C]) -> Option<(usize, usize)> {
    let first = a.iter().position(|c| !c.is_zero())?;
    let stride = a[first + 1..]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(0usize, |g, (i, _)| g.gcd(&(i + 1)));
    Some((first, stride))
}

/// Truncated product of two dense slices, first `len` coefficients.
///
/// Both operands are restricted to the arithmetic progression that carries
/// their support before the kernel runs; theta-type series occupy only a
/// residue class of the lattice.
fn lattice_product<C: Field>(a: &[C], b: &[C], len: usize, kernel: Kernel) -> Vec<C> {
    let mut out = vec![C::zero(); len];
    let (Some((ra, ga)), Some((rb, gb))) = (support_lattice(a), support_lattice(b)) else {
        return out;
    };
    let offset = ra + rb;
    if offset >= len {
        return out;
    }
    let stride = match ga.gcd(&gb) {
        0 => 1,
        g => g,
    };
    let m = (len - offset).div_ceil(stride);
    let pick = |v: &[C], r: usize| -> Vec<C> {
        v[r..].iter().step_by(stride).take(m).cloned().collect()
    };
    let ca = pick(a, ra);
    let cb = pick(b, rb);
    let prod = match kernel {
        Kernel::Naive => mul_naive(&ca, &cb, m),
        Kernel::Karatsuba => mul_karatsuba(&ca, &cb, m),
    };
    for (k, c) in prod.into_iter().enumerate() {
        out[offset + k * stride] = c;
    }
    out
}

/// Schoolbook truncated product: first `len` coefficients of `a*b`.
pub fn mul_naive<C: Field>(a: &[C], b: &[C], len: usize) -> Vec<C> {
    let mut out = vec![C::zero(); len];
    let b_support: Vec<usize> = (0..b.len().min(len)).filter(|&j| !b[j].is_zero()).collect();
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for &j in b_support.iter().take_while(|&&j| i + j < len) {
            out[i + j].add_product(x, &b[j]);
        }
    }
    out
}

/// Karatsuba truncated product: first `len` coefficients of `a*b`.
pub fn mul_karatsuba<C: Field>(a: &[C], b: &[C], len: usize) -> Vec<C> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    let mut full = karatsuba_full(a, b);
    full.resize(len, C::zero());
    full
}

fn naive_full<C: Field>(a: &[C], b: &[C]) -> Vec<C> {
    mul_naive(a, b, a.len() + b.len() - 1)
}

fn add_into<C: Field>(dst: &mut [C], src: &[C]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

fn sub_into<C: Field>(dst: &mut [C], src: &[C]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= s;
    }
}

fn karatsuba_full<C: Field>(a: &[C], b: &[C]) -> Vec<C> {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let n = b.len();
    if n == 0 {
        return Vec::new();
    }
    if n <= KARATSUBA_CUTOFF {
        return naive_full(a, b);
    }
    let mut out = vec![C::zero(); a.len() + n - 1];
    if a.len() > n {
        // unbalanced: slice the long operand into blocks of the short length
        for (idx, chunk) in a.chunks(n).enumerate() {
            let p = karatsuba_full(chunk, b);
            add_into(&mut out[idx * n..], &p);
        }
        return out;
    }
    let m = n.div_ceil(2);
    let (a0, a1) = a.split_at(m);
    let (b0, b1) = b.split_at(m);
    let z0 = karatsuba_full(a0, b0);
    let z2 = karatsuba_full(a1, b1);
    let mut sa = a0.to_vec();
    add_into(&mut sa, a1);
    let mut sb = b0.to_vec();
    add_into(&mut sb, b1);
    let mut z1 = karatsuba_full(&sa, &sb);
    sub_into(&mut z1, &z0);
    sub_into(&mut z1, &z2);
    add_into(&mut out, &z0);
    add_into(&mut out[m..], &z1);
    add_into(&mut out[2 * m..], &z2);
    out
}

impl<T: Field + ToReal> Series<Sqrt5<T>> {
    /// Numeric value of the truncated sum at a real `q > 0`.
    pub fn evaluate<F: Float + FromPrimitive>(&self, q: F) -> F {
        let ln_q = q.ln();
        let den = F::from_i64(self.den).unwrap();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(F::zero(), |acc, (j, c)| {
                let x = (ln_q * F::from_usize(j).unwrap() / den).exp();
                acc + c.embed::<F>() * x
            })
    }
}

fn exponent_text(e: Rational64) -> String {
    if e.is_integer() {
        e.to_integer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

impl Series<Sqrt5<BigRational>> {
    /// Serialization: `{expDen, order, coeffs: [{exp, a, b}]}`, zero
    /// coefficients omitted, exponents ascending.
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .terms()
            .map(|(e, c)| {
                json!({
                    "exp": format!("{}/{}", e.numer(), e.denom()),
                    "a": rational_fraction_text(&c.a),
                    "b": rational_fraction_text(&c.b),
                })
            })
            .collect();
        json!({
            "expDen": self.den,
            "order": format!("{}/{}", self.order.numer(), self.order.denom()),
            "coeffs": coeffs,
        })
    }

    /// True when every coefficient lies in Q.
    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(|c| c.b.is_zero())
    }
}

/// Human-readable `c0 + c1*q + ... + O(q^N)`.
impl fmt::Display for Series<Sqrt5<BigRational>> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let (negative, body) = if c.b.is_zero() {
                (c.a.is_negative(), c.a.abs().to_string())
            } else {
                (false, format!("({c})"))
            };
            let is_unit = body == "1";
            let q_part = if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "q".to_string()
            } else {
                format!("q^{}", exponent_text(e))
            };
            let term = match (q_part.is_empty(), is_unit) {
                (true, _) => body,
                (false, true) => q_part,
                (false, false) => format!("{body}*{q_part}"),
            };
            match (first, negative) {
                (true, true) => write!(f, "-{term}")?,
                (true, false) => write!(f, "{term}")?,
                (false, true) => write!(f, " - {term}")?,
                (false, false) => write!(f, " + {term}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        if self.order == Rational64::from_integer(1) {
            write!(f, " + O(q)")
        } else {
            write!(f, " + O(q^{})", exponent_text(self.order))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{PSeries, K5};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn int(order: usize, terms: &[(usize, i64)]) -> PSeries {
        let mut c = vec![K5::zero(); order];
        for &(j, v) in terms {
            c[j] = K5::integer(v);
        }
        Series::from_integer_coeffs(c).unwrap()
    }

    fn phi5() -> PSeries {
        int(5, &[(0, 1), (1, 2), (4, 2)])
    }

    #[test]
    fn addition() {
        let a = int(3, &[(0, 1), (1, 1)]);
        let b = int(3, &[(0, 1), (1, -1)]);
        assert_eq!(a.add(&b), int(3, &[(0, 2)]));
        assert_eq!(a.add(&PSeries::zero(r(3, 1)).unwrap()), a);
        assert!(phi5().sub(&phi5()).is_zero());
        // order is the minimum
        assert_eq!(a.add(&phi5()).order(), r(3, 1));
    }

    #[test]
    fn products() {
        let a = int(4, &[(0, 1), (1, 1)]);
        let b = int(4, &[(0, 1), (1, -1)]);
        for kernel in [Kernel::Naive, Kernel::Karatsuba] {
            assert_eq!(a.mul(&b, kernel), int(4, &[(0, 1), (2, -1)]));
            // brute-force convolution of 1 + 2q + 2q^4 with itself below q^5
            assert_eq!(phi5().mul(&phi5(), kernel), int(5, &[(0, 1), (1, 4), (2, 4), (4, 4)]));
        }
        assert_eq!(a.pow(2, Kernel::Karatsuba).unwrap(), int(4, &[(0, 1), (1, 2), (2, 1)]));
        assert!(a.pow(0, Kernel::Naive).is_err());
    }

    #[test]
    fn reciprocal() {
        let one_minus_q = int(6, &[(0, 1), (1, -1)]);
        assert_eq!(one_minus_q.inv().unwrap(), int(6, &[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (5, 1)]));
        let chi = int(6, &[(0, 1), (1, 1), (3, 1), (4, 1), (5, 1)]);
        let inv = chi.inv().unwrap();
        // long division by hand: 1 - q + q^2 - 2q^3 + 2q^4 - 3q^5
        assert_eq!(inv, int(6, &[(0, 1), (1, -1), (2, 1), (3, -2), (4, 2), (5, -3)]));
        assert_eq!(chi.mul(&inv, Kernel::Naive), PSeries::one(r(6, 1)).unwrap());
        let no_const = int(4, &[(1, 1), (2, 1)]);
        assert_eq!(no_const.inv(), Err(Error::NotInvertible));
    }

    #[test]
    fn substitutions() {
        let a = int(2, &[(0, 1), (1, 1)]);
        assert_eq!(a.subst_qk(5).unwrap(), int(10, &[(0, 1), (5, 1)]));
        let phi_q5 = phi5().subst_qk(5).unwrap();
        assert_eq!(phi_q5.order(), r(25, 1));
        assert_eq!(phi_q5.coeff(r(20, 1)), K5::integer(2));
        assert_eq!(a.subst_negq().unwrap(), int(2, &[(0, 1), (1, -1)]));
        assert_eq!(phi5().subst_negq().unwrap(), int(5, &[(0, 1), (1, -2), (4, 2)]));
        let half = PSeries::monomial(K5::one(), r(1, 2), r(2, 1)).unwrap();
        assert_eq!(half.subst_negq(), Err(Error::FractionalExponent(r(1, 2))));
    }

    #[test]
    fn shifts() {
        let one = PSeries::one(r(3, 1)).unwrap();
        let s = one.shift(r(1, 2)).unwrap();
        assert_eq!(s.den(), 2);
        assert_eq!(s.order(), r(7, 2));
        assert_eq!(s.coeff(r(1, 2)), K5::one());
        let quarter = one.shift(r(1, 4)).unwrap();
        let sq = quarter.mul(&quarter, Kernel::Karatsuba);
        assert_eq!(sq.compare(&s, r(3, 1)).unwrap(), Comparison::Equal);
        assert_eq!(phi5().shift(r(0, 1)).unwrap(), phi5());
        assert_eq!(s.unshift(r(1, 2)).unwrap().compare(&one, r(3, 1)).unwrap(), Comparison::Equal);
        assert!(s.unshift(r(1, 1)).is_err());
    }

    #[test]
    fn comparisons() {
        let a = int(4, &[(0, 1), (1, 1)]);
        let b = int(4, &[(0, 1), (1, 1), (3, 1)]);
        assert_eq!(a.compare(&b, r(3, 1)).unwrap(), Comparison::Equal);
        let c = int(4, &[(0, 1), (1, -1)]);
        assert_eq!(
            a.compare(&c, r(2, 1)).unwrap(),
            Comparison::Mismatch { exp: r(1, 1), lhs: K5::one(), rhs: -K5::one() }
        );
        assert!(matches!(a.compare(&c, r(5, 1)), Err(Error::OrderTooSmall { .. })));
    }

    #[test]
    fn sparse_factor() {
        let mut s = PSeries::one(r(6, 1)).unwrap();
        s.mul_sparse_in_place(&[(0, K5::one()), (1, K5::integer(-1))]);
        s.mul_sparse_in_place(&[(0, K5::one()), (2, K5::integer(-1))]);
        assert_eq!(s, int(6, &[(0, 1), (1, -1), (2, -1), (3, 1)]));
    }

    #[test]
    fn text_and_json() {
        assert_eq!(phi5().to_string(), "1 + 2*q + 2*q^4 + O(q^5)");
        let j = phi5().to_json();
        assert_eq!(j["expDen"], 1);
        assert_eq!(j["order"], "5/1");
        assert_eq!(j["coeffs"][2]["exp"], "4/1");
        assert_eq!(j["coeffs"][2]["a"], "2/1");
        assert_eq!(j["coeffs"][2]["b"], "0/1");
        assert_eq!(j["coeffs"].as_array().unwrap().len(), 3);
    }

    pub(crate) fn random_series(rng: &mut ChaCha8Rng, len: usize, density: f64) -> PSeries {
        let coeffs = (0..len)
            .map(|_| {
                if rng.gen_bool(density) {
                    K5::from_ratios(
                        (rng.gen_range(-9..10), rng.gen_range(1..5)),
                        (rng.gen_range(-9..10), rng.gen_range(1..5)),
                    )
                } else {
                    K5::zero()
                }
            })
            .collect();
        Series::from_integer_coeffs(coeffs).unwrap()
    }

    #[test]
    fn kernels_agree_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..60 {
            let len = rng.gen_range(1..=160);
            let density = [1.0, 0.5, 0.1][case % 3];
            let a = random_series(&mut rng, len, density);
            let len_b = rng.gen_range(1..=160);
            let b = random_series(&mut rng, len_b, density);
            assert_eq!(a.mul(&b, Kernel::Naive), a.mul(&b, Kernel::Karatsuba), "case {case}");
        }
    }

    #[test]
    fn kernel_handles_quarter_lattice() {
        // residue classes 1 mod 4 times 3 mod 4 land on 0 mod 4
        let mut c = vec![K5::zero(); 40];
        let mut d = vec![K5::zero(); 40];
        for j in (1..40).step_by(4) {
            c[j] = K5::integer(j as i64);
        }
        for j in (3..40).step_by(4) {
            d[j] = K5::sqrt5();
        }
        let a = Series::from_coeffs(4, r(10, 1), c).unwrap();
        let b = Series::from_coeffs(4, r(10, 1), d).unwrap();
        let p = a.mul(&b, Kernel::Karatsuba);
        assert_eq!(p, a.mul(&b, Kernel::Naive));
        let brute: K5 = (0..=8)
            .map(|i| (i, 8 - i))
            .filter(|(i, j)| i % 4 == 1 && j % 4 == 3)
            .fold(K5::zero(), |acc, (i, _)| acc + K5::integer(i) * K5::sqrt5());
        assert_eq!(p.coeff(r(2, 1)), brute);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ring_axioms_at_truncation(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_series(&mut rng, 64, 0.7);
            let y = random_series(&mut rng, 64, 0.7);
            let z = random_series(&mut rng, 64, 0.7);
            let k = Kernel::Karatsuba;
            prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
            prop_assert_eq!(x.mul(&y.add(&z), k), x.mul(&y, k).add(&x.mul(&z, k)));
            prop_assert_eq!(x.mul(&y, k), y.mul(&x, k));
            prop_assert_eq!(x.pow(2, k).unwrap(), x.mul(&x, Kernel::Naive));
        }

        #[test]
        fn reciprocal_contract(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = random_series(&mut rng, 48, 0.6);
            let mut c = x.clone().into_coeffs();
            c[0] = K5::from_ratios((rng.gen_range(1..7), 1), (rng.gen_range(-3..4), 2));
            x = Series::from_integer_coeffs(c).unwrap();
            let one = PSeries::one(x.order()).unwrap();
            prop_assert!(x.mul(&x.inv().unwrap(), Kernel::Karatsuba).compare(&one, x.order()).unwrap().is_equal());
        }

        #[test]
        fn alignment_is_lossless(seed in any::<u64>(), step in 1i64..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_series(&mut rng, 20, 0.5);
            let mut y = x.clone();
            if rng.gen_bool(0.5) {
                let mut c = y.into_coeffs();
                let j = rng.gen_range(0..20);
                c[j] += &K5::one();
                y = Series::from_integer_coeffs(c).unwrap();
            }
            let up_to = x.order();
            let direct = x.compare(&y, up_to).unwrap();
            let aligned = x.aligned(step * 2).compare(&y.aligned(step), up_to).unwrap();
            prop_assert_eq!(direct, aligned);
        }
    }
}
