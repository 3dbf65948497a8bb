//! Floating-point evaluation of the same functions, for the complex-nome
//! steps that have no exact counterpart and as an independent oracle for
//! the exact series.
//!
//! Everything is generic over the real type; the crate default is the
//! double-double [`crate::Real`] (about 31 significant digits).
//!
//! Nomes are handled through their logarithm: a nome `e^(i pi c) q^a`
//! raised to a rational power `x` is `e^(i pi c x) q^(a x)`, where `q^y`
//! uses the principal logarithm of the sample point `q` once. Taking the
//! principal branch of each transformed nome separately (e.g. of `i q`)
//! would break the theta transformation identities.

use std::fmt::Debug;

use num_complex::Complex;
use num_rational::{BigRational, Rational64};
use num_traits::{Float, FloatConst, FromPrimitive, One, ToPrimitive, Zero};

use crate::field::{cos_fifths, cos_tenths, sin_tenths, Sqrt5};
use crate::{Error, Result};

/// Real scalar for the numeric backend.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {}

impl<T: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static> Real for T {}

/// Terms whose magnitude falls below `e^-UNDERFLOW_LOG` are dropped.
const UNDERFLOW_LOG: f64 = 700.0;

fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite")
}

fn k5<T: Real>(x: &Sqrt5<BigRational>) -> T {
    x.embed::<T>()
}

/// Principal square root, argument in `(-pi/2, pi/2]`.
pub fn principal_sqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let two = real::<T>(2.0);
    if z.im.is_zero() {
        return if z.re >= T::zero() {
            Complex::new(z.re.sqrt(), T::zero())
        } else {
            Complex::new(T::zero(), (-z.re).sqrt())
        };
    }
    let modulus = z.re.hypot(z.im);
    let re = ((modulus + z.re) / two).sqrt();
    let im = ((modulus - z.re) / two).sqrt();
    Complex::new(re, if z.im < T::zero() { -im } else { im })
}

/// `e^(i pi r)` for rational `r`; dyadic denominators go through an exact
/// square-root chain from `-1`, anything else through `cos`/`sin`.
pub fn unit_root<T: Real>(r: Rational64) -> Complex<T> {
    let d = *r.denom();
    let p = r.numer().rem_euclid(2 * d);
    if (d as u64).is_power_of_two() {
        let mut base = Complex::new(-T::one(), T::zero());
        let mut dd = 1;
        while dd < d {
            base = principal_sqrt(base);
            dd *= 2;
        }
        base.powu(p as u32)
    } else {
        let angle = T::PI() * real::<T>(p as f64) / real::<T>(d as f64);
        Complex::new(angle.cos(), angle.sin())
    }
}

/// A sample point `q` with its principal dyadic roots cached.
#[derive(Clone, Debug)]
pub struct NomeSample<T> {
    q: Complex<T>,
    /// `roots[m] = q^(1/2^m)` on the principal branch
    roots: Vec<Complex<T>>,
    ln_abs: f64,
}

const ROOT_LEVELS: usize = 6;

impl<T: Real> NomeSample<T> {
    pub fn new(q: Complex<T>) -> Result<Self> {
        let abs = q.norm().to_f64().unwrap_or(f64::NAN);
        if !(abs > 0.0 && abs <= 0.5) {
            return Err(Error::SampleOutOfRange(abs));
        }
        let mut roots = vec![q];
        for _ in 1..ROOT_LEVELS {
            let last = *roots.last().unwrap();
            roots.push(principal_sqrt(last));
        }
        Ok(NomeSample { q, roots, ln_abs: abs.ln() })
    }

    /// `q = radius * e^(2 pi i turn)`
    pub fn polar(radius: T, turn: Rational64) -> Result<Self> {
        let u = unit_root::<T>(turn * Rational64::from_integer(2));
        Self::new(u * radius)
    }

    pub fn q(&self) -> Complex<T> {
        self.q
    }

    pub fn modulus(&self) -> f64 {
        self.ln_abs.exp()
    }

    /// `q^x` for `x >= 0` with dyadic denominator, principal branch.
    pub fn pow(&self, x: Rational64) -> Complex<T> {
        let d = *x.denom();
        assert!(*x.numer() >= 0, "negative power {x}");
        assert!(
            (d as u64).is_power_of_two() && (d as u64).trailing_zeros() < ROOT_LEVELS as u32,
            "power {x} needs an unsupported root"
        );
        let level = (d as u64).trailing_zeros() as usize;
        self.roots[level].powu(*x.numer() as u32)
    }
}

/// The nome `e^(i pi twist) * q^scale` built on a sample point.
#[derive(Clone, Copy, Debug)]
pub struct Nome<'a, T> {
    pub base: &'a NomeSample<T>,
    pub scale: Rational64,
    pub twist: Rational64,
}

impl<'a, T: Real> Nome<'a, T> {
    pub fn plain(base: &'a NomeSample<T>) -> Self {
        Nome { base, scale: Rational64::one(), twist: Rational64::zero() }
    }

    pub fn scaled(base: &'a NomeSample<T>, scale: Rational64, twist: Rational64) -> Self {
        Nome { base, scale, twist }
    }

    fn log_modulus(&self, x: Rational64) -> f64 {
        (self.scale * x).to_f64().unwrap() * self.base.ln_abs
    }

    /// `nome^x`, or `None` when it underflows.
    pub fn pow(&self, x: Rational64) -> Option<Complex<T>> {
        if self.log_modulus(x) < -UNDERFLOW_LOG {
            return None;
        }
        let mut v = self.base.pow(self.scale * x);
        if !self.twist.is_zero() {
            v = v * unit_root::<T>(self.twist * x);
        }
        Some(v)
    }
}

/// A truncated theta sum together with the magnitude of its last
/// included term (convergence diagnostic).
#[derive(Clone, Copy, Debug)]
pub struct ThetaValue<T> {
    pub value: Complex<T>,
    pub last_term: f64,
}

/// `theta_j(m pi/10, nome)` from the defining Fourier series with `terms`
/// terms (for `theta_3`/`theta_4` the constant 1 plus `terms` more).
pub fn theta<T: Real>(j: u8, m: i64, nome: &Nome<'_, T>, terms: usize) -> Result<ThetaValue<T>> {
    if terms == 0 {
        return Err(Error::InvalidArgument("theta sums need at least one term".into()));
    }
    let two = real::<T>(2.0);
    let mut acc = Complex::<T>::zero();
    let mut last = 0.0;
    match j {
        1 | 2 => {
            for n in 0..terms as i64 {
                let odd = 2 * n + 1;
                let trig = if j == 1 { sin_tenths(odd * m)? } else { cos_tenths(odd * m)? };
                let sign = if j == 1 && n % 2 == 1 { -two } else { two };
                let term = match nome.pow(Rational64::new(odd * odd, 4)) {
                    Some(p) => p * (sign * k5::<T>(&trig)),
                    None => Complex::zero(),
                };
                last = term.norm().to_f64().unwrap();
                acc = acc + term;
            }
        }
        3 | 4 => {
            acc = Complex::one();
            for n in 1..=terms as i64 {
                let sign = if j == 4 && n % 2 == 1 { -two } else { two };
                let term = match nome.pow(Rational64::from_integer(n * n)) {
                    Some(p) => p * (sign * k5::<T>(&cos_fifths(n * m))),
                    None => Complex::zero(),
                };
                last = term.norm().to_f64().unwrap();
                acc = acc + term;
            }
        }
        _ => return Err(Error::InvalidArgument(format!("theta index {j} is not in 1..=4"))),
    }
    Ok(ThetaValue { value: acc, last_term: last })
}

/// `x^e` for real `|x| < 1`, flushing underflow to zero.
fn ipow<T: Real>(x: T, e: i64) -> T {
    if e == 0 {
        return T::one();
    }
    let la = x.abs().to_f64().unwrap().ln() * e as f64;
    if la < -UNDERFLOW_LOG {
        return T::zero();
    }
    x.powi(e as i32)
}

/// `phi(x) = sum_{|n| < terms} x^(n^2)` at real `x`.
pub fn phi_real<T: Real>(x: T, terms: usize) -> T {
    let two = real::<T>(2.0);
    (1..terms as i64).fold(T::one(), |acc, n| acc + two * ipow(x, n * n))
}

/// `psi(x) = sum_{n < terms} x^(n(n+1)/2)`.
pub fn psi_real<T: Real>(x: T, terms: usize) -> T {
    (0..terms as i64).fold(T::zero(), |acc, n| acc + ipow(x, n * (n + 1) / 2))
}

/// `f(x) = sum_{|n| < terms} (-1)^n (-x)^(n(3n-1)/2)`.
pub fn f_real<T: Real>(x: T, terms: usize) -> T {
    let t = terms as i64;
    (-(t - 1)..t).fold(T::zero(), |acc, n| {
        let v = ipow(-x, n * (3 * n - 1) / 2);
        if n % 2 == 0 {
            acc + v
        } else {
            acc - v
        }
    })
}

/// `chi(x) = prod_{n < terms} (1 + x^(2n+1))`.
pub fn chi_real<T: Real>(x: T, terms: usize) -> T {
    (0..terms as i64).fold(T::one(), |acc, n| acc * (T::one() + ipow(x, 2 * n + 1)))
}

/// Denominator sum of the main identity at real `x`; `signed` inserts
/// the extra `(-1)^n`.
pub fn denominator_sum_real<T: Real>(k: i64, signed: bool, x: T, terms: usize) -> Result<T> {
    let mut acc = T::zero();
    for n in 0..terms as i64 {
        let s = k5::<T>(&sin_tenths((2 * n + 1) * k)?);
        let mut v = ipow(-x, n * (n + 1) / 2) * s;
        if signed && n % 2 == 1 {
            v = -v;
        }
        acc = acc + v;
    }
    Ok(acc)
}
