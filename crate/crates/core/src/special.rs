//! Series constructors for the named q-functions.
//!
//! Every function is evaluated at an argument `x = ±q^k` ([`ArgSpec`]) and
//! truncated at a requested order. Sum forms enumerate the defining series
//! term by term; product forms multiply out the factors one at a time.
//! The two routes share nothing beyond the series storage, so comparing
//! them is a genuine check.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::field::{cos_fifths, cos_tenths, sin_tenths};
use crate::{Error, PSeries, Result, K5};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// The argument `±q^power` of a named function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ArgSpec {
    pub sign: Sign,
    pub power: u32,
}

impl ArgSpec {
    pub fn new(sign: Sign, power: u32) -> Result<Self> {
        if power == 0 {
            return Err(Error::InvalidArgument("argument power must be at least 1".into()));
        }
        Ok(ArgSpec { sign, power })
    }

    /// `q^k`
    pub const fn pos(power: u32) -> Self {
        ArgSpec { sign: Sign::Plus, power }
    }

    /// `-q^k`
    pub const fn neg(power: u32) -> Self {
        ArgSpec { sign: Sign::Minus, power }
    }

    pub const Q: ArgSpec = ArgSpec::pos(1);

    /// `s^e` where `s = ±1` is the sign of the argument.
    fn sign_pow(self, e: i64) -> i64 {
        match self.sign {
            Sign::Minus if e.is_odd() => -1,
            _ => 1,
        }
    }

    fn power(self) -> i64 {
        self.power as i64
    }
}

/// An angle `z = m*pi/10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AngleTenths(pub i64);

/// Sign convention for the denominator sums of the main identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DenominatorVariant {
    /// `sum (-q)^(n(n+1)/2) sin((2n+1) k pi/10)`
    Literal,
    /// `sum (-1)^n (-q)^(n(n+1)/2) sin((2n+1) k pi/10)`, the expansion of
    /// `theta_1(z, i sqrt q)`.
    Signed,
}

/// Which of the two golden-ratio factorizations to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorizationVariant {
    /// `prod_{n odd}(1 + alpha q^n + q^2n) prod_{n even}(1 - beta q^n + q^2n)`
    F1,
    /// `prod_{n odd}(1 + beta q^n + q^2n) prod_{n even}(1 - alpha q^n + q^2n)`
    F2,
}

/// Slot layout for a result of the requested order whose exponents live
/// on `(1/base_den)Z`.
struct Grid {
    den: i64,
    /// slots per `1/base_den` step
    unit: i64,
    slots: usize,
    order: Rational64,
}

impl Grid {
    fn new(order: Rational64, base_den: i64) -> Result<Self> {
        if order <= Rational64::zero() {
            return Err(Error::InvalidArgument(format!("order must be positive, got {order}")));
        }
        let den = base_den.lcm(order.denom());
        let slots = (order * den).to_integer() as usize;
        Ok(Grid { den, unit: den / base_den, slots, order })
    }

    /// Slot of the exponent `units / base_den`, if below the order.
    fn slot(&self, units: i64) -> Option<usize> {
        let s = (units * self.unit) as usize;
        (s < self.slots).then_some(s)
    }

    fn zeros(&self) -> Vec<K5> {
        vec![K5::zero(); self.slots]
    }

    fn finish(&self, coeffs: Vec<K5>) -> PSeries {
        PSeries::from_coeffs(self.den, self.order, coeffs).expect("grid-shaped coefficients")
    }

    fn one(&self) -> PSeries {
        let mut c = self.zeros();
        if self.slots > 0 {
            c[0] = K5::one();
        }
        self.finish(c)
    }
}

fn order_of(order: impl Into<Rational64>) -> Rational64 {
    order.into()
}

fn signed(v: i64) -> K5 {
    K5::integer(v)
}

/// `phi(x) = sum_{n in Z} x^(n^2)`
pub fn phi(arg: ArgSpec, order: impl Into<Rational64>) -> Result<PSeries> {
    let grid = Grid::new(order_of(order), 1)?;
    let mut c = grid.zeros();
    for n in 0i64.. {
        let Some(slot) = grid.slot(arg.power() * n * n) else { break };
        let mult = if n == 0 { 1 } else { 2 };
        c[slot] = signed(mult * arg.sign_pow(n * n));
    }
    Ok(grid.finish(c))
}

/// `psi(x) = sum_{n >= 0} x^(n(n+1)/2)`
pub fn psi(arg: ArgSpec, order: impl Into<Rational64>) -> Result<PSeries> {
    let grid = Grid::new(order_of(order), 1)?;
    let mut c = grid.zeros();
    for n in 0i64.. {
        let t = n * (n + 1) / 2;
        let Some(slot) = grid.slot(arg.power() * t) else { break };
        c[slot] = signed(arg.sign_pow(t));
    }
    Ok(grid.finish(c))
}

/// `f(x)` from the bilateral pentagonal sum, where
/// `f(-q) = sum_{n in Z} (-1)^n q^(n(3n-1)/2)`.
pub fn f_sum(arg: ArgSpec, order: impl Into<Rational64>) -> Result<PSeries> {
    let grid = Grid::new(order_of(order), 1)?;
    let mut c = grid.zeros();
    // f(x) = sum (-1)^n (-x)^p_n, and (-x)^p = (-s)^p q^(k p)
    let neg_arg = ArgSpec {
        sign: match arg.sign {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        },
        power: arg.power,
    };
    for m in 0i64.. {
        let mut placed = false;
        for n in if m == 0 { vec![0] } else { vec![m, -m] } {
            let p = n * (3 * n - 1) / 2;
            if let Some(slot) = grid.slot(arg.power() * p) {
                let sign = if n.is_odd() { -1 } else { 1 };
                c[slot] += &signed(sign * neg_arg.sign_pow(p));
                placed = true;
            }
        }
        if !placed {
            break;
        }
    }
    Ok(grid.finish(c))
}

/// `f(x)` from Euler's product, where `f(-q) = prod_{n >= 1} (1 - q^n)`.
pub fn f_product(arg: ArgSpec, order: impl Into<Rational64>) -> Result<PSeries> {
    let grid = Grid::new(order_of(order), 1)?;
    let mut out = grid.one();
    // f(x) = prod (1 - (-x)^n)
    for n in 1i64.. {
        let Some(slot) = grid.slot(arg.power() * n) else { break };
        let neg_s_pow = if arg.sign == Sign::Plus && n.is_odd() { -1 } else { 1 };
        out.mul_sparse_in_place(&[(0, K5::one()), (slot, signed(-neg_s_pow))]);
    }
    Ok(out)
}

/// `chi(x) = prod_{n >= 0} (1 + x^(2n+1))`
pub fn chi(arg: ArgSpec, order: impl Into<Rational64>) -> Result<PSeries> {
    let grid = Grid::new(order_of(order), 1)?;
    let mut out = grid.one();
    for n in 0i64.. {
        let e = 2 * n + 1;
        let Some(slot) = grid.slot(arg.power() * e) else { break };
        out.mul_sparse_in_place(&[(0, K5::one()), (slot, signed(arg.sign_pow(e)))]);
    }
    Ok(out)
}

fn require_positive_nome(arg: ArgSpec, what: &str) -> Result<()> {
    if arg.sign == Sign::Minus {
        return Err(Error::NotRepresentable(format!(
            "{what} needs (-q^{})^(1/4), which has no power series in q",
            arg.power
        )));
    }
    Ok(())
}

/// Jacobi `theta_j(m*pi/10, x)` from its defining Fourier series.
///
/// `theta_1` and `theta_2` carry exponents `(n + 1/2)^2`, so their series
/// live on the quarter lattice and need a positive argument.
pub fn theta_sum(
    j: u8,
    z: AngleTenths,
    arg: ArgSpec,
    order: impl Into<Rational64>,
) -> Result<PSeries> {
    let order = order_of(order);
    let m = z.0;
    let k = arg.power();
    match j {
        1 | 2 => {
            let what = if j == 1 { "theta1" } else { "theta2" };
            require_positive_nome(arg, what)?;
            let trig = |odd: i64| if j == 1 { sin_tenths(odd * m) } else { cos_tenths(odd * m) };
            // representability of every odd multiple follows from the first one
            trig(1)?;
            let grid = Grid::new(order, 4)?;
            let mut c = grid.zeros();
            for n in 0i64.. {
                let odd = 2 * n + 1;
                let Some(slot) = grid.slot(k * odd * odd) else { break };
                let sign = if j == 1 && n.is_odd() { -2 } else { 2 };
                c[slot] = K5::integer(sign) * trig(odd)?;
            }
            Ok(grid.finish(c))
        }
        3 | 4 => {
            let grid = Grid::new(order, 1)?;
            let mut c = grid.zeros();
            c[0] = K5::one();
            for n in 1i64.. {
                let Some(slot) = grid.slot(k * n * n) else { break };
                let alt = if j == 4 && n.is_odd() { -1 } else { 1 };
                // x^(n^2) = s^n q^(k n^2); cos(2 n z) = cos(n m pi/5)
                c[slot] = K5::integer(2 * alt * arg.sign_pow(n)) * cos_fifths(n * m);
            }
            Ok(grid.finish(c))
        }
        _ => Err(Error::InvalidArgument(format!("theta index {j} is not in 1..=4"))),
    }
}

/// `theta_1` and `theta_3` from their infinite-product expansions:
///
/// `theta_1(z,x) = 2 x^(1/4) sin z prod (1 - x^2n)(1 - 2 x^2n cos 2z + x^4n)`
/// `theta_3(z,x) = prod (1 - x^2n)(1 + 2 x^(2n-1) cos 2z + x^(4n-2))`
pub fn theta_product(
    j: u8,
    z: AngleTenths,
    arg: ArgSpec,
    order: impl Into<Rational64>,
) -> Result<PSeries> {
    let order = order_of(order);
    let m = z.0;
    let k = arg.power();
    let two_cos_2z = K5::integer(2) * cos_fifths(m);
    match j {
        1 => {
            require_positive_nome(arg, "theta1")?;
            let sin_z = sin_tenths(m)?;
            let grid = Grid::new(order, 4)?;
            let mut c = grid.zeros();
            if let Some(slot) = grid.slot(k) {
                c[slot] = K5::integer(2) * sin_z;
            }
            let mut out = grid.finish(c);
            for n in 1i64.. {
                // quarter units: x^2n = q^(2nk) -> 8nk
                let Some(s2) = grid.slot(8 * n * k) else { break };
                out.mul_sparse_in_place(&[(0, K5::one()), (s2, -K5::one())]);
                let mut factor = vec![(0, K5::one()), (s2, -two_cos_2z.clone())];
                if let Some(s4) = grid.slot(16 * n * k) {
                    factor.push((s4, K5::one()));
                }
                out.mul_sparse_in_place(&factor);
            }
            Ok(out)
        }
        3 => {
            let grid = Grid::new(order, 1)?;
            let mut out = grid.one();
            for n in 1i64.. {
                let odd = 2 * n - 1;
                let s_odd = grid.slot(odd * k);
                let s_even = grid.slot(2 * n * k);
                if s_odd.is_none() {
                    break;
                }
                if let Some(s2) = s_even {
                    out.mul_sparse_in_place(&[(0, K5::one()), (s2, -K5::one())]);
                }
                let mut factor = vec![(0, K5::one())];
                if let Some(s1) = s_odd {
                    factor.push((s1, two_cos_2z.clone() * K5::integer(arg.sign_pow(odd))));
                }
                if let Some(s3) = grid.slot(2 * odd * k) {
                    factor.push((s3, K5::one()));
                }
                out.mul_sparse_in_place(&factor);
            }
            Ok(out)
        }
        _ => Err(Error::InvalidArgument(format!(
            "no product expansion implemented for theta{j}"
        ))),
    }
}

/// The denominator sums of the main identity at argument `x`:
/// `sum_{n>=0} [(-1)^n] (-x)^(n(n+1)/2) sin((2n+1) k pi/10)`,
/// with the `(-1)^n` present only in the signed variant.
pub fn denominator_sum(
    k: i64,
    variant: DenominatorVariant,
    arg: ArgSpec,
    order: impl Into<Rational64>,
) -> Result<PSeries> {
    if k.is_even() {
        return Err(Error::NotRepresentable(format!(
            "denominator sum index {k} must be odd"
        )));
    }
    let grid = Grid::new(order_of(order), 1)?;
    let mut c = grid.zeros();
    for n in 0i64.. {
        let t = n * (n + 1) / 2;
        let Some(slot) = grid.slot(arg.power() * t) else { break };
        // (-x)^t = (-s)^t q^(k t)
        let neg_s = match arg.sign {
            Sign::Plus if t.is_odd() => -1,
            _ => 1,
        };
        let alt = match variant {
            DenominatorVariant::Signed if n.is_odd() => -1,
            _ => 1,
        };
        c[slot] = K5::integer(neg_s * alt) * sin_tenths((2 * n + 1) * k)?;
    }
    Ok(grid.finish(c))
}

/// The golden-ratio double products appearing in the factorizations of
/// `phi(q) ± sqrt5 phi(q^5)`.
pub fn factorization_denominator(
    variant: FactorizationVariant,
    order: impl Into<Rational64>,
) -> Result<PSeries> {
    let grid = Grid::new(order_of(order), 1)?;
    let (odd_mid, even_mid) = match variant {
        FactorizationVariant::F1 => (K5::alpha(), -K5::beta()),
        FactorizationVariant::F2 => (K5::beta(), -K5::alpha()),
    };
    let mut out = grid.one();
    for n in 1i64.. {
        let Some(s1) = grid.slot(n) else { break };
        let mid = if n.is_odd() { odd_mid.clone() } else { even_mid.clone() };
        let mut factor = vec![(0, K5::one()), (s1, mid)];
        if let Some(s2) = grid.slot(2 * n) {
            factor.push((s2, K5::one()));
        }
        out.mul_sparse_in_place(&factor);
    }
    Ok(out)
}

/// `q^r` as a series of the given order.
pub fn q_power(r: Rational64, order: impl Into<Rational64>) -> Result<PSeries> {
    PSeries::monomial(K5::one(), r, order.into())
}

/// Constant series.
pub fn constant(c: K5, order: impl Into<Rational64>) -> Result<PSeries> {
    PSeries::constant(c, order.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Comparison;
    use crate::Kernel;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn ints(s: &PSeries) -> Vec<(Rational64, i64)> {
        s.terms()
            .map(|(e, c)| {
                assert!(c.is_rational() && c.a.is_integer(), "non-integer coefficient {c}");
                (e, c.a.to_integer().try_into().unwrap())
            })
            .collect()
    }

    fn at(pairs: &[(i64, i64)]) -> Vec<(Rational64, i64)> {
        pairs.iter().map(|&(e, c)| (r(e, 1), c)).collect()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(ints(&phi(ArgSpec::Q, 5).unwrap()), at(&[(0, 1), (1, 2), (4, 2)]));
        assert_eq!(ints(&phi(ArgSpec::neg(1), 5).unwrap()), at(&[(0, 1), (1, -2), (4, 2)]));
        assert_eq!(ints(&phi(ArgSpec::pos(5), 21).unwrap()), at(&[(0, 1), (5, 2), (20, 2)]));
    }

    #[test]
    fn psi_examples() {
        assert_eq!(ints(&psi(ArgSpec::Q, 7).unwrap()), at(&[(0, 1), (1, 1), (3, 1), (6, 1)]));
        assert_eq!(ints(&psi(ArgSpec::pos(2), 7).unwrap()), at(&[(0, 1), (2, 1), (6, 1)]));
        assert_eq!(psi(ArgSpec::neg(3), 40).unwrap().coeffs()[0], K5::one());
    }

    #[test]
    fn f_examples() {
        assert_eq!(
            ints(&f_sum(ArgSpec::neg(1), 8).unwrap()),
            at(&[(0, 1), (1, -1), (2, -1), (5, 1), (7, 1)])
        );
        let f_q2 = ints(&f_sum(ArgSpec::neg(2), 8).unwrap());
        assert_eq!(&f_q2[..3], &at(&[(0, 1), (2, -1), (4, -1)])[..]);
        assert_eq!(ints(&f_sum(ArgSpec::Q, 4).unwrap()), at(&[(0, 1), (1, 1), (2, -1)]));
        assert_eq!(ints(&f_product(ArgSpec::neg(1), 3).unwrap()), at(&[(0, 1), (1, -1), (2, -1)]));
        assert_eq!(ints(&f_product(ArgSpec::Q, 1).unwrap()), at(&[(0, 1)]));
    }

    #[test]
    fn pentagonal_theorem_all_arguments() {
        for arg in [ArgSpec::Q, ArgSpec::neg(1), ArgSpec::pos(2), ArgSpec::neg(2), ArgSpec::pos(5)] {
            assert_eq!(f_sum(arg, 100).unwrap(), f_product(arg, 100).unwrap(), "{arg:?}");
        }
    }

    #[test]
    fn chi_examples() {
        assert_eq!(
            ints(&chi(ArgSpec::Q, 7).unwrap()),
            at(&[(0, 1), (1, 1), (3, 1), (4, 1), (5, 1), (6, 1)])
        );
        assert_eq!(
            ints(&chi(ArgSpec::pos(5), 21).unwrap()),
            at(&[(0, 1), (5, 1), (15, 1), (20, 1)])
        );
        assert_eq!(chi(ArgSpec::neg(3), 30).unwrap().coeffs()[0], K5::one());
    }

    #[test]
    fn theta_sum_examples() {
        let phi5 = phi(ArgSpec::Q, 5).unwrap();
        assert_eq!(theta_sum(3, AngleTenths(0), ArgSpec::Q, 5).unwrap(), phi5);
        assert_eq!(
            theta_sum(4, AngleTenths(0), ArgSpec::Q, 5).unwrap(),
            phi(ArgSpec::neg(1), 5).unwrap()
        );
        let t1 = theta_sum(1, AngleTenths(1), ArgSpec::Q, 3).unwrap();
        assert_eq!(t1.den(), 4);
        // n = 0 term: 2 q^(1/4) sin(pi/10) = q^(1/4) (sqrt5 - 1)/2
        assert_eq!(t1.terms().next().unwrap(), (r(1, 4), &K5::from_ratios((-1, 2), (1, 2))));
        assert!(matches!(
            theta_sum(2, AngleTenths(1), ArgSpec::Q, 5),
            Err(Error::NotRepresentable(_))
        ));
        assert!(matches!(
            theta_sum(1, AngleTenths(2), ArgSpec::Q, 5),
            Err(Error::NotRepresentable(_))
        ));
        assert!(theta_sum(2, AngleTenths(2), ArgSpec::Q, 5).is_ok());
        assert!(theta_sum(1, AngleTenths(1), ArgSpec::neg(1), 5).is_err());
    }

    #[test]
    fn theta_product_matches_sum() {
        for m in [1, 3, 5, 7] {
            for arg in [ArgSpec::Q, ArgSpec::pos(2)] {
                let s = theta_sum(1, AngleTenths(m), arg, 50).unwrap();
                let p = theta_product(1, AngleTenths(m), arg, 50).unwrap();
                assert_eq!(s.compare(&p, r(50, 1)).unwrap(), Comparison::Equal, "theta1 m={m}");
            }
        }
        for m in [0, 1, 2, 3, 4] {
            for arg in [ArgSpec::Q, ArgSpec::neg(1), ArgSpec::pos(3)] {
                let s = theta_sum(3, AngleTenths(m), arg, 50).unwrap();
                let p = theta_product(3, AngleTenths(m), arg, 50).unwrap();
                assert_eq!(s, p, "theta3 m={m} {arg:?}");
            }
        }
        assert_eq!(theta_product(3, AngleTenths(3), ArgSpec::Q, 10).unwrap().coeffs()[0], K5::one());
    }

    #[test]
    fn theta2_at_zero_is_shifted_psi() {
        let lhs = theta_sum(2, AngleTenths(0), ArgSpec::Q, 60).unwrap();
        let rhs = psi(ArgSpec::pos(2), 60)
            .unwrap()
            .scale(&K5::integer(2))
            .shift(r(1, 4))
            .unwrap();
        assert_eq!(lhs.compare(&rhs, r(60, 1)).unwrap(), Comparison::Equal);
    }

    #[test]
    fn denominator_sums() {
        let s = K5::from_ratios((-1, 4), (1, 4));
        let c = K5::from_ratios((1, 4), (1, 4));
        let lit = denominator_sum(1, DenominatorVariant::Literal, ArgSpec::Q, 4).unwrap();
        assert_eq!(lit.coeffs(), &[s.clone(), -c.clone(), K5::zero(), -K5::one()]);
        let sig = denominator_sum(1, DenominatorVariant::Signed, ArgSpec::Q, 4).unwrap();
        assert_eq!(sig.coeffs(), &[s, c.clone(), K5::zero(), -K5::one()]);
        for v in [DenominatorVariant::Literal, DenominatorVariant::Signed] {
            assert_eq!(denominator_sum(3, v, ArgSpec::Q, 3).unwrap().coeffs()[0], c);
        }
        assert!(denominator_sum(2, DenominatorVariant::Literal, ArgSpec::Q, 3).is_err());
    }

    #[test]
    fn factorization_denominators() {
        let f1 = factorization_denominator(FactorizationVariant::F1, 10).unwrap();
        assert_eq!(f1.coeffs()[0], K5::one());
        assert_eq!(f1.coeffs()[1], K5::alpha());
        let f2 = factorization_denominator(FactorizationVariant::F2, 10).unwrap();
        assert_eq!(f2.coeffs()[1], K5::beta());
        // the two are Galois conjugates
        for (x, y) in f1.coeffs().iter().zip(f2.coeffs()) {
            assert_eq!(x.conjugate(), *y);
        }
    }

    #[test]
    fn fractional_orders_and_determinism() {
        let a = phi(ArgSpec::Q, r(7, 2)).unwrap();
        assert_eq!(a.order(), r(7, 2));
        assert_eq!(a.den(), 2);
        assert_eq!(chi(ArgSpec::Q, 40).unwrap(), chi(ArgSpec::Q, 40).unwrap());
        let sq = phi(ArgSpec::Q, 10).unwrap().pow(2, Kernel::Naive).unwrap();
        assert_eq!(sq.coeffs()[5], K5::integer(8));
    }
}
