//! Exact rational and Gaussian-rational scalars.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn q_to_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

/// Least common multiple of the denominators of `values` (1 for an empty list).
pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Q>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussQ {
    pub re: Q,
    pub im: Q,
}

impl GaussQ {
    pub fn new(re: Q, im: Q) -> Self {
        Self { re, im }
    }

    pub fn real(re: Q) -> Self {
        Self { re, im: Q::zero() }
    }

    pub fn int(n: i64) -> Self {
        Self::real(qi(n))
    }

    pub fn i() -> Self {
        Self::new(Q::zero(), Q::one())
    }

    /// `i^n` for any integer `n`.
    pub fn i_pow(n: i64) -> Self {
        match n.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => Self::int(-1),
            _ => -Self::i(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "inverse of zero Gaussian rational");
        Self::new(&self.re / &n, -&self.im / &n)
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }
}

impl Zero for GaussQ {
    fn zero() -> Self {
        Self::new(Q::zero(), Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussQ {
    fn one() -> Self {
        Self::real(Q::one())
    }
}

impl PartialOrd for GaussQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GaussQ {
    fn cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl From<Q> for GaussQ {
    fn from(value: Q) -> Self {
        Self::real(value)
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_q(&self.re)),
            (true, false) => write!(f, "{}i", fmt_q(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({}{}{}i)", fmt_q(&self.re), sign, fmt_q(&self.im.abs()))
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a> $trait<&'a GaussQ> for &'a GaussQ {
            type Output = GaussQ;
            fn $method(self, rhs: &'a GaussQ) -> GaussQ {
                let f: fn(&GaussQ, &GaussQ) -> GaussQ = $body;
                f(self, rhs)
            }
        }
        impl $trait<GaussQ> for GaussQ {
            type Output = GaussQ;
            fn $method(self, rhs: GaussQ) -> GaussQ {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| GaussQ::new(&a.re + &b.re, &a.im + &b.im));
forward_binop!(Sub, sub, |a, b| GaussQ::new(&a.re - &b.re, &a.im - &b.im));
forward_binop!(Mul, mul, |a, b| GaussQ::new(
    &a.re * &b.re - &a.im * &b.im,
    &a.re * &b.im + &a.im * &b.re
));
forward_binop!(Div, div, |a, b| a * &b.inv());

impl AddAssign<&GaussQ> for GaussQ {
    fn add_assign(&mut self, rhs: &GaussQ) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Neg for GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ::new(-self.re, -self.im)
    }
}

impl Neg for &GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ::new(-self.re.clone(), -self.im.clone())
    }
}

/// Prime factorisation of a positive integer small enough for trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Signed prime exponents of a positive rational: `x = ∏ p^{e_p}`.
pub fn factor_positive_rational(x: &Q) -> Vec<(u64, i64)> {
    assert!(x.is_positive(), "factorisation needs a positive rational");
    let num = x.numer().to_u64().expect("numerator too large to factor");
    let den = x.denom().to_u64().expect("denominator too large to factor");
    let mut out: Vec<(u64, i64)> = factor_u64(num)
        .into_iter()
        .map(|(p, e)| (p, e as i64))
        .collect();
    for (p, e) in factor_u64(den) {
        out.push((p, -(e as i64)));
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_arithmetic() {
        let a = GaussQ::new(q(1, 2), q(3, 1));
        let b = GaussQ::new(q(-2, 1), q(1, 3));
        let p = &a * &b;
        assert_eq!(&p / &b, a);
        assert_eq!(GaussQ::i_pow(3), -GaussQ::i());
        assert_eq!(GaussQ::i_pow(-1), -GaussQ::i());
        assert_eq!((&GaussQ::i() * &GaussQ::i()), GaussQ::int(-1));
    }

    #[test]
    fn rational_factorisation() {
        assert_eq!(factor_positive_rational(&q(12, 5)), vec![(2, 2), (3, 1), (5, -1)]);
        assert!(factor_positive_rational(&q(1, 1)).is_empty());
    }
}
