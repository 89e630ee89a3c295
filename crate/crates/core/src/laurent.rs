//! Laurent polynomials over the Gaussian rationals and reduced quotients of
//! them, used as the canonical form of exponential-trigonometric expressions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::rational::{fmt_q, q_to_f64, GaussQ, Q};

/// `Σ c_j ζ^j` with arbitrary integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Laurent {
    terms: BTreeMap<i64, GaussQ>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: GaussQ, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    pub fn one() -> Self {
        Self::monomial(GaussQ::one(), 0)
    }

    /// `(ζ^m − ζ^{−m}) / 2`, i.e. `sinh(m·s)` for `ζ = e^{s}`.
    pub fn sinh(m: i64) -> Self {
        let half = GaussQ::real(crate::rational::q(1, 2));
        Self::monomial(half.clone(), m).add(&Self::monomial(-half, -m))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &GaussQ)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(*e).or_insert_with(GaussQ::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Self { terms }
    }

    pub fn scale(&self, c: &GaussQ) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out = out.add(&Self::monomial(c1 * c2, e1 + e2));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Split into `ζ^e · P(ζ)` with `P(0) ≠ 0`.
    fn to_poly(&self) -> (i64, Poly) {
        match self.min_exp() {
            None => (0, Poly::zero()),
            Some(low) => {
                let high = *self.terms.keys().next_back().unwrap();
                let mut c = vec![GaussQ::zero(); (high - low + 1) as usize];
                for (e, v) in &self.terms {
                    c[(e - low) as usize] = v.clone();
                }
                (low, Poly::from_coeffs(c))
            }
        }
    }
}

/// Dense polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    c: Vec<GaussQ>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    pub fn from_coeffs(mut c: Vec<GaussQ>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        Self { c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[GaussQ] {
        &self.c
    }

    fn lead(&self) -> &GaussQ {
        self.c.last().expect("leading coefficient of zero polynomial")
    }

    fn scale(&self, s: &GaussQ) -> Self {
        Self::from_coeffs(self.c.iter().map(|v| v * s).collect())
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inv())
    }

    /// Euclidean division `self = q·d + r`.
    fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let inv_lead = d.lead().inv();
        let mut q = vec![GaussQ::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = &r[i + dd] * &inv_lead;
            if coef.is_zero() {
                continue;
            }
            for (j, dj) in d.c.iter().enumerate() {
                r[i + j] = &r[i + j] - &(&coef * dj);
            }
            q[i] = coef;
        }
        (Self::from_coeffs(q), Self::from_coeffs(r))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    fn exact_div(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }
}

/// Reduced quotient `ζ^e · P(ζ) / D(ζ)` with `ζ = e^{base·s}`.
///
/// Canonical: `gcd(P, D) = 1`, `D` monic, `P(0) ≠ 0 ≠ D(0)`, the exponents
/// present in `P`, `D` and `e` have gcd 1, and `base > 0`. The zero function
/// is `P = 0, D = 1, e = 0, base = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    pub base: Q,
    pub shift: i64,
    pub num: Poly,
    pub den: Poly,
}

impl RatFn {
    /// Reduce `ζ^{…}·num/den` with `ζ = e^{base·s}` to canonical form.
    pub fn from_quotient(num: &Laurent, den: &Laurent, base: Q) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (en, pn) = num.to_poly();
        if pn.is_zero() {
            return Self::zero();
        }
        let (ed, pd) = den.to_poly();
        let g = pn.gcd(&pd);
        let mut p = pn.exact_div(&g);
        let mut d = pd.exact_div(&g);
        let lead = d.lead().inv();
        p = p.scale(&lead);
        d = d.scale(&lead);
        let mut out = Self {
            base,
            shift: en - ed,
            num: p,
            den: d,
        };
        out.compress();
        out
    }

    pub fn zero() -> Self {
        Self {
            base: Q::one(),
            shift: 0,
            num: Poly::zero(),
            den: Poly::from_coeffs(vec![GaussQ::one()]),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn compress(&mut self) {
        let mut g = BigInt::from(self.shift.unsigned_abs());
        for poly in [&self.num, &self.den] {
            for (i, c) in poly.c.iter().enumerate() {
                if !c.is_zero() {
                    g = g.gcd(&BigInt::from(i));
                }
            }
        }
        if g.is_zero() {
            // constant
            self.base = Q::one();
            return;
        }
        let g = g.to_usize().expect("lattice gcd overflow");
        if g == 1 {
            return;
        }
        let squeeze = |p: &Poly| -> Poly {
            Poly::from_coeffs(p.c.iter().step_by(g).cloned().collect())
        };
        self.num = squeeze(&self.num);
        self.den = squeeze(&self.den);
        self.shift /= g as i64;
        self.base = &self.base * Q::from_integer(BigInt::from(g));
    }

    /// Re-run the reduction; canonical input comes back unchanged.
    pub fn renormalized(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lift = |p: &Poly, e: i64| {
            p.c.iter()
                .enumerate()
                .fold(Laurent::zero(), |acc, (i, c)| acc.add(&Laurent::monomial(c.clone(), e + i as i64)))
        };
        Self::from_quotient(&lift(&self.num, self.shift), &lift(&self.den, 0), self.base.clone())
    }

    /// Value at `s` (so `ζ = e^{base·s}`).
    pub fn eval(&self, s: f64) -> num_complex::Complex64 {
        let zeta = (q_to_f64(&self.base) * s).exp();
        let horner = |p: &Poly| {
            p.c.iter()
                .rev()
                .fold(num_complex::Complex64::new(0.0, 0.0), |acc, c| acc * zeta + c.to_c64())
        };
        horner(&self.num) / horner(&self.den) * zeta.powi(self.shift as i32)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Poly| {
            let parts: Vec<String> = p
                .c
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| format!("{c}·ζ^{i}"))
                .collect();
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            }
        };
        write!(
            f,
            "ζ^{} [{}] / [{}], ζ = e^({}·ℏt)",
            self.shift,
            show(&self.num),
            show(&self.den),
            fmt_q(&self.base)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn sinh_doubling_reduces_to_cosh() {
        // sinh(2s)/sinh(s) = 2 cosh(s) = ζ + ζ^{-1}
        let r = RatFn::from_quotient(&Laurent::sinh(2), &Laurent::sinh(1), q(1, 1));
        assert_eq!(r.shift, -1);
        assert_eq!(r.num.coeffs(), &[GaussQ::one(), GaussQ::zero(), GaussQ::one()]);
        assert_eq!(r.den.coeffs(), &[GaussQ::one()]);
        assert!((r.eval(0.3) - 2.0 * 0.3f64.cosh()).norm() < 1e-14);
    }

    #[test]
    fn lattice_is_compressed() {
        // sinh(4ζ)/sinh(2ζ) on base 1/2 is sinh(2s)/sinh(s) on base 1
        let a = RatFn::from_quotient(&Laurent::sinh(4), &Laurent::sinh(2), q(1, 2));
        let b = RatFn::from_quotient(&Laurent::sinh(2), &Laurent::sinh(1), q(1, 1));
        assert_eq!(a, b);
        let c = RatFn::from_quotient(&Laurent::sinh(8), &Laurent::sinh(4), q(1, 2));
        assert_eq!(c.base, q(2, 1));
        assert!((c.eval(0.7) - 2.0 * 1.4f64.cosh()).norm() < 1e-12);
    }

    #[test]
    fn cancellation_gives_zero() {
        let f = Laurent::sinh(3);
        let r = RatFn::from_quotient(&f.add(&f.scale(&GaussQ::int(-1))), &Laurent::sinh(1), q(1, 1));
        assert!(r.is_zero());
    }
}
