//! Exchange structure functions: products of Gamma functions, linear factors
//! and constants in the variable `x = i(u−v)/ℏ`.
//!
//! A [`StructureFunction`] is
//!
//! ```text
//! coeff · e^{iπ·phase} · ∏ base^{e} · ∏_p p^{κ_p·x} · ∏ (x + a)^n · ∏ Γ(x/s + b)^m
//! ```
//!
//! with Gaussian-rational `coeff`, `κ_p`, `a`, `s` and rational `b`, `e`.
//! Factors are stored in ordered maps, so products merge equal factors and
//! drop zero exponents automatically. [`StructureFunction::canonical`] further
//! lifts every Gamma factor to a common scale by the Gauss multiplication
//! formula and reduces shifts into `[0, 1)`, which makes equality of
//! functions a structural comparison.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{factor_positive_rational, fmt_q, q_to_f64, qi, GaussQ, Q};
use crate::specfun::log_gamma;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    TwoPi,
    Hbar,
    Prime(u64),
}

impl Base {
    fn ln(&self, hbar: f64) -> f64 {
        match self {
            Base::TwoPi => (2.0 * PI).ln(),
            Base::Hbar => hbar.ln(),
            Base::Prime(p) => (*p as f64).ln(),
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::TwoPi => write!(f, "(2π)"),
            Base::Hbar => write!(f, "ℏ"),
            Base::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// `Γ(x/scale + shift)^exponent`, `x = i(u−v)/ℏ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GammaFactor {
    pub scale: GaussQ,
    pub shift: Q,
    pub exponent: i32,
}

/// A zero or pole of a structure function, located at `w = location · ℏ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Singularity {
    pub location: GaussQ,
    /// Positive for zeros, negative for poles.
    pub order: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureFunction {
    pub coeff: GaussQ,
    /// Overall `e^{iπ·phase}`.
    pub phase: Q,
    pub powers: BTreeMap<Base, Q>,
    /// `p ↦ κ_p` for a factor `exp(κ_p · x · ln p)`.
    pub exp_linear: BTreeMap<u64, GaussQ>,
    /// `a ↦ n` for `(x + a)^n`.
    pub linear: BTreeMap<GaussQ, i32>,
    /// `(s, b) ↦ m` for `Γ(x/s + b)^m`.
    pub gamma: BTreeMap<(GaussQ, Q), i32>,
}

fn bump<K: Ord>(map: &mut BTreeMap<K, i32>, key: K, n: i32) {
    let e = map.entry(key).or_insert(0);
    *e += n;
    map.retain(|_, v| *v != 0);
}

fn bump_q<K: Ord>(map: &mut BTreeMap<K, Q>, key: K, v: &Q) {
    let e = map.entry(key).or_insert_with(Q::zero);
    *e += v;
    map.retain(|_, v| !v.is_zero());
}

fn bump_g<K: Ord>(map: &mut BTreeMap<K, GaussQ>, key: K, v: &GaussQ) {
    let e = map.entry(key).or_insert_with(GaussQ::zero);
    *e += v;
    map.retain(|_, v| !v.is_zero());
}

fn c(z: &GaussQ) -> Complex64 {
    z.to_c64()
}

impl Default for StructureFunction {
    fn default() -> Self {
        Self::one()
    }
}

impl StructureFunction {
    pub fn one() -> Self {
        Self::scalar(GaussQ::one())
    }

    pub fn scalar(coeff: GaussQ) -> Self {
        Self {
            coeff,
            phase: Q::zero(),
            powers: BTreeMap::new(),
            exp_linear: BTreeMap::new(),
            linear: BTreeMap::new(),
            gamma: BTreeMap::new(),
        }
    }

    pub fn gamma_factor(scale: GaussQ, shift: Q, exponent: i32) -> Self {
        let mut out = Self::one();
        out.mul_gamma(scale, shift, exponent);
        out
    }

    pub fn linear_factor(shift: GaussQ, exponent: i32) -> Self {
        let mut out = Self::one();
        out.mul_linear(shift, exponent);
        out
    }

    pub fn mul_gamma(&mut self, scale: GaussQ, shift: Q, exponent: i32) {
        assert!(!scale.is_zero(), "Gamma scale must be non-zero");
        bump(&mut self.gamma, (scale, shift), exponent);
    }

    pub fn mul_linear(&mut self, shift: GaussQ, exponent: i32) {
        bump(&mut self.linear, shift, exponent);
    }

    pub fn mul_power(&mut self, base: Base, exponent: &Q) {
        bump_q(&mut self.powers, base, exponent);
    }

    /// Multiply by `r^{exponent}` for a positive rational `r`.
    pub fn mul_rational_power(&mut self, r: &Q, exponent: &Q) {
        for (p, e) in factor_positive_rational(r) {
            self.mul_power(Base::Prime(p), &(exponent * qi(e)));
        }
    }

    /// Multiply by `r^{κ·x}` for a positive rational `r`.
    pub fn mul_exp_linear(&mut self, r: &Q, kappa: &GaussQ) {
        for (p, e) in factor_positive_rational(r) {
            bump_g(&mut self.exp_linear, p, &kappa.scale(&qi(e)));
        }
    }

    pub fn mul_coeff(&mut self, c: &GaussQ) {
        self.coeff = &self.coeff * c;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.coeff = &self.coeff * &other.coeff;
        out.phase = &self.phase + &other.phase;
        for (b, e) in &other.powers {
            bump_q(&mut out.powers, b.clone(), e);
        }
        for (p, k) in &other.exp_linear {
            bump_g(&mut out.exp_linear, *p, k);
        }
        for (a, n) in &other.linear {
            bump(&mut out.linear, a.clone(), *n);
        }
        for (key, n) in &other.gamma {
            bump(&mut out.gamma, key.clone(), *n);
        }
        out
    }

    pub fn inv(&self) -> Self {
        Self {
            coeff: self.coeff.inv(),
            phase: -self.phase.clone(),
            powers: self.powers.iter().map(|(b, e)| (b.clone(), -e.clone())).collect(),
            exp_linear: self.exp_linear.iter().map(|(p, k)| (*p, -k)).collect(),
            linear: self.linear.iter().map(|(a, n)| (a.clone(), -n)).collect(),
            gamma: self.gamma.iter().map(|(k, n)| (k.clone(), -n)).collect(),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    /// The function `w ↦ S(−w)`.
    pub fn reflect(&self) -> Self {
        let mut out = Self::scalar(self.coeff.clone());
        out.phase = self.phase.clone();
        out.powers = self.powers.clone();
        out.exp_linear = self.exp_linear.iter().map(|(p, k)| (*p, -k)).collect();
        for (a, n) in &self.linear {
            if n % 2 != 0 {
                out.coeff = -out.coeff;
            }
            bump(&mut out.linear, -a, *n);
        }
        for ((s, b), n) in &self.gamma {
            bump(&mut out.gamma, (-s, b.clone()), *n);
        }
        out
    }

    /// The function obtained by substituting `ℏ → −iℏ`.
    pub fn wick_rotate(&self) -> Self {
        let i = GaussQ::i();
        let minus_i = -&i;
        let mut out = Self::scalar(self.coeff.clone());
        out.phase = self.phase.clone();
        for (b, e) in &self.powers {
            if *b == Base::Hbar {
                out.phase -= e / qi(2);
            }
            bump_q(&mut out.powers, b.clone(), e);
        }
        out.exp_linear = self.exp_linear.iter().map(|(p, k)| (*p, k * &i)).collect();
        for (a, n) in &self.linear {
            out.coeff = &out.coeff * &GaussQ::i_pow(*n as i64);
            bump(&mut out.linear, a * &minus_i, *n);
        }
        for ((s, b), n) in &self.gamma {
            bump(&mut out.gamma, (s * &minus_i, b.clone()), *n);
        }
        out
    }

    pub fn has_gamma(&self) -> bool {
        !self.gamma.is_empty()
    }

    pub fn gamma_factors(&self) -> Vec<GammaFactor> {
        self.gamma
            .iter()
            .map(|((s, b), n)| GammaFactor {
                scale: s.clone(),
                shift: b.clone(),
                exponent: *n,
            })
            .collect()
    }

    /// `shift ↦ exponent` for the Gamma factors of one real scale.
    pub fn gamma_multiset(&self, scale: &Q) -> BTreeMap<Q, i32> {
        let s = GaussQ::real(scale.clone());
        self.gamma
            .iter()
            .filter(|((sc, _), _)| *sc == s)
            .map(|((_, b), n)| (b.clone(), *n))
            .collect()
    }

    /// Every Gamma factor rewritten at a common scale per direction, shifts
    /// reduced into `[0, 1)`, integer constant powers folded into `coeff`.
    pub fn canonical(&self) -> Self {
        let mut out = Self::scalar(self.coeff.clone());
        out.phase = self.phase.clone();
        out.powers = self.powers.clone();
        out.exp_linear = self.exp_linear.clone();
        out.linear = self.linear.clone();

        // lift to the least common scale within each direction class
        let mut classes: Vec<(GaussQ, Vec<(Q, Q, i32)>)> = Vec::new();
        for ((s, b), n) in &self.gamma {
            let slot = classes.iter_mut().find(|(rep, _)| {
                let r = s / rep;
                r.im.is_zero() && r.re.is_positive()
            });
            match slot {
                Some((rep, members)) => {
                    let r = (s / &*rep).re;
                    members.push((r, b.clone(), *n));
                }
                None => classes.push((s.clone(), vec![(Q::one(), b.clone(), *n)])),
            }
        }
        let mut lifted: BTreeMap<(GaussQ, Q), i32> = BTreeMap::new();
        for (rep, members) in classes {
            let num_lcm = members.iter().fold(BigInt::one(), |acc, (r, _, _)| acc.lcm(r.numer()));
            let den_gcd = members
                .iter()
                .fold(BigInt::zero(), |acc, (r, _, _)| acc.gcd(r.denom()));
            let top = Q::new(num_lcm, den_gcd);
            let s_star = rep.scale(&top);
            for (r, b, n) in members {
                let m = (&top / &r).to_integer().to_i64().expect("scale multiplier overflow");
                let mq = qi(m);
                if m > 1 {
                    // Γ(m z) = (2π)^{(1−m)/2} m^{m z − 1/2} ∏_j Γ(z + j/m)
                    let nq = qi(n as i64);
                    out.mul_power(Base::TwoPi, &(&nq * (Q::one() - &mq) / qi(2)));
                    out.mul_rational_power(&mq, &(&nq * (&b - Q::new(1.into(), 2.into()))));
                    let kappa = GaussQ::real(&nq * &mq) / s_star.clone();
                    out.mul_exp_linear(&mq, &kappa);
                }
                for j in 0..m {
                    bump(&mut lifted, (s_star.clone(), (&b + qi(j)) / &mq), n);
                }
            }
        }

        // shifts into [0, 1); the leftover factors are linear in x/s
        for ((s, b), n) in lifted {
            let fl = b.floor();
            let frac = &b - &fl;
            let steps = fl.to_integer().to_i64().expect("shift overflow");
            let inv_s = s.inv();
            let mut push_linear = |offset: &Q, sign: i32| {
                // (x/s + offset) = (1/s)(x + s·offset)
                out.coeff = &out.coeff * &inv_s.pow((sign * n) as i64);
                bump(&mut out.linear, s.scale(offset), sign * n);
            };
            if steps > 0 {
                for j in 0..steps {
                    push_linear(&(&frac + qi(j)), 1);
                }
            } else {
                for j in 0..(-steps) {
                    push_linear(&(&b + qi(j)), -1);
                }
            }
            bump(&mut out.gamma, (s, frac), n);
        }

        // constants
        let mut folded = BTreeMap::new();
        for (b, e) in std::mem::take(&mut out.powers) {
            if let Base::Prime(p) = b {
                let whole = e.floor();
                let w = whole.to_integer().to_i64().expect("exponent overflow");
                out.coeff = &out.coeff * &GaussQ::int(p as i64).pow(w);
                let rest = &e - &whole;
                if !rest.is_zero() {
                    folded.insert(b, rest);
                }
            } else {
                folded.insert(b, e);
            }
        }
        out.powers = folded;
        let two = qi(2);
        let mut ph = &out.phase - (&out.phase / &two).floor() * &two;
        let doubled = &ph * &two;
        if doubled.is_integer() {
            out.coeff = &out.coeff * &GaussQ::i_pow(doubled.to_integer().to_i64().unwrap());
            ph = Q::zero();
        }
        out.phase = ph;
        out
    }

    /// Symbolic test for the constant function 1.
    pub fn is_identity(&self) -> bool {
        let c = self.canonical();
        c.coeff.is_one()
            && c.phase.is_zero()
            && c.powers.is_empty()
            && c.exp_linear.is_empty()
            && c.linear.is_empty()
            && c.gamma.is_empty()
    }

    pub fn same_function(&self, other: &Self) -> bool {
        self.div(other).is_identity()
    }

    /// `ln S(w)` on some branch; `exp` of it is the value.
    pub fn ln_eval(&self, w: Complex64, hbar: f64) -> Result<Complex64> {
        if self.coeff.is_zero() {
            return Err(Error::NonFinite(Complex64::new(f64::NEG_INFINITY, 0.0)));
        }
        let x = Complex64::i() * w / hbar;
        let mut acc = c(&self.coeff).ln() + Complex64::i() * PI * q_to_f64(&self.phase);
        for (b, e) in &self.powers {
            acc += q_to_f64(e) * b.ln(hbar);
        }
        for (p, k) in &self.exp_linear {
            acc += c(k) * x * (*p as f64).ln();
        }
        for (a, n) in &self.linear {
            let z = x + c(a);
            if z.norm() == 0.0 {
                return Err(Error::UnexpectedPole {
                    location: format!("{w}"),
                    pair: format!("linear factor (x + {a})^{n}"),
                });
            }
            acc += *n as f64 * z.ln();
        }
        for ((s, b), n) in &self.gamma {
            acc += *n as f64 * log_gamma(x / c(s) + q_to_f64(b))?;
        }
        Ok(acc)
    }

    /// Sum of the moduli of the terms of `ln S(w)`; sets the round-off scale
    /// of [`Self::eval`].
    pub fn ln_magnitude(&self, w: Complex64, hbar: f64) -> Result<f64> {
        let x = Complex64::i() * w / hbar;
        let mut acc = c(&self.coeff).norm().ln().abs() + PI * q_to_f64(&self.phase).abs();
        for (b, e) in &self.powers {
            acc += (q_to_f64(e) * b.ln(hbar)).abs();
        }
        for (p, k) in &self.exp_linear {
            acc += (c(k) * x).norm() * (*p as f64).ln();
        }
        for (a, n) in &self.linear {
            acc += (*n as f64).abs() * (x + c(a)).ln().norm();
        }
        for ((s, b), n) in &self.gamma {
            acc += (*n as f64).abs() * log_gamma(x / c(s) + q_to_f64(b))?.norm();
        }
        Ok(acc)
    }

    pub fn eval(&self, w: Complex64, hbar: f64) -> Result<Complex64> {
        if self.coeff.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let v = self.ln_eval(w, hbar)?.exp();
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(v))
        }
    }

    /// Zeros and poles with `|Re w| ≤ re_max·ℏ` and `|Im w| ≤ im_max·ℏ`.
    pub fn singularities(&self, re_max: &Q, im_max: &Q) -> Vec<Singularity> {
        let inside = |z: &GaussQ| z.re.abs() <= *re_max && z.im.abs() <= *im_max;
        let radius = q_to_f64(re_max).hypot(q_to_f64(im_max));
        let mut order: BTreeMap<GaussQ, i32> = BTreeMap::new();
        for (a, n) in &self.linear {
            // x + a = 0  ⇔  w/ℏ = i·a
            let loc = &GaussQ::i() * a;
            if inside(&loc) {
                *order.entry(loc).or_insert(0) += n;
            }
        }
        for ((s, b), n) in &self.gamma {
            // x/s + b = −m  ⇔  w/ℏ = i·s·(b + m)
            let is = &GaussQ::i() * s;
            let size = q_to_f64(&is.norm_sqr()).sqrt();
            let mut m = Q::zero();
            loop {
                let t = b + &m;
                if q_to_f64(&t) * size > radius + 1.0 {
                    break;
                }
                let loc = is.scale(&t);
                if inside(&loc) {
                    *order.entry(loc).or_insert(0) -= n;
                }
                m += Q::one();
            }
        }
        order
            .into_iter()
            .filter(|(_, o)| *o != 0)
            .map(|(location, order)| Singularity { location, order })
            .collect()
    }

    pub fn poles(&self, re_max: &Q, im_max: &Q) -> Vec<Singularity> {
        self.canonical()
            .singularities(re_max, im_max)
            .into_iter()
            .filter(|s| s.order < 0)
            .collect()
    }

    /// Residue in `w` at `w0` by the trapezoid rule on a small circle.
    pub fn residue(&self, w0: Complex64, hbar: f64, radius: f64) -> Result<Complex64> {
        const N: usize = 64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..N {
            let d = Complex64::from_polar(radius, 2.0 * PI * (j as f64 + 0.5) / N as f64);
            acc += self.eval(w0 + d, hbar)? * d;
        }
        Ok(acc / N as f64)
    }
}

impl fmt::Display for StructureFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.coeff.is_one() || self.is_empty_product() {
            parts.push(self.coeff.to_string());
        }
        if !self.phase.is_zero() {
            parts.push(format!("e^(iπ·{})", fmt_q(&self.phase)));
        }
        for (b, e) in &self.powers {
            parts.push(format!("{b}^({})", fmt_q(e)));
        }
        for (p, k) in &self.exp_linear {
            parts.push(format!("{p}^({k}·x)"));
        }
        for (a, n) in &self.linear {
            let base = if a.is_zero() { "x".to_string() } else { format!("(x + {a})") };
            parts.push(if *n == 1 { base } else { format!("{base}^{n}") });
        }
        for ((s, b), n) in &self.gamma {
            let arg = if s.is_one() { "x".to_string() } else { format!("x/{s}") };
            let body = if b.is_zero() {
                format!("Γ({arg})")
            } else if b.is_negative() {
                format!("Γ({arg} - {})", fmt_q(&-b.clone()))
            } else {
                format!("Γ({arg} + {})", fmt_q(b))
            };
            parts.push(if *n == 1 { body } else { format!("{body}^{n}") });
        }
        write!(f, "{}", parts.join(" · "))
    }
}

impl StructureFunction {
    fn is_empty_product(&self) -> bool {
        self.phase.is_zero()
            && self.powers.is_empty()
            && self.exp_linear.is_empty()
            && self.linear.is_empty()
            && self.gamma.is_empty()
    }
}
