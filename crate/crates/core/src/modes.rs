//! Exponent coefficient functions of free-field vertex operators.
//!
//! A vertex operator `A(u) = :exp ∫ g(t) a(t) dt:` is described by its mode
//! function `g`, split into the `t > 0` (annihilation) and `t < 0` (creation)
//! branches. Every term of `g` carries the spectral factor `e^{−iut}`, which is
//! left implicit; the remaining dependence is a product of exponentials and
//! hyperbolic sines in `ℏt` with rational slopes, so every branch is a
//! rational function of `ζ = e^{ℏt/L}` on a suitable lattice `L`. That
//! embedding is the canonical form used for exact equality.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::laurent::{Laurent, RatFn};
use crate::rational::{fmt_q, lcm_denominators, q_to_f64, qi, GaussQ, Q};

/// Level `k` (the central element) and deformation parameter `ℏ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraParams {
    pub k: Q,
    pub hbar: Q,
}

impl AlgebraParams {
    pub fn new(k: Q, hbar: Q) -> Result<Self> {
        if k.is_zero() || k == qi(-2) {
            return Err(Error::ExcludedLevel(fmt_q(&k)));
        }
        if !k.is_positive() {
            return Err(Error::InvalidParams(format!("level k = {} must be positive", fmt_q(&k))));
        }
        if !hbar.is_positive() {
            return Err(Error::InvalidParams(format!("hbar = {} must be positive", fmt_q(&hbar))));
        }
        Ok(Self { k, hbar })
    }

    pub fn hbar_f64(&self) -> f64 {
        q_to_f64(&self.hbar)
    }

    pub fn k_f64(&self) -> f64 {
        q_to_f64(&self.k)
    }

    pub fn with_hbar(&self, hbar: Q) -> Result<Self> {
        Self::new(self.k.clone(), hbar)
    }
}

/// `coeff · ℏ^{hbar_pow} · e^{(shift + spectral)ℏt} · ∏ sinh(β ℏt)^{e}`.
///
/// `spectral` records an argument shift `u → u + i·spectral·ℏ`; it acts on
/// the value exactly like `shift` and is kept apart only for bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpTrigTerm {
    pub coeff: GaussQ,
    pub hbar_pow: i32,
    pub shift: Q,
    pub sinh: Vec<(Q, i32)>,
    pub spectral: Q,
}

impl ExpTrigTerm {
    pub fn new(
        coeff: GaussQ,
        hbar_pow: i32,
        shift: Q,
        sinh: Vec<(Q, i32)>,
        spectral: Q,
    ) -> Result<Self> {
        let mut coeff = coeff;
        let mut merged: BTreeMap<Q, i32> = BTreeMap::new();
        for (slope, e) in sinh {
            if e == 0 {
                continue;
            }
            if slope.is_zero() {
                if e < 0 {
                    return Err(Error::NonMeromorphicProduct("sinh(0) in a denominator".into()));
                }
                coeff = GaussQ::zero();
                continue;
            }
            let (slope, flip) = if slope.is_negative() { (-slope, e % 2 != 0) } else { (slope, false) };
            if flip {
                coeff = -coeff;
            }
            *merged.entry(slope).or_insert(0) += e;
        }
        let sinh = merged.into_iter().filter(|(_, e)| *e != 0).collect();
        Ok(Self {
            coeff,
            hbar_pow,
            shift,
            sinh,
            spectral,
        })
    }

    /// Plain `coeff · ℏ^{hbar_pow} · e^{shift ℏt}` with no hyperbolic factors.
    pub fn exponential(coeff: GaussQ, hbar_pow: i32, shift: Q) -> Self {
        Self {
            coeff,
            hbar_pow,
            shift,
            sinh: Vec::new(),
            spectral: Q::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Net exponential slope `shift + spectral`.
    pub fn slope(&self) -> Q {
        &self.shift + &self.spectral
    }

    pub fn scaled(&self, c: &GaussQ) -> Self {
        Self {
            coeff: &self.coeff * c,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut sinh = self.sinh.clone();
        sinh.extend(other.sinh.iter().cloned());
        Self::new(
            &self.coeff * &other.coeff,
            self.hbar_pow + other.hbar_pow,
            &self.shift + &other.shift,
            sinh,
            &self.spectral + &other.spectral,
        )
    }

    /// The term as a function of `−t`, with the spectral shift folded in.
    pub fn reflected(&self) -> Self {
        let odd = self.sinh.iter().map(|(_, e)| e).sum::<i32>() % 2 != 0;
        Self {
            coeff: if odd { -&self.coeff } else { self.coeff.clone() },
            hbar_pow: self.hbar_pow,
            shift: -self.slope(),
            sinh: self.sinh.clone(),
            spectral: Q::zero(),
        }
    }

    /// Numeric value at `t` (the implicit `e^{−iut}` excluded).
    pub fn eval(&self, t: f64, hbar: f64) -> Complex64 {
        let s = hbar * t;
        let mut v = self.coeff.to_c64() * hbar.powi(self.hbar_pow) * (q_to_f64(&self.slope()) * s).exp();
        for (beta, e) in &self.sinh {
            v *= (q_to_f64(beta) * s).sinh().powi(*e);
        }
        v
    }

    fn slopes(&self) -> impl Iterator<Item = Q> + '_ {
        std::iter::once(self.slope()).chain(self.sinh.iter().map(|(b, _)| b.clone()))
    }
}

impl fmt::Display for ExpTrigTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        match self.hbar_pow {
            0 => {}
            1 => write!(f, "·ℏ")?,
            p => write!(f, "·ℏ^{p}")?,
        }
        if !self.shift.is_zero() {
            write!(f, "·e^({}ℏt)", fmt_q(&self.shift))?;
        }
        for (b, e) in &self.sinh {
            write!(f, "·sinh({}ℏt)", fmt_q(b))?;
            if *e != 1 {
                write!(f, "^{e}")?;
            }
        }
        if !self.spectral.is_zero() {
            write!(f, "·[u→u+i({})ℏ]", fmt_q(&self.spectral))?;
        }
        Ok(())
    }
}

/// Exponent coefficient of one oscillator family, split at `t = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeFunction {
    pub var: String,
    pub positive: Vec<ExpTrigTerm>,
    pub negative: Vec<ExpTrigTerm>,
}

impl ModeFunction {
    pub fn zero(var: &str) -> Self {
        Self {
            var: var.to_string(),
            positive: Vec::new(),
            negative: Vec::new(),
        }
    }

    pub fn new(var: &str, positive: Vec<ExpTrigTerm>, negative: Vec<ExpTrigTerm>) -> Self {
        let keep = |v: Vec<ExpTrigTerm>| v.into_iter().filter(|t| !t.is_zero()).collect();
        Self {
            var: var.to_string(),
            positive: keep(positive),
            negative: keep(negative),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    fn same_var(&self, other: &Self) -> Result<()> {
        if self.var != other.var {
            return Err(Error::MixedSpectralArguments(self.var.clone(), other.var.clone()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_var(other)?;
        let mut out = self.clone();
        out.positive.extend(other.positive.iter().cloned());
        out.negative.extend(other.negative.iter().cloned());
        Ok(out)
    }

    pub fn scaled(&self, c: &GaussQ) -> Self {
        let s = |v: &[ExpTrigTerm]| v.iter().map(|t| t.scaled(c)).collect();
        Self::new(&self.var, s(&self.positive), s(&self.negative))
    }

    pub fn negated(&self) -> Self {
        self.scaled(&GaussQ::int(-1))
    }

    /// Same operator at the argument `u + iγℏ`.
    pub fn shift_argument(&self, gamma: &Q) -> Self {
        let s = |v: &[ExpTrigTerm]| {
            v.iter()
                .map(|t| ExpTrigTerm {
                    spectral: &t.spectral + gamma,
                    ..t.clone()
                })
                .collect()
        };
        Self {
            var: self.var.clone(),
            positive: s(&self.positive),
            negative: s(&self.negative),
        }
    }

    pub fn renamed(&self, var: &str) -> Self {
        Self {
            var: var.to_string(),
            ..self.clone()
        }
    }

    /// Pointwise value at `t ≠ 0` (the implicit `e^{−iut}` excluded).
    pub fn eval(&self, t: f64, hbar: f64) -> Complex64 {
        let branch = if t > 0.0 { &self.positive } else { &self.negative };
        branch.iter().map(|term| term.eval(t, hbar)).sum()
    }

    pub fn canonicalize(&self) -> Result<CanonicalMode> {
        Ok(CanonicalMode {
            var: self.var.clone(),
            positive: canonical_branch(&self.positive)?,
            negative: canonical_branch(&self.negative)?,
        })
    }

    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.same_var(other)?;
        Ok(self.canonicalize()? == other.canonicalize()?)
    }
}

impl fmt::Display for ModeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[ExpTrigTerm]| {
            if v.is_empty() {
                "0".to_string()
            } else {
                v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" + ")
            }
        };
        write!(
            f,
            "[{}] t>0: {} | t<0: {}",
            self.var,
            show(&self.positive),
            show(&self.negative)
        )
    }
}

/// One branch per `ℏ` power, each a reduced rational function of `ζ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalMode {
    pub var: String,
    pub positive: BTreeMap<i32, RatFn>,
    pub negative: BTreeMap<i32, RatFn>,
}

impl CanonicalMode {
    pub fn is_zero(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn eval(&self, t: f64, hbar: f64) -> Complex64 {
        let branch = if t > 0.0 { &self.positive } else { &self.negative };
        branch
            .iter()
            .map(|(p, r)| r.eval(hbar * t) * hbar.powi(*p))
            .sum()
    }

    /// Re-reduces every stored quotient; a no-op on canonical input.
    pub fn canonicalize(&self) -> Self {
        let redo = |b: &BTreeMap<i32, RatFn>| {
            b.iter()
                .map(|(p, r)| (*p, r.renormalized()))
                .filter(|(_, r)| !r.is_zero())
                .collect()
        };
        Self {
            var: self.var.clone(),
            positive: redo(&self.positive),
            negative: redo(&self.negative),
        }
    }
}

fn lattice_of(terms: &[ExpTrigTerm]) -> BigInt {
    let slopes: Vec<Q> = terms.iter().flat_map(|t| t.slopes()).collect();
    lcm_denominators(slopes.iter())
}

fn to_lattice_exp(v: &Q, lattice: &BigInt) -> i64 {
    let scaled = v * Q::from_integer(lattice.clone());
    debug_assert!(scaled.is_integer());
    scaled.to_integer().to_i64().expect("lattice exponent overflow")
}

/// Sum of terms as `num / den` Laurent polynomials in `ζ = e^{ℏt/L}`.
pub(crate) fn branch_quotient(terms: &[ExpTrigTerm], lattice: &BigInt) -> (Laurent, Laurent) {
    let mut denom_pow: BTreeMap<Q, i32> = BTreeMap::new();
    for t in terms {
        for (b, e) in &t.sinh {
            if *e < 0 {
                let m = denom_pow.entry(b.clone()).or_insert(0);
                *m = (*m).max(-e);
            }
        }
    }
    let sinh_l = |b: &Q| Laurent::sinh(to_lattice_exp(b, lattice));
    let den = denom_pow
        .iter()
        .fold(Laurent::one(), |acc, (b, m)| acc.mul(&sinh_l(b).pow(*m as u32)));
    let mut num = Laurent::zero();
    for t in terms {
        let mut piece = Laurent::monomial(t.coeff.clone(), to_lattice_exp(&t.slope(), lattice));
        let mut own: BTreeMap<&Q, i32> = BTreeMap::new();
        for (b, e) in &t.sinh {
            own.insert(b, *e);
        }
        for (b, e) in &t.sinh {
            if *e > 0 {
                piece = piece.mul(&sinh_l(b).pow(*e as u32));
            }
        }
        for (b, m) in &denom_pow {
            let here = own.get(b).copied().filter(|e| *e < 0).map(|e| -e).unwrap_or(0);
            piece = piece.mul(&sinh_l(b).pow((*m - here) as u32));
        }
        num = num.add(&piece);
    }
    (num, den)
}

fn canonical_branch(terms: &[ExpTrigTerm]) -> Result<BTreeMap<i32, RatFn>> {
    let mut by_power: BTreeMap<i32, Vec<ExpTrigTerm>> = BTreeMap::new();
    for t in terms.iter().filter(|t| !t.is_zero()) {
        by_power.entry(t.hbar_pow).or_default().push(t.clone());
    }
    let mut out = BTreeMap::new();
    for (p, group) in by_power {
        let lattice = lattice_of(&group);
        let (num, den) = branch_quotient(&group, &lattice);
        let r = RatFn::from_quotient(&num, &den, Q::new(BigInt::one(), lattice));
        if !r.is_zero() {
            out.insert(p, r);
        }
    }
    Ok(out)
}

/// Heisenberg commutator density `[a(t), a(t')] = K(t) δ(t + t')` with
/// `K(t) = sign · sinh(a ℏt) sinh(b ℏt) / (ℏ² t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub name: String,
    pub sign: i32,
    pub slope_a: Q,
    pub slope_b: Q,
    /// Belongs to the sector affected by the Wick rotation.
    pub wick: bool,
}

impl Kernel {
    pub fn c_hat(params: &AlgebraParams) -> Self {
        Self {
            name: "c".into(),
            sign: 1,
            slope_a: qi(1),
            slope_b: &params.k / qi(2),
            wick: true,
        }
    }

    pub fn b_hat(params: &AlgebraParams) -> Self {
        Self {
            name: "b".into(),
            sign: -1,
            slope_a: qi(1),
            slope_b: &params.k / qi(2),
            wick: false,
        }
    }

    pub fn lambda_hat(params: &AlgebraParams) -> Self {
        Self {
            name: "lambda".into(),
            sign: 1,
            slope_a: qi(1),
            slope_b: (&params.k + qi(2)) / qi(2),
            wick: false,
        }
    }

    /// `t · K(t)` as a term: `sign · ℏ^{-2} · sinh(aℏt) sinh(bℏt)`.
    pub fn density(&self) -> ExpTrigTerm {
        ExpTrigTerm::new(
            GaussQ::int(self.sign as i64),
            -2,
            Q::zero(),
            vec![(self.slope_a.clone(), 1), (self.slope_b.clone(), 1)],
            Q::zero(),
        )
        .expect("kernel slopes are non-zero")
    }

    pub fn eval(&self, t: f64, hbar: f64) -> f64 {
        self.density().eval(t, hbar).re / t
    }

    /// `lim_{t→0} K(t)/t`.
    pub fn small_t_coefficient(&self) -> Q {
        qi(self.sign as i64) * &self.slope_a * &self.slope_b
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}sinh({}ℏt)·sinh({}ℏt)/(ℏ²t)",
            self.name,
            if self.sign < 0 { "-" } else { "" },
            fmt_q(&self.slope_a),
            fmt_q(&self.slope_b)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn half() -> Q {
        q(1, 2)
    }

    fn params(k: Q) -> AlgebraParams {
        AlgebraParams::new(k, qi(1)).unwrap()
    }

    fn term(coeff: i64, hp: i32, shift: Q, sinh: Vec<(Q, i32)>) -> ExpTrigTerm {
        ExpTrigTerm::new(GaussQ::int(coeff), hp, shift, sinh, Q::zero()).unwrap()
    }

    #[test]
    fn excluded_levels() {
        assert!(matches!(AlgebraParams::new(qi(0), qi(1)), Err(Error::ExcludedLevel(_))));
        assert!(matches!(AlgebraParams::new(qi(-2), qi(1)), Err(Error::ExcludedLevel(_))));
        assert!(matches!(AlgebraParams::new(qi(-1), qi(1)), Err(Error::InvalidParams(_))));
        assert!(matches!(AlgebraParams::new(qi(1), qi(0)), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn sinh_doubling() {
        let f = ModeFunction::new("u", vec![term(1, 0, Q::zero(), vec![(qi(2), 1), (qi(1), -1)])], vec![]);
        let g = ModeFunction::new(
            "u",
            vec![term(1, 0, qi(1), vec![]), term(1, 0, qi(-1), vec![])],
            vec![],
        );
        assert!(f.equals(&g).unwrap());
    }

    #[test]
    fn sum_with_negation_is_zero() {
        let f = ModeFunction::new(
            "u",
            vec![term(-2, 1, q(1, 4), vec![(q(1, 2), 1), (qi(1), -1)])],
            vec![term(3, 0, Q::zero(), vec![(q(5, 4), -1)])],
        );
        let z = f.add(&f.negated()).unwrap().canonicalize().unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn beta_exponent_is_a_sech() {
        // −2ℏ sinh(ℏt/2)/sinh(ℏt) = −ℏ / cosh(ℏt/2) = −2ℏ ζ/(ζ²+1), ζ = e^{ℏt/2}
        let f = ModeFunction::new("u", vec![term(-2, 1, Q::zero(), vec![(half(), 1), (qi(1), -1)])], vec![]);
        let c = f.canonicalize().unwrap();
        let r = &c.positive[&1];
        assert_eq!(r.base, half());
        assert_eq!(r.shift, 1);
        assert_eq!(r.num.coeffs(), &[GaussQ::int(-2)]);
        assert_eq!(r.den.coeffs(), &[GaussQ::one(), GaussQ::zero(), GaussQ::one()]);
        for i in 0..20 {
            let t = 0.13 + 0.37 * i as f64;
            let hbar = 0.7;
            let direct = f.eval(t, hbar);
            let sech = -hbar / (0.5 * hbar * t).cosh();
            assert!((direct - sech).norm() <= 1e-12 * sech.abs());
            assert!((c.eval(t, hbar) - direct).norm() <= 1e-12 * direct.norm());
        }
        assert_eq!(c.canonicalize(), c);
    }

    #[test]
    fn shift_argument_is_additive() {
        let f = ModeFunction::new("u", vec![term(-2, 1, Q::zero(), vec![(half(), 1), (qi(1), -1)])], vec![]);
        assert_eq!(f.shift_argument(&Q::zero()), f);
        let a = q(3, 4);
        let b = q(-7, 8);
        let two = f.shift_argument(&a).shift_argument(&b);
        let one = f.shift_argument(&(&a + &b));
        assert!(two.equals(&one).unwrap());
        // folding the spectral shift into the e^{αℏt} factor gives the same function
        let folded = ModeFunction::new(
            "u",
            vec![term(-2, 1, &a + &b, vec![(half(), 1), (qi(1), -1)])],
            vec![],
        );
        assert!(one.equals(&folded).unwrap());
    }

    #[test]
    fn mixed_variables_are_rejected() {
        let f = ModeFunction::new("u", vec![term(1, 0, Q::zero(), vec![])], vec![]);
        let g = f.renamed("v");
        assert!(matches!(f.add(&g), Err(Error::MixedSpectralArguments(_, _))));
        assert!(matches!(f.equals(&g), Err(Error::MixedSpectralArguments(_, _))));
    }

    #[test]
    fn kernels_are_odd_with_linear_start() {
        for k in [qi(1), qi(2), qi(3), q(5, 2)] {
            let p = params(k);
            for ker in [Kernel::c_hat(&p), Kernel::b_hat(&p), Kernel::lambda_hat(&p)] {
                let d = ker.density();
                let even = ModeFunction::new("t", vec![d.clone()], vec![]);
                let mirrored = ModeFunction::new("t", vec![d.reflected()], vec![]);
                assert!(even.equals(&mirrored).unwrap(), "density of {ker} must be even");
                for t in [0.3, 1.7] {
                    assert!((ker.eval(t, 0.9) + ker.eval(-t, 0.9)).abs() < 1e-12);
                }
                let small = ker.eval(1e-6, 1.0) / 1e-6;
                let want = q_to_f64(&ker.small_t_coefficient());
                assert!((small - want).abs() < 1e-6 * want.abs().max(1.0));
            }
        }
    }
}
