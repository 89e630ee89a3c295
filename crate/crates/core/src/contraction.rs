//! Pairwise contractions `∫₀^∞ g_A(t) g_B(−t) K(t) e^{−iwt} dt` and the
//! exchange structure functions built from them.
//!
//! The integrand is stored as `P(ℏt)/t`, with `P` a sum of terms
//! `c · e^{α ℏt} / sinh(β ℏt)^m` (numerator hyperbolic sines are expanded into
//! exponentials). The `1/t` tail `L/t` with `L = P(0)` is subtracted against
//! `L·e^{−t}/t`. In closed form, each `1/sinh` term is a geometric series whose
//! regularised logarithmic sum is a Hurwitz zeta derivative, i.e. a log-Gamma.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::modes::{ExpTrigTerm, Kernel, ModeFunction};
use crate::quad::{exp_sinh, DEFAULT_TOL, MAX_NODES};
use crate::rational::{q, q_to_f64, qi, GaussQ, Q};
use crate::series::Series;
use crate::structure::{Base, StructureFunction};

/// Number of Taylor coefficients of `P` used below [`SERIES_CUTOFF`].
const SERIES_ORDER: usize = 16;
/// `β_max·ℏt` below which `P` is summed from its Taylor series.
const SERIES_CUTOFF: f64 = 0.25;

/// One contraction integrand `P(ℏt)/t · e^{−iwt}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionIntegrand {
    /// Terms of `P`; every term has `ℏ`-power 0 and only denominator sinh factors.
    pub terms: Vec<ExpTrigTerm>,
    /// `L = P(0)`, the coefficient of the `1/t` tail.
    pub log_divergence_coeff: GaussQ,
    /// Taylor coefficients of `P` in `τ = ℏt`, starting at `τ^0`.
    taylor: Vec<GaussQ>,
}

fn binomial(n: i32, k: i32) -> i64 {
    (0..k).fold(1i64, |acc, j| acc * (n - j) as i64 / (j + 1) as i64)
}

/// Expand positive powers of sinh into exponentials.
fn expand_numerators(t: &ExpTrigTerm) -> Vec<ExpTrigTerm> {
    let mut out = vec![ExpTrigTerm {
        coeff: t.coeff.clone(),
        hbar_pow: t.hbar_pow,
        shift: t.slope(),
        sinh: t.sinh.iter().filter(|(_, e)| *e < 0).cloned().collect(),
        spectral: Q::zero(),
    }];
    for (beta, e) in t.sinh.iter().filter(|(_, e)| *e > 0) {
        // sinh(βτ)^e = 2^{−e} Σ_j C(e, j) (−1)^j e^{(e−2j)βτ}
        let scale = Q::one() / qi(1i64 << e);
        let mut next = Vec::new();
        for base in &out {
            for j in 0..=*e {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let c = base.coeff.scale(&(&scale * qi(sign * binomial(*e, j))));
                next.push(ExpTrigTerm {
                    coeff: c,
                    shift: &base.shift + beta * qi((*e - 2 * j) as i64),
                    ..base.clone()
                });
            }
        }
        out = next;
    }
    out
}

fn merge_terms(terms: Vec<ExpTrigTerm>) -> Vec<ExpTrigTerm> {
    let mut acc: BTreeMap<(i32, Q, Vec<(Q, i32)>), GaussQ> = BTreeMap::new();
    for t in terms {
        let e = acc.entry((t.hbar_pow, t.shift.clone(), t.sinh.clone())).or_insert_with(GaussQ::zero);
        *e += &t.coeff;
    }
    acc.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((hbar_pow, shift, sinh), coeff)| ExpTrigTerm {
            coeff,
            hbar_pow,
            shift,
            sinh,
            spectral: Q::zero(),
        })
        .collect()
}

/// Taylor coefficients of `Σ terms` from `τ^{low}` on.
fn taylor(terms: &[ExpTrigTerm], order: usize) -> (i64, Vec<GaussQ>) {
    let low = terms
        .iter()
        .map(|t| t.sinh.iter().map(|(_, e)| *e as i64).sum::<i64>())
        .min()
        .unwrap_or(0);
    let mut c = vec![GaussQ::zero(); order + (-low) as usize];
    for t in terms {
        let span = c.len();
        let mut s = Series::exp(&t.shift, span);
        let mut lead = Q::one();
        let mut tl = 0i64;
        for (beta, e) in &t.sinh {
            s = s.mul(&Series::sinhc(beta, span).powi(*e));
            lead *= num_traits::pow::Pow::pow(beta, *e);
            tl += *e as i64;
        }
        for (j, cj) in s.c.iter().enumerate() {
            let idx = (tl - low) as usize + j;
            if idx < span {
                c[idx] += &t.coeff.scale(&(cj * &lead));
            }
        }
    }
    (low, c)
}

/// Wick contraction of the annihilation branch of `f` with the creation
/// branch of `g` over the kernel `kernel`.
pub fn contract(f: &ModeFunction, g: &ModeFunction, kernel: &Kernel) -> Result<ContractionIntegrand> {
    let density = kernel.density();
    let mut raw = Vec::new();
    for a in &f.positive {
        for b in &g.negative {
            let prod = a.mul(&b.reflected())?.mul(&density)?;
            raw.extend(expand_numerators(&prod));
        }
    }
    let terms = merge_terms(raw);
    if let Some(t) = terms.iter().find(|t| t.hbar_pow != 0) {
        return Err(Error::NonMeromorphicProduct(format!(
            "contraction integrand carries ℏ^{} in term {t}",
            t.hbar_pow
        )));
    }
    let (low, c) = taylor(&terms, SERIES_ORDER);
    for (j, cj) in c.iter().enumerate().take((-low) as usize) {
        if !cj.is_zero() {
            return Err(Error::NonMeromorphicProduct(format!(
                "integrand diverges like t^{} at t → 0",
                low + j as i64 - 1
            )));
        }
    }
    let taylor: Vec<GaussQ> = c.into_iter().skip((-low) as usize).collect();
    let log_divergence_coeff = taylor.first().cloned().unwrap_or_else(GaussQ::zero);
    Ok(ContractionIntegrand {
        terms,
        log_divergence_coeff,
        taylor,
    })
}

impl ContractionIntegrand {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `λ` such that the integral converges for `Im(w)/ℏ < −λ`; `None` for a
    /// zero integrand.
    pub fn strip_bound(&self) -> Option<Q> {
        self.terms
            .iter()
            .map(|t| {
                // 1/sinh(βτ)^m decays like e^{−mβτ}
                let decay: Q = t.sinh.iter().map(|(b, e)| b * qi(-(*e as i64))).sum();
                &t.shift - decay
            })
            .max()
    }

    pub fn in_strip(&self, w: Complex64, hbar: f64) -> bool {
        match self.strip_bound() {
            None => true,
            Some(l) => w.im / hbar < -q_to_f64(&l),
        }
    }

    /// Largest slope in the integrand, fixing the radius of the Taylor branch.
    fn series_scale(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| {
                std::iter::once(q_to_f64(&t.shift).abs()).chain(t.sinh.iter().map(|(b, _)| q_to_f64(b)))
            })
            .fold(1.0f64, f64::max)
    }

    /// `P(τ)`, switching to the Taylor series near `τ = 0`.
    fn p_value(&self, tau: f64) -> Complex64 {
        if tau * self.series_scale() < SERIES_CUTOFF {
            return self
                .taylor
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * tau + c.to_c64());
        }
        self.terms.iter().map(|t| term_value(t, tau, Complex64::new(0.0, 0.0))).sum()
    }

    /// Regularised integral `∫₀^∞ [P(ℏt) e^{−iwt} − L e^{−t}]/t dt`.
    pub fn quad_eval(&self, w: Complex64, hbar: f64) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if !self.in_strip(w, hbar) {
            return Err(Error::OutsideConvergenceStrip(
                w,
                -q_to_f64(&self.strip_bound().unwrap()),
            ));
        }
        let l = self.log_divergence_coeff.to_c64();
        let iw = Complex64::i() * w;
        let scale = self.series_scale();
        let integrand = |t: f64| -> Complex64 {
            let tau = hbar * t;
            let main = if tau * scale < SERIES_CUTOFF {
                self.p_value(tau) * (-iw * t).exp()
            } else {
                self.terms.iter().map(|term| term_value(term, tau, -iw * t)).sum()
            };
            (main - l * (-t).exp()) / t
        };
        Ok(exp_sinh(integrand, DEFAULT_TOL, MAX_NODES)?.value)
    }

    /// `S(w) = exp(regularised integral)` as Gamma products.
    pub fn closed_form(&self) -> Result<StructureFunction> {
        let mut sf = StructureFunction::one();
        let mut divergence = GaussQ::zero();
        let mut hbar_linear = GaussQ::zero();
        for t in &self.terms {
            let c = &t.coeff;
            match t.sinh.as_slice() {
                [] => {
                    // −c [ln ℏ + ln(x − α)]
                    let n = integer_exponent(&-c, t)?;
                    sf.mul_linear(GaussQ::real(-t.shift.clone()), n);
                    sf.mul_power(Base::Hbar, &qi(n as i64));
                    divergence += c;
                }
                [(beta, -1)] => {
                    // 2c [ln Γ(a) − ½ ln 2π − (½ − a) ln σ], a = x/(2β) + (β − α)/(2β), σ = 2βℏ
                    let two_c = c.scale(&qi(2));
                    let n = integer_exponent(&two_c, t)?;
                    let two_beta = beta * qi(2);
                    let a0 = (beta - &t.shift) / &two_beta;
                    sf.mul_gamma(GaussQ::real(two_beta.clone()), a0.clone(), n);
                    sf.mul_power(Base::TwoPi, &q(-n as i64, 2));
                    let const_exp = qi(-n as i64) * (q(1, 2) - &a0);
                    sf.mul_power(Base::Hbar, &const_exp);
                    sf.mul_rational_power(&two_beta, &const_exp);
                    let kappa = two_c.scale(&(Q::one() / &two_beta));
                    sf.mul_exp_linear(&two_beta, &kappa);
                    hbar_linear += &kappa;
                    divergence += &two_c.scale(&(q(1, 2) - &a0));
                }
                _ => {
                    return Err(Error::NonTelescoping(format!(
                        "term {t} has more than one reciprocal sinh factor"
                    )))
                }
            }
        }
        if !hbar_linear.is_zero() {
            return Err(Error::NonTelescoping(format!(
                "left-over ℏ^({hbar_linear}·x) factor"
            )));
        }
        if divergence != self.log_divergence_coeff {
            return Err(Error::DivergenceMismatch(
                divergence.to_string(),
                self.log_divergence_coeff.to_string(),
            ));
        }
        Ok(sf)
    }
}

fn integer_exponent(v: &GaussQ, t: &ExpTrigTerm) -> Result<i32> {
    if v.im.is_zero() && v.re.is_integer() {
        if let Some(n) = v.re.to_integer().to_i32() {
            return Ok(n);
        }
    }
    Err(Error::NonTelescoping(format!(
        "term {t} would need the non-integer exponent {v}"
    )))
}

/// `c · e^{ατ + extra} / sinh(βτ)^m` with the reciprocal sinh written as
/// `2 e^{−βτ} / (1 − e^{−2βτ})` to stay finite for large `τ`.
fn term_value(t: &ExpTrigTerm, tau: f64, extra: Complex64) -> Complex64 {
    let mut log = Complex64::new(q_to_f64(&t.shift) * tau, 0.0) + extra;
    for (beta, e) in &t.sinh {
        let b = q_to_f64(beta) * tau;
        let ln_sinh = b + (-(-2.0 * b).exp_m1()).ln() - std::f64::consts::LN_2;
        log += *e as f64 * ln_sinh;
    }
    t.coeff.to_c64() * log.exp()
}

impl std::fmt::Display for ContractionIntegrand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "[{}]/t, L = {}", parts.join(" + "), self.log_divergence_coeff)
    }
}

/// Exchange factor `S` with `A(u)B(v) = S(u−v)·B(v)A(u)`.
pub fn exchange_factor(a: &ModeFunction, b: &ModeFunction, kernel: &Kernel) -> Result<StructureFunction> {
    let ab = contract(a, b, kernel)?;
    let ba = contract(b, a, kernel)?;
    if ab.log_divergence_coeff != ba.log_divergence_coeff {
        return Err(Error::DivergenceMismatch(
            ab.log_divergence_coeff.to_string(),
            ba.log_divergence_coeff.to_string(),
        ));
    }
    Ok(ab.closed_form()?.div(&ba.closed_form()?.reflect()))
}

/// The same exchange factor by quadrature, where both strips overlap.
pub fn exchange_numeric(
    a: &ModeFunction,
    b: &ModeFunction,
    kernel: &Kernel,
    w: Complex64,
    hbar: f64,
) -> Result<Complex64> {
    let ab = contract(a, b, kernel)?;
    let ba = contract(b, a, kernel)?;
    Ok((ab.quad_eval(w, hbar)? - ba.quad_eval(-w, hbar)?).exp())
}

/// An `n × n` grid inside the convergence strip, `Re(w)/ℏ ∈ [−2, 2]` and
/// `Im(w)/ℏ ∈ [−λ − 3.6, −λ − 0.4]`.
pub fn strip_grid(bound: &Q, hbar: f64, n: usize) -> Vec<Complex64> {
    let lam = q_to_f64(bound);
    let step = |lo: f64, hi: f64, j: usize| {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * j as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let re = step(-2.0, 2.0, i);
            let im = step(-lam - 3.6, -lam - 0.4, j);
            out.push(Complex64::new(re * hbar, im * hbar));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::AlgebraParams;

    fn term(c: i64, hp: i32, shift: Q, sinh: Vec<(Q, i32)>) -> ExpTrigTerm {
        ExpTrigTerm::new(GaussQ::int(c), hp, shift, sinh, Q::zero()).unwrap()
    }

    fn params(k: Q) -> AlgebraParams {
        AlgebraParams::new(k, qi(1)).unwrap()
    }

    #[test]
    fn zero_mode_gives_zero_integrand() {
        let p = params(qi(2));
        let g = ModeFunction::new("v", vec![], vec![term(1, 1, Q::zero(), vec![])]);
        let i = contract(&ModeFunction::zero("u"), &g, &Kernel::c_hat(&p)).unwrap();
        assert!(i.is_zero());
        assert!(i.log_divergence_coeff.is_zero());
        assert_eq!(i.quad_eval(Complex64::new(0.0, -1.0), 1.0).unwrap(), Complex64::new(0.0, 0.0));
        assert!(i.closed_form().unwrap().is_identity());
    }

    #[test]
    fn frullani_family_closed_form() {
        // (e^{−2t} − e^{−3t})/t at ℏ = 1: S(w) = (x + 3)/(x + 2)
        let terms = vec![term(1, 0, qi(-2), vec![]), term(-1, 0, qi(-3), vec![])];
        let (_, taylor) = super::taylor(&terms, SERIES_ORDER);
        let i = ContractionIntegrand {
            terms,
            log_divergence_coeff: GaussQ::zero(),
            taylor,
        };
        let sf = i.closed_form().unwrap();
        assert!(!sf.has_gamma());
        let at_zero = sf.eval(Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert!((at_zero - 1.5).norm() < 1e-14);
        let q = i.quad_eval(Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert!((q - 1.5f64.ln()).norm() < 1e-10);
    }
}
