//! Pole and residue analysis of `A(u)B(v) − B(v)A(u)`.
//!
//! For each term pair the two orderings carry the contraction factors
//! `c(w) = e^{I_AB(w)}` and `d(w) = e^{I_BA(−w)}`. When `c` and `d` continue to
//! the same meromorphic function, the commutator is supported on the poles of
//! `c`: the boundary values `1/(w − w₀ ∓ i0)` differ by a delta function whose
//! coefficient is the residue times the normal-ordered product of the two
//! terms at `v = u − w₀`. The analysis runs in the unrotated frame; a pole at
//! `w₀ = i g ℏ` sits at `w = g ℏ` after `ℏ → −iℏ`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::catalog::{Catalog, Current, NormalOrderedTerm};
use super::relation::{Relation, VerifyOptions};
use super::report::{PoleRecord, VerificationReport};
use crate::contraction::contract;
use crate::error::{Error, Result};
use crate::modes::ModeFunction;
use crate::rational::{fmt_q, q_to_f64, qi, GaussQ, Q};
use crate::structure::StructureFunction;

const RESIDUE_RADIUS: f64 = 1e-4;

/// One term pair's share of a pole.
#[derive(Clone, Debug)]
pub struct Contribution {
    pub pair: (usize, usize),
    pub order: i32,
    pub residue: Complex64,
    /// Exponents of `:A_i(u) B_j(u − w₀):` per family, in the variable `u`.
    pub exponents: BTreeMap<String, ModeFunction>,
}

#[derive(Clone, Debug)]
pub struct PoleInfo {
    /// `w₀/ℏ` in the unrotated frame.
    pub location: GaussQ,
    pub contributions: Vec<Contribution>,
}

impl PoleInfo {
    /// `w₀/ℏ` after `ℏ → −iℏ`.
    pub fn rotated_location(&self) -> GaussQ {
        &self.location * &(-GaussQ::i())
    }
}

#[derive(Clone, Debug)]
pub struct PoleAnalysis {
    /// Every pair's two orderings continue to one function.
    pub orderings_continue: bool,
    pub poles: Vec<PoleInfo>,
}

pub fn pair_factors(
    cat: &Catalog,
    a: &NormalOrderedTerm,
    b: &NormalOrderedTerm,
) -> Result<(StructureFunction, StructureFunction)> {
    let mut c = StructureFunction::one();
    let mut d = StructureFunction::one();
    for (family, ga) in &a.exponents {
        let Some(gb) = b.exponents.get(family) else { continue };
        let kernel = cat.kernel(family)?;
        let ab = contract(ga, gb, kernel)?;
        let ba = contract(gb, ga, kernel)?;
        if ab.log_divergence_coeff != ba.log_divergence_coeff {
            return Err(Error::DivergenceMismatch(
                ab.log_divergence_coeff.to_string(),
                ba.log_divergence_coeff.to_string(),
            ));
        }
        c = c.mul(&ab.closed_form()?);
        d = d.mul(&ba.closed_form()?.reflect());
    }
    Ok((c, d))
}

fn residue_exponents(
    a: &NormalOrderedTerm,
    b: &NormalOrderedTerm,
    gamma: &Q,
) -> Result<BTreeMap<String, ModeFunction>> {
    let mut out = BTreeMap::new();
    let families: std::collections::BTreeSet<&String> = a.exponents.keys().chain(b.exponents.keys()).collect();
    for f in families {
        let ga = a.exponents.get(f).cloned();
        let gb = b.exponents.get(f).map(|g| g.shift_argument(gamma));
        let sum = match (ga, gb) {
            (Some(x), Some(y)) => x.add(&y.renamed(&x.var))?,
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (None, None) => unreachable!(),
        };
        out.insert(f.clone(), sum);
    }
    Ok(out)
}

/// Poles of every term pair of `A(u)B(v)` with `|Re w|, |Im w| ≤ band·ℏ`.
pub fn commutator_analysis(cat: &Catalog, a: &Current, b: &Current, band: &Q) -> Result<PoleAnalysis> {
    let hbar = q_to_f64(&cat.params.hbar);
    let mut orderings_continue = true;
    let mut by_location: BTreeMap<GaussQ, Vec<Contribution>> = BTreeMap::new();
    for (i, ta) in a.terms.iter().enumerate() {
        for (j, tb) in b.terms.iter().enumerate() {
            let (c, d) = pair_factors(cat, ta, tb)?;
            orderings_continue &= c.same_function(&d);
            let scalar = (&ta.prefactor * &tb.prefactor).to_c64() * hbar.powi(ta.hbar_pow + tb.hbar_pow);
            for s in c.poles(band, band) {
                let w0 = s.location.to_c64() * hbar;
                let residue = c.residue(w0, hbar, RESIDUE_RADIUS * hbar)? * scalar;
                // v = u − w₀ = u + i(−g)ℏ for w₀ = i g ℏ
                let gamma = -s.location.im.clone();
                let exponents = residue_exponents(ta, tb, &gamma)?;
                by_location.entry(s.location.clone()).or_default().push(Contribution {
                    pair: (i, j),
                    order: s.order,
                    residue,
                    exponents,
                });
            }
        }
    }
    Ok(PoleAnalysis {
        orderings_continue,
        poles: by_location
            .into_iter()
            .map(|(location, contributions)| PoleInfo { location, contributions })
            .collect(),
    })
}

/// Expected residue operator: `current` at `u + i·shift·ℏ`, unrotated frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueTarget {
    /// Pole position `w₀/ℏ` after rotation (real).
    pub rotated_location: Q,
    pub current: String,
    pub shift: Q,
    pub label: String,
}

fn exponents_match(
    cat: &Catalog,
    got: &BTreeMap<String, ModeFunction>,
    target: &ResidueTarget,
) -> Result<bool> {
    let cur = cat.get(&target.current)?;
    let [t] = cur.terms.as_slice() else {
        return Err(Error::InvalidParams(format!("residue target `{}` must be a single exponential", cur.name)));
    };
    let want = t.shifted(&target.shift);
    for (f, g) in got {
        let ok = match want.exponents.get(f) {
            Some(h) => g.equals(&h.renamed(&g.var))?,
            None => g.canonicalize()?.is_zero(),
        };
        if !ok {
            return Ok(false);
        }
    }
    for (f, h) in &want.exponents {
        if !got.contains_key(f) && !h.canonicalize()?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Residue targets derived from the `ĉ` contraction: `H⁺(u + ikℏ/4)` at
/// `w₀ = −kℏ/2` and `H⁻(u − ikℏ/4)` at `w₀ = +kℏ/2` (rotated frame).
pub fn derived_ef_targets(k: &Q) -> Vec<ResidueTarget> {
    vec![
        ResidueTarget {
            rotated_location: -k / qi(2),
            current: "Hp".into(),
            shift: k / qi(4),
            label: "derived".into(),
        },
        ResidueTarget {
            rotated_location: k / qi(2),
            current: "Hm".into(),
            shift: -k / qi(4),
            label: "derived".into(),
        },
    ]
}

/// Residue targets with the arguments as printed: `H⁺(u + kℏ/2)` and
/// `H⁻(v + kℏ/2) = H⁻(u)`.
pub fn printed_ef_targets(k: &Q) -> Vec<ResidueTarget> {
    vec![
        ResidueTarget {
            rotated_location: -k / qi(2),
            current: "Hp".into(),
            shift: k / qi(2),
            label: "printed".into(),
        },
        ResidueTarget {
            rotated_location: k / qi(2),
            current: "Hm".into(),
            shift: Q::zero(),
            label: "printed".into(),
        },
    ]
}

/// Full report on `[A(u), B(v)]`: continuation of the orderings, pole set
/// `{±kℏ/2}`, simple poles, and residue operators against `targets`.
pub fn pole_report(
    cat: &Catalog,
    id: &str,
    a: &Current,
    b: &Current,
    targets: &[ResidueTarget],
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let k = cat.params.k.clone();
    let analysis = commutator_analysis(cat, a, b, &k)?;
    let mut report = VerificationReport::new(id, "commutator", &format!("[{}(u), {}(v)]", a.name, b.name), opts.tol);
    report.checks.insert("orderings_continue".into(), analysis.orderings_continue);

    let expected: Vec<Q> = {
        let mut v: Vec<Q> = targets.iter().map(|t| t.rotated_location.clone()).collect();
        v.sort();
        v.dedup();
        v
    };
    let found: Vec<GaussQ> = analysis.poles.iter().map(|p| p.rotated_location()).collect();
    let on_axis = found.iter().all(|z| z.im.is_zero());
    let found_re: Vec<Q> = found.iter().map(|z| z.re.clone()).collect();
    report.checks.insert("pole_set".into(), on_axis && found_re == expected);
    let simple = analysis
        .poles
        .iter()
        .all(|p| p.contributions.iter().all(|c| c.order == -1));
    report.checks.insert("simple_poles".into(), simple);

    for pole in &analysis.poles {
        let loc = pole.rotated_location();
        let mut rec = PoleRecord {
            location: loc.to_c64(),
            order: pole.contributions.iter().map(|c| c.order).min().unwrap_or(0),
            pairs: pole.contributions.iter().map(|c| c.pair).collect(),
            residue: pole.contributions.iter().map(|c| c.residue).sum(),
            checks: BTreeMap::new(),
        };
        if pole.contributions.len() != 1 {
            report.notes.push(format!(
                "pole at w = {}ℏ collects {} term pairs",
                loc,
                pole.contributions.len()
            ));
        }
        for target in targets.iter().filter(|t| GaussQ::real(t.rotated_location.clone()) == loc) {
            let mut ok = true;
            for c in &pole.contributions {
                ok &= exponents_match(cat, &c.exponents, target)?;
            }
            rec.checks.insert(
                format!("residue_{}_{}({})", target.label, target.current, fmt_shift(&target.shift)),
                ok,
            );
        }
        report.notes.push(format!(
            "w = {}ℏ: residue coefficient {:.6e}{:+.6e}i from pairs {:?}",
            loc, rec.residue.re, rec.residue.im, rec.pairs
        ));
        report.poles.push(rec);
    }
    report.finalize();
    Ok(report)
}

fn fmt_shift(s: &Q) -> String {
    if s.is_zero() {
        "u".into()
    } else if s.is_negative() {
        format!("u-{}i", fmt_q(&-s.clone()))
    } else {
        format!("u+{}i", fmt_q(s))
    }
}

/// `[E, F]` against the derived residue arguments.
pub fn ef_commutator_analysis(cat: &Catalog, opts: &VerifyOptions) -> Result<VerificationReport> {
    let e = cat.get("E")?;
    let f = cat.get("F")?;
    pole_report(cat, "E-F-commutator", e, f, &derived_ef_targets(&cat.params.k), opts)
}

/// Report for a declared commutator relation.
pub(crate) fn commutator_report(
    cat: &Catalog,
    rel: &Relation,
    targets: &[ResidueTarget],
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let a = cat.get(&rel.a)?;
    let b = cat.get(&rel.b)?;
    let mut r = pole_report(cat, &rel.id, a, b, targets, opts)?;
    r.statement = rel.statement();
    Ok(r)
}
