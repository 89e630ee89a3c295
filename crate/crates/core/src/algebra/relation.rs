//! Exchange relations `L(w)·A(u)B(v) = R(w)·B(v)A(u)` and their verification.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::catalog::{Catalog, Current, NormalOrderedTerm};
use super::ef::ResidueTarget;
use super::report::VerificationReport;
use super::Rotation;
use crate::contraction::exchange_factor;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, q_to_f64, GaussQ, Q};
use crate::structure::{Base, StructureFunction};

/// A factor of a written relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorAtom {
    /// `α·w + β·ℏ` with `w = u − v`.
    Linear { w: GaussQ, hbar: GaussQ },
    /// `Γ(i w/(s ℏ) + a)`; a complex `s` writes rotated-frame arguments.
    Gamma { scale: GaussQ, shift: Q },
}

/// A product of atoms with integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RelationFactor {
    pub atoms: Vec<(FactorAtom, i32)>,
}

impl RelationFactor {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn to_structure(&self) -> StructureFunction {
        let mut sf = StructureFunction::one();
        for (atom, n) in &self.atoms {
            match atom {
                FactorAtom::Linear { w, hbar } => {
                    let mut f = StructureFunction::one();
                    if w.is_zero() {
                        // pure β ℏ
                        f.mul_coeff(hbar);
                        f.mul_power(Base::Hbar, &Q::one());
                    } else {
                        // α w + β ℏ = ℏ (−iα) (x + iβ/α), x = i w/ℏ
                        let minus_i = -GaussQ::i();
                        f.mul_coeff(&(&minus_i * w));
                        f.mul_power(Base::Hbar, &Q::one());
                        f.mul_linear(&(&GaussQ::i() * hbar) / w, 1);
                    }
                    for _ in 0..n.unsigned_abs() {
                        sf = if *n > 0 { sf.mul(&f) } else { sf.div(&f) };
                    }
                }
                FactorAtom::Gamma { scale, shift } => {
                    sf.mul_gamma(scale.clone(), shift.clone(), *n);
                }
            }
        }
        sf
    }
}

impl fmt::Display for FactorAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorAtom::Linear { w, hbar } => write!(f, "({w}·w + {hbar}·ℏ)"),
            FactorAtom::Gamma { scale, shift } => write!(f, "Γ(iw/(({scale})ℏ) + {})", fmt_q(shift)),
        }
    }
}

impl fmt::Display for RelationFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|(a, n)| if *n == 1 { a.to_string() } else { format!("{a}^{n}") })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationKind {
    /// `left·A(u)B(v) = right·B(v)A(u)`; `rotated` marks a relation stated
    /// after `ℏ → −iℏ`.
    Exchange {
        left: RelationFactor,
        right: RelationFactor,
        rotated: bool,
    },
    /// Poles and residues of `A(u)B(v) − B(v)A(u)` (the `[E, F]` analysis);
    /// an empty target list asserts a pole-free commutator.
    Commutator { targets: Vec<ResidueTarget> },
    /// Only asks that all term pairs share one exchange factor.
    Shape,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub id: String,
    pub a: String,
    pub b: String,
    pub kind: RelationKind,
}

impl Relation {
    pub fn statement(&self) -> String {
        match &self.kind {
            RelationKind::Exchange { left, right, rotated } => format!(
                "{left}·{a}(u){b}(v) = {right}·{b}(v){a}(u){}",
                if *rotated { " [rotated]" } else { "" },
                a = self.a,
                b = self.b
            ),
            RelationKind::Commutator { .. } => format!("[{}(u), {}(v)]", self.a, self.b),
            RelationKind::Shape => format!("{}(u){}(v) ~ {}(v){}(u)", self.a, self.b, self.b, self.a),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub rotation: Rotation,
    pub grid_n: usize,
    /// `|w|/(ℏ·max(1, k))` range of the log-spaced grid.
    pub grid_range: (f64, f64),
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            rotation: Rotation::Global,
            grid_n: 25,
            grid_range: (0.1, 10.0),
            tol: 1e-8,
        }
    }
}

/// Exchange factor of two normal-ordered terms, multiplied over shared families.
pub fn term_exchange(
    cat: &Catalog,
    a: &NormalOrderedTerm,
    b: &NormalOrderedTerm,
    rotation: Rotation,
) -> Result<StructureFunction> {
    let mut sf = StructureFunction::one();
    for (family, ga) in &a.exponents {
        let Some(gb) = b.exponents.get(family) else { continue };
        let kernel = cat.kernel(family)?;
        let mut s = exchange_factor(ga, gb, kernel)?;
        if rotation.applies_to(kernel.wick) {
            s = s.wick_rotate();
        }
        sf = sf.mul(&s);
    }
    Ok(sf)
}

/// Exchange factors of every term pair of two composite currents.
#[derive(Clone, Debug)]
pub struct PairExchange {
    pub factors: Vec<((usize, usize), StructureFunction)>,
}

impl PairExchange {
    pub fn first(&self) -> &StructureFunction {
        &self.factors[0].1
    }

    /// All term pairs give the same function.
    pub fn consistent(&self) -> bool {
        let s0 = self.first();
        self.factors.iter().all(|(_, s)| s.same_function(s0))
    }

    /// `max_ij |S_ij(w) − S_00(w)| / |S_00(w)|` at one point.
    pub fn deviation_at(&self, w: Complex64, hbar: f64) -> Result<f64> {
        let s0 = self.first().eval(w, hbar)?;
        let mut worst = 0.0f64;
        for (_, s) in &self.factors[1..] {
            worst = worst.max((s.eval(w, hbar)? - s0).norm() / s0.norm());
        }
        Ok(worst)
    }

    /// Largest [`Self::deviation_at`] over `points`.
    pub fn cross_deviation(&self, points: &[Complex64], hbar: f64) -> Result<f64> {
        let devs: Vec<f64> = points
            .par_iter()
            .map(|w| self.deviation_at(*w, hbar))
            .collect::<Result<_>>()?;
        Ok(devs.into_iter().fold(0.0, f64::max))
    }
}

pub fn current_exchange(cat: &Catalog, a: &Current, b: &Current, rotation: Rotation) -> Result<PairExchange> {
    let mut factors = Vec::new();
    for (i, ta) in a.terms.iter().enumerate() {
        for (j, tb) in b.terms.iter().enumerate() {
            factors.push(((i, j), term_exchange(cat, ta, tb, rotation)?));
        }
    }
    Ok(PairExchange { factors })
}

/// Deterministic grid: log-spaced radii, golden-angle phases.
pub fn relation_grid(opts: &VerifyOptions, hbar: f64, k: f64) -> Vec<Complex64> {
    let n = opts.grid_n.max(1);
    let scale = hbar * k.max(1.0);
    let (lo, hi) = opts.grid_range;
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|j| {
            let f = if n == 1 { 0.5 } else { j as f64 / (n - 1) as f64 };
            let r = scale * lo * (hi / lo).powf(f);
            let theta = 0.3 + golden * j as f64;
            Complex64::from_polar(r, theta)
        })
        .collect()
}

pub fn verify_relation(cat: &Catalog, rel: &Relation, opts: &VerifyOptions) -> Result<VerificationReport> {
    match &rel.kind {
        RelationKind::Exchange { left, right, rotated } => verify_exchange(cat, rel, left, right, *rotated, opts),
        RelationKind::Shape => verify_shape(cat, rel, opts),
        RelationKind::Commutator { targets } => super::ef::commutator_report(cat, rel, targets, opts),
    }
}

fn verify_exchange(
    cat: &Catalog,
    rel: &Relation,
    left: &RelationFactor,
    right: &RelationFactor,
    rotated: bool,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let a = cat.get(&rel.a)?;
    let b = cat.get(&rel.b)?;
    let rotation = if rotated { opts.rotation } else { Rotation::None };
    let pairs = current_exchange(cat, a, b, rotation)?;
    let l = left.to_structure();
    let r = right.to_structure();
    let expected = r.div(&l);

    let mut report = VerificationReport::new(&rel.id, "exchange", &rel.statement(), opts.tol);
    report.derived_factor = Some(pairs.first().canonical().to_string());
    report.checks.insert("symbolic".into(), pairs.factors.iter().all(|(_, s)| s.same_function(&expected)));
    report.checks.insert("term_pairs_agree".into(), pairs.consistent());
    if !l.has_gamma() && !r.has_gamma() {
        let free = pairs.factors.iter().all(|(_, s)| s.canonical().gamma.is_empty());
        report.checks.insert("gamma_cancel".into(), free);
    }
    if rotated {
        report.notes.push(format!("rotation: {}", opts.rotation));
    }

    let hbar = q_to_f64(&cat.params.hbar);
    let grid = relation_grid(opts, hbar, q_to_f64(&cat.params.k));
    let residuals: Vec<f64> = grid
        .par_iter()
        .map(|w| -> Result<f64> {
            let lw = l.eval(*w, hbar)?;
            let rw = r.eval(*w, hbar)?;
            let mut worst = 0.0f64;
            for (_, s) in &pairs.factors {
                let d = (lw * s.eval(*w, hbar)? - rw).norm() / rw.norm();
                worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let dev = pairs.cross_deviation(&grid, hbar)?;
    if pairs.factors.len() > 1 {
        report.notes.push(format!("max cross-term deviation {dev:.3e}"));
        report.checks.insert("cross_term_within_tol".into(), dev <= opts.tol);
    }
    report.grid = grid;
    report.residuals = residuals;
    report.finalize();
    Ok(report)
}

fn verify_shape(cat: &Catalog, rel: &Relation, opts: &VerifyOptions) -> Result<VerificationReport> {
    let a = cat.get(&rel.a)?;
    let b = cat.get(&rel.b)?;
    let pairs = current_exchange(cat, a, b, Rotation::None)?;
    let hbar = q_to_f64(&cat.params.hbar);
    let grid = relation_grid(opts, hbar, q_to_f64(&cat.params.k));
    let residuals: Vec<f64> = grid
        .par_iter()
        .map(|w| pairs.deviation_at(*w, hbar))
        .collect::<Result<_>>()?;
    let dev = residuals.iter().copied().fold(0.0, f64::max);
    let mut report = VerificationReport::new(&rel.id, "shape", &rel.statement(), opts.tol);
    report.derived_factor = Some(pairs.first().to_string());
    report.checks.insert("term_pairs_agree".into(), pairs.consistent());
    report.notes.push(format!("max cross-term deviation {dev:.3e}"));
    report.grid = grid;
    report.residuals = residuals;
    if report.residuals.is_empty() {
        return Err(Error::InvalidParams("empty grid".into()));
    }
    report.finalize();
    Ok(report)
}
