//! Batch driver behind the `coset-forge` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::report::error_json;
use crate::algebra::{
    classical_limit, current_exchange, ef_commutator_analysis, verify_relation, Catalog, RelationKind, ReportSet,
    Rotation, VerificationReport, VerifyOptions,
};
use crate::contraction::{contract, strip_grid};
use crate::dsl::{self, lower, Definitions, LimitSpec};
use crate::error::{Error, Result};
use crate::rational::{fmt_q, q_to_f64, Q};

#[derive(Parser, Debug, Clone)]
#[command(name = "coset-forge", version, about = "Exchange relations of free-field coset currents")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// List kernels and currents.
    Catalog(Common),
    /// Quadrature against closed form for every contraction of A with B.
    Contract {
        #[command(flatten)]
        common: Common,
        a: String,
        b: String,
        /// Spectral difference w, e.g. "1/2 - 3*i".
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Check declared relations.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Check every relation and limit (the default when no id is given).
        #[arg(long)]
        all: bool,
        /// Relation or limit ids to check.
        #[arg(long = "only", value_delimiter = ',')]
        ids: Vec<String>,
    },
    /// Pole and residue analysis of the declared commutators.
    Poles(Common),
    /// Classical limits, with `--hbar` giving the decreasing sequence.
    Limit(Common),
    /// Everything, as a JSON document.
    Report(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Definition file.
    pub file: PathBuf,
    /// Level override.
    #[arg(long)]
    pub k: Option<String>,
    /// Comma-separated hbar values.
    #[arg(long)]
    pub hbar: Option<String>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// `A,B`: |w| range of the grid in units of hbar·max(1, k).
    #[arg(long)]
    pub grid_range: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, default_value = "global")]
    pub rotate: String,
}

/// Result of one invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub reports: Option<ReportSet>,
}

fn rational(text: &str) -> Result<Q> {
    let e = dsl::parse_expr(text.trim())?;
    let v = lower::eval(&e, &Q::from_integer(0.into()))?;
    if !v.is_real() {
        return Err(Error::InvalidParams(format!("`{text}` is not real")));
    }
    Ok(v.re)
}

fn rational_list(text: &str) -> Result<Vec<Q>> {
    text.split(',').map(rational).collect()
}

struct Session {
    defs: Definitions,
    opts: VerifyOptions,
    hbar_override: Option<Vec<Q>>,
}

fn load(c: &Common) -> Result<Session> {
    let text = std::fs::read_to_string(&c.file)
        .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", c.file.display())))?;
    let file = dsl::parse_definitions(&text)?;
    let k = c.k.as_deref().map(rational).transpose()?;
    let mut defs = lower(&file, k)?;
    let hbar_override = c.hbar.as_deref().map(rational_list).transpose()?;
    let mut opts = VerifyOptions {
        rotation: c.rotate.parse::<Rotation>()?,
        ..VerifyOptions::default()
    };
    if let Some(t) = defs.tol {
        opts.tol = t;
    }
    if let Some(t) = c.tol {
        opts.tol = t;
    }
    if let Some(n) = c.grid_n {
        if n == 0 {
            return Err(Error::InvalidParams("--grid-n must be positive".into()));
        }
        opts.grid_n = n;
    }
    if let Some(r) = &c.grid_range {
        let parts: Vec<f64> = r
            .split(',')
            .map(|s| rational(s).map(|q| q_to_f64(&q)))
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [a, b] if *a > 0.0 && b > a => opts.grid_range = (*a, *b),
            _ => return Err(Error::InvalidParams("--grid-range takes A,B with 0 < A < B".into())),
        }
    }
    if let Some(h) = &hbar_override {
        defs.hbar = h.clone();
    }
    Ok(Session { defs, opts, hbar_override })
}

fn params_map(s: &Session) -> BTreeMap<String, String> {
    let mut m: BTreeMap<String, String> = lower::describe(&s.defs).into_iter().collect();
    m.insert("rotation".into(), s.opts.rotation.to_string());
    m.insert("grid_n".into(), s.opts.grid_n.to_string());
    m.insert("grid_range".into(), format!("{},{}", s.opts.grid_range.0, s.opts.grid_range.1));
    m.insert("tol".into(), format!("{:e}", s.opts.tol));
    m
}

fn failed(id: &str, kind: &str, statement: &str, tol: f64, err: &Error) -> VerificationReport {
    let mut r = VerificationReport::new(id, kind, statement, tol);
    r.checks.insert("evaluated".into(), false);
    r.notes.push(format!("error: {err}"));
    r.finalize();
    r
}

/// Every relation at every `hbar`; ids get an `@hbar=` suffix when more than
/// one value is checked.
pub fn verify_relations(defs: &Definitions, opts: &VerifyOptions, ids: &[String]) -> Result<Vec<VerificationReport>> {
    let cats: Vec<(Q, Catalog)> = defs
        .hbar
        .iter()
        .map(|h| defs.catalog_at(h).map(|c| (h.clone(), c)))
        .collect::<Result<_>>()?;
    let several = cats.len() > 1;
    let jobs: Vec<_> = cats
        .iter()
        .flat_map(|(h, cat)| {
            defs.relations
                .iter()
                .filter(|r| ids.is_empty() || ids.contains(&r.id))
                .map(move |r| (h, cat, r))
        })
        .collect();
    let mut out: Vec<VerificationReport> = jobs
        .par_iter()
        .map(|(h, cat, rel)| {
            let mut rep = verify_relation(cat, rel, opts)
                .unwrap_or_else(|e| failed(&rel.id, "exchange", &rel.statement(), opts.tol, &e));
            if several {
                rep.id = format!("{}@hbar={}", rel.id, fmt_q(h));
            }
            rep
        })
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

pub fn run_limit(defs: &Definitions, spec: &LimitSpec, hbar_seq: &[f64], min_order: f64) -> Result<VerificationReport> {
    let a = defs.catalog.get(&spec.a)?;
    let b = defs.catalog.get(&spec.b)?;
    let pairs = current_exchange(&defs.catalog, a, b, spec.rotation)?;
    let statement = format!("{}(u){}(v) as hbar -> 0", spec.a, spec.b);
    if !pairs.consistent() {
        return Ok(failed(
            &spec.id,
            "limit",
            &statement,
            min_order,
            &Error::InvalidParams("term pairs have different exchange factors".into()),
        ));
    }
    match classical_limit(&spec.id, pairs.first(), &spec.braid, spec.at, hbar_seq, min_order) {
        Ok((_, mut rep)) => {
            rep.notes.push(format!("frame: {}", spec.rotation));
            Ok(rep)
        }
        Err(e @ Error::NonConvergent(_)) => Ok(failed(&spec.id, "limit", &statement, min_order, &e)),
        Err(e) => Err(e),
    }
}

fn run_limits(s: &Session, ids: &[String], seq: &[f64]) -> Result<Vec<VerificationReport>> {
    s.defs
        .limits
        .iter()
        .filter(|l| ids.is_empty() || ids.contains(&l.id))
        .map(|l| run_limit(&s.defs, l, seq, s.defs.limit_order))
        .collect()
}

fn finish(s: &Session, reports: Vec<VerificationReport>, json: &Option<PathBuf>, out: &mut String) -> Result<Outcome> {
    let set = ReportSet {
        params: params_map(s),
        reports,
    };
    for r in &set.reports {
        let _ = writeln!(out, "{}", r.summary_line());
    }
    let failures: Vec<&str> = set.reports.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect();
    if failures.is_empty() {
        let _ = writeln!(out, "all {} checks pass", set.reports.len());
    } else {
        let _ = writeln!(out, "FAILED: {}", failures.join(", "));
    }
    if let Some(path) = json {
        std::fs::write(path, set.to_json_string())
            .map_err(|e| Error::InvalidParams(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Outcome {
        code: if set.all_pass() { 0 } else { 1 },
        stdout: std::mem::take(out),
        reports: Some(set),
    })
}

fn catalog_text(s: &Session) -> String {
    let mut out = String::new();
    let cat = &s.defs.catalog;
    let _ = writeln!(out, "k = {}", fmt_q(&cat.params.k));
    for k in cat.kernels.values() {
        let _ = writeln!(out, "kernel {k}{}", if k.wick { " [wick]" } else { "" });
    }
    for c in &cat.currents {
        let _ = writeln!(out, "{c}");
    }
    let _ = writeln!(
        out,
        "{} currents, {} relations, {} limits",
        cat.currents.len(),
        s.defs.relations.len(),
        s.defs.limits.len()
    );
    out
}

fn contract_text(s: &Session, a: &str, b: &str, at: Option<&str>) -> Result<String> {
    let cat = &s.defs.catalog;
    let hbar = q_to_f64(&cat.params.hbar);
    let ca = cat.get(a)?;
    let cb = cat.get(b)?;
    let w_fixed = at
        .map(|t| -> Result<Complex64> {
            let e = dsl::parse_expr(t)?;
            Ok(lower::eval(&e, &cat.params.k)?.to_c64())
        })
        .transpose()?;
    let mut out = String::new();
    for (i, ta) in ca.terms.iter().enumerate() {
        for (j, tb) in cb.terms.iter().enumerate() {
            for (family, ga) in &ta.exponents {
                let Some(gb) = tb.exponents.get(family) else { continue };
                let integrand = contract(ga, gb, cat.kernel(family)?)?;
                let closed = integrand.closed_form()?;
                let w = match (w_fixed, integrand.strip_bound()) {
                    (Some(w), _) => w,
                    (None, Some(l)) => strip_grid(&l, hbar, 1)[0],
                    (None, None) => Complex64::new(0.0, -hbar),
                };
                let quad = integrand.quad_eval(w, hbar)?.exp();
                let exact = closed.eval(w, hbar)?;
                let rel = (quad - exact).norm() / exact.norm();
                let _ = writeln!(
                    out,
                    "pair ({i},{j}) family {family} at w = {:.6}{:+.6}i: quad {:.15e}{:+.15e}i closed {:.15e}{:+.15e}i rel {:.3e}",
                    w.re, w.im, quad.re, quad.im, exact.re, exact.im, rel
                );
                let _ = writeln!(out, "  closed form: {}", closed.canonical());
            }
        }
    }
    if out.is_empty() {
        out.push_str("no shared kernel families: the currents commute\n");
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let mut out = String::new();
    let text_only = |stdout: String| Outcome {
        code: 0,
        stdout,
        reports: None,
    };
    match &cli.command {
        Command::Catalog(c) => Ok(text_only(catalog_text(&load(c)?))),
        Command::Contract { common, a, b, at } => Ok(text_only(contract_text(&load(common)?, a, b, at.as_deref())?)),
        Command::Verify { common, all, ids } => {
            let s = load(common)?;
            let ids: Vec<String> = if *all { Vec::new() } else { ids.clone() };
            let known = |id: &String| s.defs.relations.iter().any(|r| &r.id == id) || s.defs.limits.iter().any(|l| &l.id == id);
            if let Some(bad) = ids.iter().find(|i| !known(i)) {
                return Err(Error::UndeclaredName(bad.clone()));
            }
            let mut reports = verify_relations(&s.defs, &s.opts, &ids)?;
            reports.extend(run_limits(&s, &ids, &s.defs.limit_hbar)?);
            finish(&s, reports, &common.json, &mut out)
        }
        Command::Poles(c) => {
            let s = load(c)?;
            let mut reports = Vec::new();
            for h in &s.defs.hbar {
                let cat = s.defs.catalog_at(h)?;
                let declared: Vec<_> = s
                    .defs
                    .relations
                    .iter()
                    .filter(|r| matches!(r.kind, RelationKind::Commutator { .. }))
                    .collect();
                let mut batch = if declared.is_empty() {
                    vec![ef_commutator_analysis(&cat, &s.opts)?]
                } else {
                    declared
                        .iter()
                        .map(|r| verify_relation(&cat, r, &s.opts))
                        .collect::<Result<Vec<_>>>()?
                };
                if s.defs.hbar.len() > 1 {
                    for r in &mut batch {
                        r.id = format!("{}@hbar={}", r.id, fmt_q(h));
                    }
                }
                reports.extend(batch);
            }
            for r in &reports {
                for n in &r.notes {
                    let _ = writeln!(out, "{}: {n}", r.id);
                }
            }
            finish(&s, reports, &c.json, &mut out)
        }
        Command::Limit(c) => {
            let s = load(c)?;
            let seq: Vec<f64> = match &s.hbar_override {
                Some(h) => h.iter().map(q_to_f64).collect(),
                None => s.defs.limit_hbar.clone(),
            };
            let reports = run_limits(&s, &[], &seq)?;
            for r in &reports {
                if let Some(l) = &r.limit {
                    for (h, e) in l.hbar.iter().zip(&l.errors) {
                        let _ = writeln!(out, "{}: hbar = {h:e} error = {e:.3e}", r.id);
                    }
                }
                for n in &r.notes {
                    let _ = writeln!(out, "{}: {n}", r.id);
                }
            }
            finish(&s, reports, &c.json, &mut out)
        }
        Command::Report(c) => {
            let s = load(c)?;
            let mut reports = verify_relations(&s.defs, &s.opts, &[])?;
            reports.extend(run_limits(&s, &[], &s.defs.limit_hbar)?);
            let mut o = finish(&s, reports, &c.json, &mut out)?;
            if c.json.is_none() {
                o.stdout = o.reports.as_ref().expect("report set").to_json_string();
            }
            Ok(o)
        }
    }
}

fn json_target(cli: &Cli) -> Option<&PathBuf> {
    let c = match &cli.command {
        Command::Catalog(c) | Command::Poles(c) | Command::Limit(c) | Command::Report(c) => c,
        Command::Contract { common, .. } | Command::Verify { common, .. } => common,
    };
    c.json.as_ref()
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::UndeclaredName(_) | Error::DuplicateName(_) | Error::UnknownCurrent(_) => "name",
        _ => "config",
    }
}

/// Runs one invocation; exit code 0 on success, 1 on a failed check, 2 on
/// input errors.
pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(o) => o,
        Err(e) => {
            let json_mode = json_target(cli).is_some() || matches!(cli.command, Command::Report(_));
            let stdout = if json_mode {
                let doc = error_json(error_kind(&e), &e.to_string());
                if let Some(p) = json_target(cli) {
                    let _ = std::fs::write(p, &doc);
                }
                doc
            } else {
                format!("error: {e}\n")
            };
            Outcome {
                code: 2,
                stdout,
                reports: None,
            }
        }
    }
}
