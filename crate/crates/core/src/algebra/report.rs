//! Verification records and their JSON form.
//!
//! Floats are written with 17 significant digits in lowercase scientific
//! notation and object keys are sorted, so identical runs give identical bytes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{Map, Number, Value};

pub const SCHEMA_VERSION: &str = "1.0";

/// One zero/pole of an ordering difference with its residue data.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleRecord {
    /// Location in units of `ℏ`, in the frame of the report.
    pub location: Complex64,
    pub order: i32,
    /// Term pairs `(i, j)` contributing at this location.
    pub pairs: Vec<(usize, usize)>,
    /// Numeric residue of the summed ordering difference.
    pub residue: Complex64,
    /// Symbolic residue-operator checks, by name.
    pub checks: BTreeMap<String, bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitRecord {
    pub hbar: Vec<f64>,
    pub errors: Vec<f64>,
    pub order: f64,
    pub target: Complex64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct VerificationReport {
    pub id: String,
    pub kind: String,
    pub statement: String,
    pub pass: bool,
    pub tolerance: f64,
    pub checks: BTreeMap<String, bool>,
    pub derived_factor: Option<String>,
    pub grid: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub poles: Vec<PoleRecord>,
    pub limit: Option<LimitRecord>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(id: &str, kind: &str, statement: &str, tolerance: f64) -> Self {
        Self {
            id: id.to_string(),
            kind: kind.to_string(),
            statement: statement.to_string(),
            tolerance,
            ..Default::default()
        }
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.residuals.iter().copied().fold(None, |acc, r| match acc {
            None => Some(r),
            Some(a) => Some(if r.is_nan() || r > a { r } else { a }),
        })
    }

    /// Pass iff every check holds and every residual is within tolerance.
    pub fn finalize(&mut self) {
        let checks_ok = self.checks.values().all(|b| *b);
        let poles_ok = self.poles.iter().all(|p| p.checks.values().all(|b| *b));
        let resid_ok = self.residuals.iter().all(|r| *r <= self.tolerance);
        self.pass = checks_ok && poles_ok && resid_ok;
    }

    pub fn summary_line(&self) -> String {
        let resid = match (self.max_residual(), &self.limit) {
            (Some(r), _) => format!("max residual {r:.3e}"),
            (None, Some(l)) if l.order.is_finite() => format!("order {:.3}", l.order),
            (None, Some(_)) => "exact at every hbar".to_string(),
            (None, None) => "symbolic".to_string(),
        };
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|(_, ok)| !**ok)
            .map(|(k, _)| k.as_str())
            .collect();
        let mut line = format!(
            "{} {:<24} {:<11} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.kind,
            resid
        );
        if !failed.is_empty() {
            line.push_str(&format!("  failed: {}", failed.join(", ")));
        }
        line
    }
}

/// Everything one CLI invocation verified.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ReportSet {
    pub params: BTreeMap<String, String>,
    pub reports: Vec<VerificationReport>,
}

impl ReportSet {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Value {
        let mut relations = Vec::new();
        let mut residuals = Vec::new();
        let mut poles = Vec::new();
        let mut fits = Vec::new();
        let mut reports: Vec<&VerificationReport> = self.reports.iter().collect();
        reports.sort_by(|a, b| a.id.cmp(&b.id));
        for r in reports {
            let mut rel = Map::new();
            rel.insert("id".into(), r.id.clone().into());
            rel.insert("kind".into(), r.kind.clone().into());
            rel.insert("statement".into(), r.statement.clone().into());
            rel.insert("pass".into(), r.pass.into());
            rel.insert("tolerance".into(), float(r.tolerance));
            rel.insert("max_residual".into(), r.max_residual().map(float).unwrap_or(Value::Null));
            rel.insert("checks".into(), bool_map(&r.checks));
            rel.insert(
                "derived_factor".into(),
                r.derived_factor.clone().map(Value::from).unwrap_or(Value::Null),
            );
            rel.insert("notes".into(), r.notes.clone().into());
            relations.push(Value::Object(rel));

            if !r.grid.is_empty() {
                let points: Vec<Value> = r
                    .grid
                    .iter()
                    .zip(&r.residuals)
                    .map(|(w, res)| {
                        let mut p = Map::new();
                        p.insert("w".into(), complex(*w));
                        p.insert("residual".into(), float(*res));
                        Value::Object(p)
                    })
                    .collect();
                let mut m = Map::new();
                m.insert("id".into(), r.id.clone().into());
                m.insert("points".into(), points.into());
                residuals.push(Value::Object(m));
            }

            for p in &r.poles {
                let mut m = Map::new();
                m.insert("id".into(), r.id.clone().into());
                m.insert("location_over_hbar".into(), complex(p.location));
                m.insert("order".into(), p.order.into());
                m.insert(
                    "pairs".into(),
                    p.pairs.iter().map(|(i, j)| Value::from(vec![*i, *j])).collect::<Vec<_>>().into(),
                );
                m.insert("residue".into(), complex(p.residue));
                m.insert("checks".into(), bool_map(&p.checks));
                poles.push(Value::Object(m));
            }

            if let Some(l) = &r.limit {
                let mut m = Map::new();
                m.insert("id".into(), r.id.clone().into());
                m.insert("hbar".into(), l.hbar.iter().map(|h| float(*h)).collect::<Vec<_>>().into());
                m.insert("errors".into(), l.errors.iter().map(|e| float(*e)).collect::<Vec<_>>().into());
                m.insert("order".into(), float(l.order));
                m.insert("target".into(), complex(l.target));
                fits.push(Value::Object(m));
            }
        }
        let mut root = Map::new();
        root.insert("schema_version".into(), SCHEMA_VERSION.into());
        root.insert(
            "params".into(),
            Value::Object(self.params.iter().map(|(k, v)| (k.clone(), Value::from(v.clone()))).collect()),
        );
        root.insert("all_pass".into(), self.all_pass().into());
        root.insert("relations".into(), relations.into());
        root.insert("residuals".into(), residuals.into());
        root.insert("poles".into(), poles.into());
        root.insert("limit_fits".into(), fits.into());
        Value::Object(root)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serialisation");
        s.push('\n');
        s
    }
}

/// 17 significant digits, lowercase exponent; non-finite values become null.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    Value::Number(text.parse::<Number>().expect("formatted float is a JSON number"))
}

fn complex(z: Complex64) -> Value {
    let mut m = Map::new();
    m.insert("re".into(), float(z.re));
    m.insert("im".into(), float(z.im));
    Value::Object(m)
}

fn bool_map(m: &BTreeMap<String, bool>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.clone(), Value::Bool(*v))).collect())
}

/// Machine-readable error object for JSON mode.
pub fn error_json(kind: &str, message: &str) -> String {
    let mut m = Map::new();
    m.insert("schema_version".into(), SCHEMA_VERSION.into());
    let mut e = Map::new();
    e.insert("kind".into(), kind.into());
    e.insert("message".into(), message.into());
    m.insert("error".into(), Value::Object(e));
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("error serialisation");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let v = float(0.1);
        assert_eq!(serde_json::to_string(&v).unwrap(), "1.0000000000000001e-1");
        assert_eq!(float(f64::NAN), Value::Null);
    }

    #[test]
    fn json_is_deterministic_and_sorted() {
        let mut r = VerificationReport::new("b", "exchange", "x", 1e-8);
        r.checks.insert("zeta".into(), true);
        r.checks.insert("alpha".into(), true);
        r.grid.push(Complex64::new(0.5, -0.25));
        r.residuals.push(3e-12);
        r.finalize();
        let set = ReportSet {
            params: BTreeMap::from([("k".to_string(), "2".to_string())]),
            reports: vec![r.clone(), VerificationReport { id: "a".into(), ..r }],
        };
        let a = set.to_json_string();
        assert_eq!(a, set.to_json_string());
        let parsed: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["schema_version"], "1.0");
        assert_eq!(parsed["relations"][0]["id"], "a");
        assert!(a.find("\"alpha\"").unwrap() < a.find("\"zeta\"").unwrap());
    }
}
