//! Turning a parsed file into a [`Catalog`], relations and limit requests.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Pow, Zero};

use super::ast::*;
use crate::algebra::ef::ResidueTarget;
use crate::algebra::{Catalog, ClassicalBraid, Current, FactorAtom, NormalOrderedTerm, Relation, RelationFactor, RelationKind, Rotation};
use crate::error::{Error, Result};
use crate::modes::{AlgebraParams, ExpTrigTerm, Kernel, ModeFunction};
use crate::rational::{fmt_q, q_to_f64, GaussQ, Q};

/// Spectral variable used for every declared current.
const VAR: &str = "u";

/// Exact value of a numeric literal such as `12`, `0.25` or `1e-8`.
pub fn literal(text: &str) -> Result<Q> {
    let bad = || Error::InvalidParams(format!("malformed number `{text}`"));
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(p) => (&text[..p], text[p + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = BigInt::from_str(&format!("{int}{frac}")).map_err(|_| bad())?;
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Q::from_integer(digits * Pow::pow(&ten, scale as u64))
    } else {
        Q::new(digits, Pow::pow(&ten, (-scale) as u64))
    })
}

pub fn eval(e: &Expr, k: &Q) -> Result<GaussQ> {
    Ok(match e {
        Expr::Num(s) => GaussQ::real(literal(s)?),
        Expr::K => GaussQ::real(k.clone()),
        Expr::I => GaussQ::i(),
        Expr::Neg(x) => -eval(x, k)?,
        Expr::Add(a, b) => &eval(a, k)? + &eval(b, k)?,
        Expr::Sub(a, b) => &eval(a, k)? - &eval(b, k)?,
        Expr::Mul(a, b) => &eval(a, k)? * &eval(b, k)?,
        Expr::Div(a, b) => {
            let d = eval(b, k)?;
            if d.is_zero() {
                return Err(Error::InvalidParams("division by zero".into()));
            }
            &eval(a, k)? / &d
        }
        Expr::Paren(x) => eval(x, k)?,
    })
}

fn eval_real(e: &Expr, k: &Q, what: &str) -> Result<Q> {
    let v = eval(e, k)?;
    if !v.is_real() {
        return Err(Error::InvalidParams(format!("{what} must be real, got {v}")));
    }
    Ok(v.re)
}

fn coef_real(c: &Coef, k: &Q, what: &str) -> Result<Q> {
    match c {
        None => Ok(Q::one()),
        Some(e) => eval_real(e, k, what),
    }
}

fn coef(c: &Coef, k: &Q) -> Result<GaussQ> {
    match c {
        None => Ok(GaussQ::one()),
        Some(e) => eval(e, k),
    }
}

/// A classical-limit request.
#[derive(Clone, Debug)]
pub struct LimitSpec {
    pub id: String,
    pub a: String,
    pub b: String,
    pub braid: ClassicalBraid,
    pub at: Complex64,
    pub rotation: Rotation,
}

/// A fully lowered definition file.
#[derive(Clone, Debug)]
pub struct Definitions {
    pub k: Q,
    /// Every `hbar` the relations are checked at.
    pub hbar: Vec<Q>,
    pub limit_hbar: Vec<f64>,
    pub tol: Option<f64>,
    pub limit_order: f64,
    /// Catalog at the first `hbar`.
    pub catalog: Catalog,
    pub relations: Vec<Relation>,
    pub limits: Vec<LimitSpec>,
}

impl Definitions {
    pub fn catalog_at(&self, hbar: &Q) -> Result<Catalog> {
        let mut cat = self.catalog.clone();
        cat.params = cat.params.with_hbar(hbar.clone())?;
        Ok(cat)
    }
}

fn single<'a>(p: &'a Params, key: &str) -> Result<Option<&'a Expr>> {
    match p.get(key) {
        None => Ok(None),
        Some([e]) => Ok(Some(e)),
        Some(_) => Err(Error::InvalidParams(format!("`{key}` takes a single value"))),
    }
}

/// Lowers `file`; `k_override` replaces the declared level.
pub fn lower(file: &DefinitionFile, k_override: Option<Q>) -> Result<Definitions> {
    let p = &file.params;
    let zero = Q::zero();
    let k = match (k_override, single(p, "k")?) {
        (Some(k), _) => k,
        (None, Some(e)) => eval_real(e, &zero, "k")?,
        (None, None) => return Err(Error::InvalidParams("params must set `k`".into())),
    };
    let hbar = match p.get("hbar") {
        None => vec![Q::one()],
        Some(vs) => vs.iter().map(|e| eval_real(e, &k, "hbar")).collect::<Result<_>>()?,
    };
    let limit_hbar = match p.get("limit_hbar") {
        None => vec![1e-2, 1e-3, 1e-4],
        Some(vs) => vs
            .iter()
            .map(|e| eval_real(e, &k, "limit_hbar").map(|q| q_to_f64(&q)))
            .collect::<Result<_>>()?,
    };
    let tol = single(p, "tol")?.map(|e| eval_real(e, &k, "tol").map(|q| q_to_f64(&q))).transpose()?;
    let limit_order = single(p, "limit_order")?
        .map(|e| eval_real(e, &k, "limit_order").map(|q| q_to_f64(&q)))
        .transpose()?
        .unwrap_or(0.9);

    let params = AlgebraParams::new(k.clone(), hbar[0].clone())?;
    let mut catalog = Catalog::new(params);
    let mut relations = Vec::new();
    let mut limits = Vec::new();
    for item in &file.items {
        match item {
            Item::Kernel(d) => catalog.add_kernel(Kernel {
                name: d.name.clone(),
                sign: if d.negative { -1 } else { 1 },
                slope_a: coef_real(&d.slope_a, &k, "kernel slope")?,
                slope_b: coef_real(&d.slope_b, &k, "kernel slope")?,
                wick: d.wick,
            })?,
            Item::Current(d) => {
                let cur = lower_current(&catalog, d, &k)?;
                catalog.add_current(cur)?;
            }
            Item::Relation(d) => relations.push(lower_relation(d, &k)?),
            Item::Limit(d) => limits.push(LimitSpec {
                id: d.id.clone(),
                a: d.a.clone(),
                b: d.b.clone(),
                braid: ClassicalBraid::new(d.alpha, d.beta, k.clone())?,
                at: eval(&d.at, &k)?.to_c64(),
                rotation: if d.rotated { Rotation::Global } else { Rotation::None },
            }),
        }
    }
    Ok(Definitions {
        k,
        hbar,
        limit_hbar,
        tol,
        limit_order,
        catalog,
        relations,
        limits,
    })
}

fn mode_terms(terms: &[ModeTerm], k: &Q) -> Result<Vec<ExpTrigTerm>> {
    terms
        .iter()
        .map(|t| {
            let mut c = match &t.coef {
                None => GaussQ::one(),
                Some(e) => eval(e, k)?,
            };
            if t.negative {
                c = -c;
            }
            let mut hbar_pow = 0;
            let mut shift = Q::zero();
            let mut sinh = Vec::new();
            for f in &t.factors {
                match f {
                    ModeFactor::Hbar(n) => hbar_pow += n,
                    ModeFactor::Exp(s) => shift += coef_real(s, k, "exponential slope")?,
                    ModeFactor::Sinh(s, n) => sinh.push((coef_real(s, k, "sinh slope")?, *n)),
                    ModeFactor::Phase => {}
                }
            }
            ExpTrigTerm::new(c, hbar_pow, shift, sinh, Q::zero())
        })
        .collect()
}

enum Val {
    Scalar(GaussQ, i32),
    Cur(Current),
}

impl Val {
    fn into_current(self) -> Current {
        match self {
            Val::Cur(c) => c,
            Val::Scalar(c, p) => {
                let mut t = NormalOrderedTerm::unit();
                t.prefactor = c;
                t.hbar_pow = p;
                Current {
                    name: String::new(),
                    terms: vec![t],
                }
            }
        }
    }
}

fn lower_cur(cat: &Catalog, e: &CurExpr, k: &Q) -> Result<Val> {
    Ok(match e {
        CurExpr::Scalar(x) => Val::Scalar(eval(x, k)?, 0),
        CurExpr::Hbar(n) => Val::Scalar(GaussQ::one(), *n),
        CurExpr::Ref(name, shift) => {
            let c = cat.get(name).map_err(|_| Error::UndeclaredName(name.clone()))?;
            match shift {
                None => Val::Cur(c.clone()),
                Some(g) => Val::Cur(c.shifted(&eval_real(g, k, "argument shift")?)),
            }
        }
        CurExpr::Inv(x) => match lower_cur(cat, x, k)? {
            Val::Scalar(c, _) if c.is_zero() => return Err(Error::InvalidParams("inverse of zero".into())),
            Val::Scalar(c, p) => Val::Scalar(c.inv(), -p),
            Val::Cur(c) => Val::Cur(c.inverse()?),
        },
        CurExpr::Neg(x) => match lower_cur(cat, x, k)? {
            Val::Scalar(c, p) => Val::Scalar(-c, p),
            Val::Cur(c) => Val::Cur(c.scaled(&GaussQ::int(-1), 0)),
        },
        CurExpr::Add(a, b) | CurExpr::Sub(a, b) => {
            let x = lower_cur(cat, a, k)?;
            let mut y = lower_cur(cat, b, k)?;
            if matches!(e, CurExpr::Sub(..)) {
                y = match y {
                    Val::Scalar(c, p) => Val::Scalar(-c, p),
                    Val::Cur(c) => Val::Cur(c.scaled(&GaussQ::int(-1), 0)),
                };
            }
            match (x, y) {
                (Val::Scalar(c1, p1), Val::Scalar(c2, p2)) if p1 == p2 => Val::Scalar(&c1 + &c2, p1),
                (x, y) => Val::Cur(x.into_current().plus(&y.into_current())),
            }
        }
        CurExpr::Mul(a, b) => mul(lower_cur(cat, a, k)?, lower_cur(cat, b, k)?)?,
        CurExpr::Div(a, b) => match lower_cur(cat, b, k)? {
            Val::Scalar(c, _) if c.is_zero() => return Err(Error::InvalidParams("division by zero".into())),
            Val::Scalar(c, p) => mul(lower_cur(cat, a, k)?, Val::Scalar(c.inv(), -p))?,
            Val::Cur(_) => {
                return Err(Error::InvalidParams(
                    "division by a current; write `* inv(...)` instead".into(),
                ))
            }
        },
        CurExpr::Paren(x) => lower_cur(cat, x, k)?,
    })
}

fn mul(x: Val, y: Val) -> Result<Val> {
    Ok(match (x, y) {
        (Val::Scalar(c1, p1), Val::Scalar(c2, p2)) => Val::Scalar(&c1 * &c2, p1 + p2),
        (Val::Scalar(c, p), Val::Cur(cur)) | (Val::Cur(cur), Val::Scalar(c, p)) => Val::Cur(cur.scaled(&c, p)),
        (Val::Cur(a), Val::Cur(b)) => Val::Cur(a.mul(&b)?),
    })
}

fn lower_current(cat: &Catalog, d: &CurrentDecl, k: &Q) -> Result<Current> {
    match &d.body {
        CurrentBody::Primitive { family, positive, negative } => {
            cat.kernel(family)?;
            let mode = ModeFunction::new(VAR, mode_terms(positive, k)?, mode_terms(negative, k)?);
            Ok(Current::primitive(&d.name, family, mode))
        }
        CurrentBody::Composite(e) => Ok(lower_cur(cat, e, k)?.into_current().renamed(&d.name)),
    }
}

fn lower_factor(f: &Factor, k: &Q) -> Result<RelationFactor> {
    let mut atoms = Vec::new();
    for part in f {
        let atom = match &part.item {
            FactorItem::Linear { w, hbar } => {
                let wc = match w {
                    None => GaussQ::zero(),
                    Some(c) => coef(c, k)?,
                };
                let mut hc = GaussQ::zero();
                for (neg, c) in hbar {
                    let v = coef(c, k)?;
                    hc = if *neg { &hc - &v } else { &hc + &v };
                }
                if wc.is_zero() && hc.is_zero() {
                    return Err(Error::InvalidParams("vanishing linear factor".into()));
                }
                FactorAtom::Linear { w: wc, hbar: hc }
            }
            FactorItem::Gamma { scale, shift } => {
                let s = eval(scale, k)?;
                if s.is_zero() {
                    return Err(Error::InvalidParams("Gamma scale must be non-zero".into()));
                }
                FactorAtom::Gamma {
                    scale: s,
                    shift: eval_real(shift, k, "Gamma shift")?,
                }
            }
        };
        let n = part.power.unwrap_or(1);
        atoms.push((atom, if part.divide { -n } else { n }));
    }
    Ok(RelationFactor { atoms })
}

fn lower_relation(d: &RelationDecl, k: &Q) -> Result<Relation> {
    let kind = match &d.body {
        RelationBody::Exchange { rotated, left, right } => RelationKind::Exchange {
            left: lower_factor(left, k)?,
            right: lower_factor(right, k)?,
            rotated: *rotated,
        },
        RelationBody::Commutator { poles } => RelationKind::Commutator {
            targets: poles
                .iter()
                .map(|p| {
                    Ok(ResidueTarget {
                        rotated_location: eval_real(&p.location, k, "pole location")?,
                        current: p.current.clone(),
                        shift: match &p.shift {
                            None => Q::zero(),
                            Some(g) => eval_real(g, k, "argument shift")?,
                        },
                        label: "declared".into(),
                    })
                })
                .collect::<Result<_>>()?,
        },
        RelationBody::Shape => RelationKind::Shape,
    };
    Ok(Relation {
        id: d.id.clone(),
        a: d.a.clone(),
        b: d.b.clone(),
        kind,
    })
}

/// `"k"`, `"hbar"` and friends as exact strings for report headers.
pub fn describe(defs: &Definitions) -> Vec<(String, String)> {
    vec![
        ("k".into(), fmt_q(&defs.k)),
        (
            "hbar".into(),
            defs.hbar.iter().map(fmt_q).collect::<Vec<_>>().join(","),
        ),
    ]
}
