//! The `.alg` definition language.
//!
//! ```text
//! params { k = 2  hbar = 1, 1/2 }
//! kernel c = sinh(hbar t) sinh(k/2 hbar t) wick
//! current Hp on c { t > 0: 2 hbar }
//! current Hm on c { t < 0: -2 hbar }
//! relation HpHm: Hp Hm exchange rotated {
//!   left: (w + hbar - k/2 hbar)(w + k/2 hbar - hbar)
//!   right: (w - hbar - k/2 hbar)(w + k/2 hbar + hbar)
//! }
//! ```
//!
//! A kernel `sinh(a hbar t) sinh(b hbar t)` stands for the commutator density
//! `sinh(aℏt) sinh(bℏt)/(ℏ² t)`; a leading `-` flips its sign and `wick` puts it
//! in the rotated sector. A primitive current lists its exponent on each
//! half-line as a sum of terms `c hbar^n exp(a hbar t) sinh(b hbar t)^m`, with
//! the phase `exp(-i u t)` implied. Composite currents combine earlier ones
//! with `+ - * /`, `inv(...)` and `X@(g)` for `X(u + i g ℏ)`. In relation
//! factors `w = u − v` and `gamma[s](a)` is `Γ(i w/(s ℏ) + a)`.

pub mod ast;
pub mod lexer;
pub mod lower;
mod parser;
pub mod printer;

use std::collections::BTreeSet;

pub use ast::DefinitionFile;
pub use lower::{lower, Definitions, LimitSpec};
pub use printer::print;

use ast::*;
use crate::error::{Error, Result};

/// Parses and checks a definition file: every name is declared before use
/// and declared once.
pub fn parse_definitions(text: &str) -> Result<DefinitionFile> {
    let mut p = parser::Parser::new(text)?;
    let file = p.file()?;
    validate(&file)?;
    Ok(file)
}

/// Parses a bare exponent sum such as `-hbar exp(-k/4 hbar t)`.
pub fn parse_mode_sum(text: &str) -> Result<Vec<ModeTerm>> {
    let mut p = parser::Parser::new(text)?;
    let terms = p.mode_sum()?;
    p.expect_eof()?;
    Ok(terms)
}

/// Parses a bare scalar expression such as `(k+2)/4`.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = parser::Parser::new(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

fn refs(e: &CurExpr, out: &mut Vec<String>) {
    match e {
        CurExpr::Scalar(_) | CurExpr::Hbar(_) => {}
        CurExpr::Ref(n, _) => out.push(n.clone()),
        CurExpr::Inv(x) | CurExpr::Neg(x) | CurExpr::Paren(x) => refs(x, out),
        CurExpr::Add(a, b) | CurExpr::Sub(a, b) | CurExpr::Mul(a, b) | CurExpr::Div(a, b) => {
            refs(a, out);
            refs(b, out);
        }
    }
}

fn validate(file: &DefinitionFile) -> Result<()> {
    let mut keys = BTreeSet::new();
    for (k, _) in &file.params.entries {
        if !keys.insert(k.as_str()) {
            return Err(Error::DuplicateName(k.clone()));
        }
    }
    let mut kernels = BTreeSet::new();
    let mut currents = BTreeSet::new();
    let mut ids = BTreeSet::new();
    let need = |set: &BTreeSet<String>, n: &str| {
        if set.contains(n) {
            Ok(())
        } else {
            Err(Error::UndeclaredName(n.to_string()))
        }
    };
    for item in &file.items {
        match item {
            Item::Kernel(k) => {
                if !kernels.insert(k.name.clone()) {
                    return Err(Error::DuplicateName(k.name.clone()));
                }
            }
            Item::Current(c) => {
                match &c.body {
                    CurrentBody::Primitive { family, .. } => need(&kernels, family)?,
                    CurrentBody::Composite(e) => {
                        let mut names = Vec::new();
                        refs(e, &mut names);
                        for n in names {
                            need(&currents, &n)?;
                        }
                    }
                }
                if !currents.insert(c.name.clone()) {
                    return Err(Error::DuplicateName(c.name.clone()));
                }
            }
            Item::Relation(r) => {
                need(&currents, &r.a)?;
                need(&currents, &r.b)?;
                if let RelationBody::Commutator { poles } = &r.body {
                    for p in poles {
                        need(&currents, &p.current)?;
                    }
                }
                if !ids.insert(r.id.clone()) {
                    return Err(Error::DuplicateName(r.id.clone()));
                }
            }
            Item::Limit(l) => {
                need(&currents, &l.a)?;
                need(&currents, &l.b)?;
                if !ids.insert(l.id.clone()) {
                    return Err(Error::DuplicateName(l.id.clone()));
                }
            }
        }
    }
    Ok(())
}
