//! Canonical text form of a [`DefinitionFile`].

use std::fmt::Write;

use super::ast::*;

pub fn expr(e: &Expr) -> String {
    match e {
        Expr::Num(s) => s.clone(),
        Expr::K => "k".into(),
        Expr::I => "i".into(),
        Expr::Neg(x) => format!("-{}", expr(x)),
        Expr::Add(a, b) => format!("{} + {}", expr(a), expr(b)),
        Expr::Sub(a, b) => format!("{} - {}", expr(a), expr(b)),
        Expr::Mul(a, b) => format!("{}*{}", expr(a), expr(b)),
        Expr::Div(a, b) => format!("{}/{}", expr(a), expr(b)),
        Expr::Paren(x) => format!("({})", expr(x)),
    }
}

fn coef(c: &Coef, keyword: &str) -> String {
    match c {
        None => keyword.to_string(),
        Some(e) => format!("{} {keyword}", expr(e)),
    }
}

fn power(n: i32) -> String {
    if n == 1 {
        String::new()
    } else {
        format!("^{n}")
    }
}

fn mode_factor(f: &ModeFactor) -> String {
    match f {
        ModeFactor::Hbar(n) => format!("hbar{}", power(*n)),
        ModeFactor::Exp(c) => format!("exp({} t)", coef(c, "hbar")),
        ModeFactor::Sinh(c, n) => format!("sinh({} t){}", coef(c, "hbar"), power(*n)),
        ModeFactor::Phase => "exp(-i u t)".into(),
    }
}

pub fn mode_sum(terms: &[ModeTerm]) -> String {
    let mut out = String::new();
    for (n, t) in terms.iter().enumerate() {
        match (n, t.negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mut words: Vec<String> = t.coef.iter().map(expr).collect();
        words.extend(t.factors.iter().map(mode_factor));
        out.push_str(&words.join(" "));
    }
    out
}

pub fn cur_expr(e: &CurExpr) -> String {
    match e {
        CurExpr::Scalar(x) => expr(x),
        CurExpr::Hbar(n) => format!("hbar{}", power(*n)),
        CurExpr::Ref(name, None) => name.clone(),
        CurExpr::Ref(name, Some(g)) => format!("{name}@({})", expr(g)),
        CurExpr::Inv(x) => format!("inv({})", cur_expr(x)),
        CurExpr::Neg(x) => format!("-{}", cur_expr(x)),
        CurExpr::Add(a, b) => format!("{} + {}", cur_expr(a), cur_expr(b)),
        CurExpr::Sub(a, b) => format!("{} - {}", cur_expr(a), cur_expr(b)),
        CurExpr::Mul(a, b) => format!("{} * {}", cur_expr(a), cur_expr(b)),
        CurExpr::Div(a, b) => format!("{} / {}", cur_expr(a), cur_expr(b)),
        CurExpr::Paren(x) => format!("({})", cur_expr(x)),
    }
}

pub fn factor(f: &Factor) -> String {
    if f.is_empty() {
        return "1".into();
    }
    let mut out = String::new();
    for (n, p) in f.iter().enumerate() {
        if p.divide {
            out.push_str(" / ");
        } else if n > 0 {
            out.push(' ');
        }
        match &p.item {
            FactorItem::Linear { w, hbar } => {
                out.push('(');
                if let Some(c) = w {
                    out.push_str(&coef(c, "w"));
                }
                for (n, (neg, c)) in hbar.iter().enumerate() {
                    if w.is_some() || n > 0 {
                        out.push_str(if *neg { " - " } else { " + " });
                    }
                    out.push_str(&coef(c, "hbar"));
                }
                out.push(')');
            }
            FactorItem::Gamma { scale, shift } => {
                let _ = write!(out, "gamma[{}]({})", expr(scale), expr(shift));
            }
        }
        if let Some(n) = p.power {
            let _ = write!(out, "^{n}");
        }
    }
    out
}

pub fn print(file: &DefinitionFile) -> String {
    let mut out = String::from("params {\n");
    for (key, values) in &file.params.entries {
        let vs: Vec<String> = values.iter().map(expr).collect();
        let _ = writeln!(out, "  {key} = {}", vs.join(", "));
    }
    out.push_str("}\n");
    for item in &file.items {
        out.push('\n');
        match item {
            Item::Kernel(k) => {
                let _ = writeln!(
                    out,
                    "kernel {} = {}sinh({} t) sinh({} t){}",
                    k.name,
                    if k.negative { "-" } else { "" },
                    coef(&k.slope_a, "hbar"),
                    coef(&k.slope_b, "hbar"),
                    if k.wick { " wick" } else { "" }
                );
            }
            Item::Current(c) => match &c.body {
                CurrentBody::Primitive { family, positive, negative } => {
                    let _ = writeln!(out, "current {} on {family} {{", c.name);
                    if !positive.is_empty() {
                        let _ = writeln!(out, "  t > 0: {}", mode_sum(positive));
                    }
                    if !negative.is_empty() {
                        let _ = writeln!(out, "  t < 0: {}", mode_sum(negative));
                    }
                    out.push_str("}\n");
                }
                CurrentBody::Composite(e) => {
                    let _ = writeln!(out, "current {} = {}", c.name, cur_expr(e));
                }
            },
            Item::Relation(r) => {
                let _ = write!(out, "relation {}: {} {} ", r.id, r.a, r.b);
                match &r.body {
                    RelationBody::Exchange { rotated, left, right } => {
                        let _ = writeln!(
                            out,
                            "exchange{} {{\n  left: {}\n  right: {}\n}}",
                            if *rotated { " rotated" } else { "" },
                            factor(left),
                            factor(right)
                        );
                    }
                    RelationBody::Commutator { poles } => {
                        out.push_str("commutator {\n");
                        for p in poles {
                            let _ = write!(out, "  pole {}: {}", expr(&p.location), p.current);
                            if let Some(g) = &p.shift {
                                let _ = write!(out, "@({})", expr(g));
                            }
                            out.push('\n');
                        }
                        out.push_str("}\n");
                    }
                    RelationBody::Shape => out.push_str("shape\n"),
                }
            }
            Item::Limit(l) => {
                let _ = writeln!(
                    out,
                    "limit {}: {} {} braid({}, {}) at {}{}",
                    l.id,
                    l.a,
                    l.b,
                    l.alpha,
                    l.beta,
                    expr(&l.at),
                    if l.rotated { " rotated" } else { "" }
                );
            }
        }
    }
    out
}
