//! Recursive-descent parser with one token of lookahead.

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use crate::error::{Error, Result};

pub const PARAM_KEYS: [&str; 5] = ["k", "hbar", "limit_hbar", "tol", "limit_order"];

const RESERVED: [&str; 26] = [
    "params", "kernel", "current", "relation", "limit", "on", "k", "i", "hbar", "w", "t", "u", "exp", "sinh",
    "gamma", "inv", "wick", "exchange", "commutator", "shape", "rotated", "left", "right", "pole", "braid", "at",
];

const EXPR_START: [&str; 5] = ["number", "`k`", "`i`", "`(`", "`-`"];

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self> {
        Ok(Self { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn at_punct(&self, c: char) -> bool {
        matches!(self.peek(), Tok::Punct(x) if *x == c)
    }

    fn err<T>(&self, expected: &[&str]) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Parse {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn eat_ident(&mut self, s: &str) -> bool {
        if self.at_ident(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.at_punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self, s: &str) -> Result<()> {
        if self.eat_ident(s) {
            Ok(())
        } else {
            self.err(&[&format!("`{s}`")])
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            self.err(&[&format!("`{c}`")])
        }
    }

    /// A user-chosen identifier (not a keyword).
    fn name(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.err(&["identifier"]),
        }
    }

    fn int(&mut self) -> Result<i32> {
        let neg = if self.eat_punct('-') {
            true
        } else {
            self.eat_punct('+');
            false
        };
        match self.peek().clone() {
            Tok::Number(s) if s.chars().all(|c| c.is_ascii_digit()) => {
                let Ok(v) = s.parse::<i32>() else { return self.err(&["integer"]) };
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => self.err(&["integer"]),
        }
    }

    pub(crate) fn expect_eof(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err(&["end of input"])
        }
    }

    // ---- expressions ----

    pub(crate) fn expr(&mut self) -> Result<Expr> {
        let lhs = self.term()?;
        self.expr_from(lhs)
    }

    fn expr_from(&mut self, mut lhs: Expr) -> Result<Expr> {
        loop {
            if self.eat_punct('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_punct('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let lhs = self.unary()?;
        self.term_from(lhs)
    }

    fn term_from(&mut self, mut lhs: Expr) -> Result<Expr> {
        loop {
            if self.eat_punct('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_punct('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_punct('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Number(s) => {
                self.bump();
                Ok(Expr::Num(s))
            }
            Tok::Ident(s) if s == "k" => {
                self.bump();
                Ok(Expr::K)
            }
            Tok::Ident(s) if s == "i" => {
                self.bump();
                Ok(Expr::I)
            }
            Tok::Punct('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(')')?;
                Ok(Expr::Paren(Box::new(e)))
            }
            _ => self.err(&EXPR_START),
        }
    }

    /// Products of atoms without a leading sign, as in `(k+2)/4 exp(...)`.
    fn product(&mut self) -> Result<Expr> {
        let lhs = self.atom()?;
        self.term_from(lhs)
    }

    /// Optional coefficient in front of one of `keywords`.
    fn coef_before(&mut self, keywords: &[&str]) -> Result<Coef> {
        if keywords.iter().any(|k| self.at_ident(k)) {
            return Ok(None);
        }
        if self.eat_punct('-') {
            if keywords.iter().any(|k| self.at_ident(k)) {
                return Ok(Some(Expr::Neg(Box::new(Expr::Num("1".into())))));
            }
            let first = match self.unary() {
                Ok(e) => e,
                Err(_) => {
                    let mut exp: Vec<String> = EXPR_START.iter().map(|s| s.to_string()).collect();
                    exp.extend(keywords.iter().map(|k| format!("`{k}`")));
                    let t = &self.toks[self.pos];
                    return Err(Error::Parse { line: t.line, col: t.col, expected: exp });
                }
            };
            let lhs = self.term_from(Expr::Neg(Box::new(first)))?;
            return Ok(Some(self.expr_from(lhs)?));
        }
        match self.expr() {
            Ok(e) => Ok(Some(e)),
            Err(Error::Parse { line, col, mut expected }) => {
                if (line, col) == (self.toks[self.pos].line, self.toks[self.pos].col) {
                    expected.extend(keywords.iter().map(|k| format!("`{k}`")));
                }
                Err(Error::Parse { line, col, expected })
            }
            Err(e) => Err(e),
        }
    }

    /// `[c] hbar t`.
    fn slope(&mut self) -> Result<Coef> {
        let c = self.coef_before(&["hbar"])?;
        self.expect_ident("hbar")?;
        self.expect_ident("t")?;
        Ok(c)
    }

    // ---- definition file ----

    pub(crate) fn file(&mut self) -> Result<DefinitionFile> {
        let params = self.params()?;
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Tok::Ident(s) if s == "kernel" => items.push(Item::Kernel(self.kernel()?)),
                Tok::Ident(s) if s == "current" => items.push(Item::Current(self.current()?)),
                Tok::Ident(s) if s == "relation" => items.push(Item::Relation(self.relation()?)),
                Tok::Ident(s) if s == "limit" => items.push(Item::Limit(self.limit()?)),
                Tok::Eof => break,
                _ => return self.err(&["`kernel`", "`current`", "`relation`", "`limit`", "end of input"]),
            }
        }
        Ok(DefinitionFile { params, items })
    }

    fn params(&mut self) -> Result<Params> {
        self.expect_ident("params")?;
        self.expect_punct('{')?;
        let mut entries = Vec::new();
        while !self.eat_punct('}') {
            let key = match self.peek().clone() {
                Tok::Ident(s) if PARAM_KEYS.contains(&s.as_str()) => {
                    self.bump();
                    s
                }
                _ => {
                    let mut exp: Vec<String> = PARAM_KEYS.iter().map(|k| format!("`{k}`")).collect();
                    exp.push("`}`".into());
                    let t = &self.toks[self.pos];
                    return Err(Error::Parse { line: t.line, col: t.col, expected: exp });
                }
            };
            self.expect_punct('=')?;
            let mut values = vec![self.expr()?];
            while self.eat_punct(',') {
                values.push(self.expr()?);
            }
            entries.push((key, values));
        }
        Ok(Params { entries })
    }

    fn kernel(&mut self) -> Result<KernelDecl> {
        self.expect_ident("kernel")?;
        let name = self.name()?;
        self.expect_punct('=')?;
        let negative = if self.eat_punct('-') {
            true
        } else {
            self.eat_punct('+');
            false
        };
        self.expect_ident("sinh")?;
        self.expect_punct('(')?;
        let slope_a = self.slope()?;
        self.expect_punct(')')?;
        self.expect_ident("sinh")?;
        self.expect_punct('(')?;
        let slope_b = self.slope()?;
        self.expect_punct(')')?;
        let wick = self.eat_ident("wick");
        Ok(KernelDecl {
            name,
            negative,
            slope_a,
            slope_b,
            wick,
        })
    }

    fn current(&mut self) -> Result<CurrentDecl> {
        self.expect_ident("current")?;
        let name = self.name()?;
        if self.eat_ident("on") {
            let family = self.name()?;
            self.expect_punct('{')?;
            let mut positive = Vec::new();
            let mut negative = Vec::new();
            while !self.eat_punct('}') {
                if !self.at_ident("t") {
                    return self.err(&["`t`", "`}`"]);
                }
                self.bump();
                let pos = if self.eat_punct('>') {
                    true
                } else if self.eat_punct('<') {
                    false
                } else {
                    return self.err(&["`>`", "`<`"]);
                };
                match self.peek() {
                    Tok::Number(s) if s == "0" => {
                        self.bump();
                    }
                    _ => return self.err(&["number 0"]),
                }
                self.expect_punct(':')?;
                let terms = self.mode_sum()?;
                if pos {
                    positive.extend(terms);
                } else {
                    negative.extend(terms);
                }
            }
            Ok(CurrentDecl {
                name,
                body: CurrentBody::Primitive { family, positive, negative },
            })
        } else if self.eat_punct('=') {
            Ok(CurrentDecl {
                name,
                body: CurrentBody::Composite(self.cur_expr()?),
            })
        } else {
            self.err(&["`on`", "`=`"])
        }
    }

    pub(crate) fn mode_sum(&mut self) -> Result<Vec<ModeTerm>> {
        let mut negative = if self.eat_punct('-') {
            true
        } else {
            self.eat_punct('+');
            false
        };
        let mut out = Vec::new();
        loop {
            out.push(self.mode_term(negative)?);
            if self.eat_punct('+') {
                negative = false;
            } else if self.eat_punct('-') {
                negative = true;
            } else {
                return Ok(out);
            }
        }
    }

    fn at_mode_factor(&self) -> bool {
        self.at_ident("hbar") || self.at_ident("exp") || self.at_ident("sinh")
    }

    fn mode_term(&mut self, negative: bool) -> Result<ModeTerm> {
        let coef = match self.peek() {
            Tok::Number(_) | Tok::Punct('(') => Some(self.product()?),
            Tok::Ident(s) if s == "k" || s == "i" => Some(self.product()?),
            _ => None,
        };
        if coef.is_none() && !self.at_mode_factor() {
            return self.err(&["number", "`k`", "`i`", "`(`", "`hbar`", "`exp`", "`sinh`"]);
        }
        let mut factors = Vec::new();
        while self.at_mode_factor() {
            factors.push(self.mode_factor()?);
        }
        Ok(ModeTerm { negative, coef, factors })
    }

    fn mode_factor(&mut self) -> Result<ModeFactor> {
        if self.eat_ident("hbar") {
            let n = if self.eat_punct('^') { self.int()? } else { 1 };
            return Ok(ModeFactor::Hbar(n));
        }
        if self.eat_ident("exp") {
            self.expect_punct('(')?;
            let c = self.coef_before(&["hbar", "u"])?;
            if self.at_ident("u") {
                if c != Some(Expr::Neg(Box::new(Expr::I))) {
                    return self.err(&["`hbar`"]);
                }
                self.bump();
                self.expect_ident("t")?;
                self.expect_punct(')')?;
                return Ok(ModeFactor::Phase);
            }
            self.expect_ident("hbar")?;
            self.expect_ident("t")?;
            self.expect_punct(')')?;
            return Ok(ModeFactor::Exp(c));
        }
        self.expect_ident("sinh")?;
        self.expect_punct('(')?;
        let c = self.slope()?;
        self.expect_punct(')')?;
        let n = if self.eat_punct('^') { self.int()? } else { 1 };
        Ok(ModeFactor::Sinh(c, n))
    }

    fn cur_expr(&mut self) -> Result<CurExpr> {
        let mut lhs = self.cur_term()?;
        loop {
            if self.eat_punct('+') {
                lhs = CurExpr::Add(Box::new(lhs), Box::new(self.cur_term()?));
            } else if self.eat_punct('-') {
                lhs = CurExpr::Sub(Box::new(lhs), Box::new(self.cur_term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn cur_term(&mut self) -> Result<CurExpr> {
        let mut lhs = self.cur_unary()?;
        loop {
            if self.eat_punct('*') {
                lhs = CurExpr::Mul(Box::new(lhs), Box::new(self.cur_unary()?));
            } else if self.eat_punct('/') {
                lhs = CurExpr::Div(Box::new(lhs), Box::new(self.cur_unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn cur_unary(&mut self) -> Result<CurExpr> {
        if self.eat_punct('-') {
            return Ok(CurExpr::Neg(Box::new(self.cur_unary()?)));
        }
        match self.peek().clone() {
            Tok::Number(s) => {
                self.bump();
                Ok(CurExpr::Scalar(Expr::Num(s)))
            }
            Tok::Ident(s) if s == "k" => {
                self.bump();
                Ok(CurExpr::Scalar(Expr::K))
            }
            Tok::Ident(s) if s == "i" => {
                self.bump();
                Ok(CurExpr::Scalar(Expr::I))
            }
            Tok::Ident(s) if s == "hbar" => {
                self.bump();
                let n = if self.eat_punct('^') { self.int()? } else { 1 };
                Ok(CurExpr::Hbar(n))
            }
            Tok::Ident(s) if s == "inv" => {
                self.bump();
                self.expect_punct('(')?;
                let e = self.cur_expr()?;
                self.expect_punct(')')?;
                Ok(CurExpr::Inv(Box::new(e)))
            }
            Tok::Punct('(') => {
                self.bump();
                let e = self.cur_expr()?;
                self.expect_punct(')')?;
                Ok(CurExpr::Paren(Box::new(e)))
            }
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                let shift = if self.eat_punct('@') {
                    self.expect_punct('(')?;
                    let g = self.expr()?;
                    self.expect_punct(')')?;
                    Some(g)
                } else {
                    None
                };
                Ok(CurExpr::Ref(s, shift))
            }
            _ => self.err(&["identifier", "number", "`k`", "`i`", "`hbar`", "`inv`", "`(`", "`-`"]),
        }
    }

    fn relation(&mut self) -> Result<RelationDecl> {
        self.expect_ident("relation")?;
        let id = self.name()?;
        self.expect_punct(':')?;
        let a = self.name()?;
        let b = self.name()?;
        let body = if self.eat_ident("exchange") {
            let rotated = self.eat_ident("rotated");
            self.expect_punct('{')?;
            self.expect_ident("left")?;
            self.expect_punct(':')?;
            let left = self.factor()?;
            self.expect_ident("right")?;
            self.expect_punct(':')?;
            let right = self.factor()?;
            self.expect_punct('}')?;
            RelationBody::Exchange { rotated, left, right }
        } else if self.eat_ident("commutator") {
            self.expect_punct('{')?;
            let mut poles = Vec::new();
            while !self.eat_punct('}') {
                if !self.eat_ident("pole") {
                    return self.err(&["`pole`", "`}`"]);
                }
                let location = self.expr()?;
                self.expect_punct(':')?;
                let current = self.name()?;
                let shift = if self.eat_punct('@') {
                    self.expect_punct('(')?;
                    let g = self.expr()?;
                    self.expect_punct(')')?;
                    Some(g)
                } else {
                    None
                };
                poles.push(PoleDecl { location, current, shift });
            }
            RelationBody::Commutator { poles }
        } else if self.eat_ident("shape") {
            RelationBody::Shape
        } else {
            return self.err(&["`exchange`", "`commutator`", "`shape`"]);
        };
        Ok(RelationDecl { id, a, b, body })
    }

    fn factor(&mut self) -> Result<Factor> {
        if let Tok::Number(s) = self.peek() {
            if s == "1" {
                self.bump();
                return Ok(Vec::new());
            }
        }
        let mut parts = vec![self.factor_part(false)?];
        loop {
            let divide = self.eat_punct('/');
            let explicit = divide || self.eat_punct('*');
            if !explicit && !self.at_punct('(') && !self.at_ident("gamma") {
                return Ok(parts);
            }
            parts.push(self.factor_part(divide)?);
        }
    }

    fn factor_part(&mut self, divide: bool) -> Result<FactorPart> {
        let item = if self.eat_ident("gamma") {
            self.expect_punct('[')?;
            let scale = self.expr()?;
            self.expect_punct(']')?;
            self.expect_punct('(')?;
            let shift = self.expr()?;
            self.expect_punct(')')?;
            FactorItem::Gamma { scale, shift }
        } else if self.eat_punct('(') {
            let c = self.coef_before(&["w", "hbar"])?;
            let (w, mut hbar) = if self.eat_ident("w") {
                (Some(c), Vec::new())
            } else if self.eat_ident("hbar") {
                (None, vec![(false, c)])
            } else {
                return self.err(&["`w`", "`hbar`"]);
            };
            while self.at_punct('+') || self.at_punct('-') {
                let neg = self.bump() == Tok::Punct('-');
                let hc = self.coef_before(&["hbar"])?;
                self.expect_ident("hbar")?;
                hbar.push((neg, hc));
            }
            let item = FactorItem::Linear { w, hbar };
            self.expect_punct(')')?;
            item
        } else {
            return self.err(&["`(`", "`gamma`", "number 1"]);
        };
        let power = if self.eat_punct('^') { Some(self.int()?) } else { None };
        Ok(FactorPart { divide, item, power })
    }

    fn limit(&mut self) -> Result<LimitDecl> {
        self.expect_ident("limit")?;
        let id = self.name()?;
        self.expect_punct(':')?;
        let a = self.name()?;
        let b = self.name()?;
        self.expect_ident("braid")?;
        self.expect_punct('(')?;
        let alpha = self.int()?;
        self.expect_punct(',')?;
        let beta = self.int()?;
        self.expect_punct(')')?;
        self.expect_ident("at")?;
        let at = self.expr()?;
        let rotated = self.eat_ident("rotated");
        Ok(LimitDecl {
            id,
            a,
            b,
            alpha,
            beta,
            at,
            rotated,
        })
    }
}
