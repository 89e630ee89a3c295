//! Syntax tree of a definition file. Parentheses and literal spellings are
//! kept so that printing and re-parsing gives back the same tree.

/// Gaussian-rational expression in `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Literal exactly as written (`2`, `0.25`, `1e-8`).
    Num(String),
    K,
    I,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Paren(Box<Expr>),
}

/// Coefficient in front of a keyword such as `hbar t` or `w`; `None` is an implicit 1.
pub type Coef = Option<Expr>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    /// `(key, values)` in source order.
    pub entries: Vec<(String, Vec<Expr>)>,
}

impl Params {
    pub fn get(&self, key: &str) -> Option<&[Expr]> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelDecl {
    pub name: String,
    pub negative: bool,
    pub slope_a: Coef,
    pub slope_b: Coef,
    pub wick: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModeFactor {
    /// `hbar` or `hbar^n`.
    Hbar(i32),
    /// `exp(c hbar t)`.
    Exp(Coef),
    /// `sinh(c hbar t)^n`.
    Sinh(Coef, i32),
    /// The spectral phase `exp(-i u t)`, always implied.
    Phase,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeTerm {
    pub negative: bool,
    pub coef: Option<Expr>,
    pub factors: Vec<ModeFactor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurExpr {
    Scalar(Expr),
    Hbar(i32),
    /// `Name` or `Name@(g)` for `Name(u + i g hbar)`.
    Ref(String, Option<Expr>),
    Inv(Box<CurExpr>),
    Neg(Box<CurExpr>),
    Add(Box<CurExpr>, Box<CurExpr>),
    Sub(Box<CurExpr>, Box<CurExpr>),
    Mul(Box<CurExpr>, Box<CurExpr>),
    Div(Box<CurExpr>, Box<CurExpr>),
    Paren(Box<CurExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurrentBody {
    Primitive {
        family: String,
        positive: Vec<ModeTerm>,
        negative: Vec<ModeTerm>,
    },
    Composite(CurExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurrentDecl {
    pub name: String,
    pub body: CurrentBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorItem {
    /// `(a w + b hbar - c hbar ...)`; the flag marks a subtracted part.
    Linear { w: Option<Coef>, hbar: Vec<(bool, Coef)> },
    /// `gamma[s](a)`.
    Gamma { scale: Expr, shift: Expr },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorPart {
    pub divide: bool,
    pub item: FactorItem,
    pub power: Option<i32>,
}

/// Empty means the literal `1`.
pub type Factor = Vec<FactorPart>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleDecl {
    pub location: Expr,
    pub current: String,
    pub shift: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationBody {
    Exchange { rotated: bool, left: Factor, right: Factor },
    Commutator { poles: Vec<PoleDecl> },
    Shape,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationDecl {
    pub id: String,
    pub a: String,
    pub b: String,
    pub body: RelationBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitDecl {
    pub id: String,
    pub a: String,
    pub b: String,
    pub alpha: i32,
    pub beta: i32,
    pub at: Expr,
    pub rotated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Kernel(KernelDecl),
    Current(CurrentDecl),
    Relation(RelationDecl),
    Limit(LimitDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinitionFile {
    pub params: Params,
    pub items: Vec<Item>,
}

impl DefinitionFile {
    pub fn kernels(&self) -> impl Iterator<Item = &KernelDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::Kernel(k) => Some(k),
            _ => None,
        })
    }

    pub fn currents(&self) -> impl Iterator<Item = &CurrentDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::Current(c) => Some(c),
            _ => None,
        })
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::Relation(r) => Some(r),
            _ => None,
        })
    }

    pub fn limits(&self) -> impl Iterator<Item = &LimitDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::Limit(l) => Some(l),
            _ => None,
        })
    }
}
