//! Named currents as sums of normal-ordered exponentials over the three
//! oscillator families.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::modes::{AlgebraParams, ExpTrigTerm, Kernel, ModeFunction};
use crate::rational::{fmt_q, qi, GaussQ, Q};

pub const SPECTRAL_VAR: &str = "u";

/// `prefactor · ℏ^{hbar_pow} · :exp Σ_f ∫ g_f(t) a_f(t) dt:`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalOrderedTerm {
    pub prefactor: GaussQ,
    pub hbar_pow: i32,
    /// Kernel name to exponent.
    pub exponents: BTreeMap<String, ModeFunction>,
}

impl NormalOrderedTerm {
    pub fn unit() -> Self {
        Self {
            prefactor: GaussQ::one(),
            hbar_pow: 0,
            exponents: BTreeMap::new(),
        }
    }

    pub fn single(family: &str, mode: ModeFunction) -> Self {
        let mut t = Self::unit();
        t.exponents.insert(family.to_string(), mode);
        t
    }

    /// Normal-ordered product: prefactors multiply, exponents add.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.prefactor = &self.prefactor * &other.prefactor;
        out.hbar_pow += other.hbar_pow;
        for (f, g) in &other.exponents {
            let merged = match out.exponents.get(f) {
                Some(e) => e.add(g)?,
                None => g.clone(),
            };
            out.exponents.insert(f.clone(), merged);
        }
        Ok(out)
    }

    pub fn shifted(&self, gamma: &Q) -> Self {
        Self {
            exponents: self
                .exponents
                .iter()
                .map(|(f, g)| (f.clone(), g.shift_argument(gamma)))
                .collect(),
            ..self.clone()
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            prefactor: self.prefactor.inv(),
            hbar_pow: -self.hbar_pow,
            exponents: self.exponents.iter().map(|(f, g)| (f.clone(), g.negated())).collect(),
        }
    }

    pub fn exponent(&self, family: &str) -> Option<&ModeFunction> {
        self.exponents.get(family)
    }
}

impl fmt::Display for NormalOrderedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prefactor)?;
        if self.hbar_pow != 0 {
            write!(f, "·ℏ^{}", self.hbar_pow)?;
        }
        for (fam, g) in &self.exponents {
            write!(f, "\n    {fam}: {g}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Current {
    pub name: String,
    pub terms: Vec<NormalOrderedTerm>,
}

impl Current {
    pub fn primitive(name: &str, family: &str, mode: ModeFunction) -> Self {
        Self {
            name: name.to_string(),
            terms: vec![NormalOrderedTerm::single(family, mode)],
        }
    }

    pub fn renamed(&self, name: &str) -> Self {
        Self {
            name: name.to_string(),
            terms: self.terms.clone(),
        }
    }

    /// Bilinear normal-ordered product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b)?);
            }
        }
        Ok(Self {
            name: format!("{}·{}", self.name, other.name),
            terms,
        })
    }

    pub fn shifted(&self, gamma: &Q) -> Self {
        Self {
            name: format!("{}[{}]", self.name, fmt_q(gamma)),
            terms: self.terms.iter().map(|t| t.shifted(gamma)).collect(),
        }
    }

    /// Inverse of a single exponential.
    pub fn inverse(&self) -> Result<Self> {
        match self.terms.as_slice() {
            [t] => Ok(Self {
                name: format!("{}^-1", self.name),
                terms: vec![t.inverse()],
            }),
            _ => Err(Error::InvalidParams(format!(
                "only single-term currents can be inverted, `{}` has {} terms",
                self.name,
                self.terms.len()
            ))),
        }
    }

    pub fn scaled(&self, c: &GaussQ, hbar_pow: i32) -> Self {
        Self {
            name: self.name.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| NormalOrderedTerm {
                    prefactor: &t.prefactor * c,
                    hbar_pow: t.hbar_pow + hbar_pow,
                    exponents: t.exponents.clone(),
                })
                .collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self {
            name: format!("{}+{}", self.name, other.name),
            terms,
        }
    }
}

impl fmt::Display for Current {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} term{})", self.name, self.terms.len(), if self.terms.len() == 1 { "" } else { "s" })?;
        for t in &self.terms {
            write!(f, "\n  {t}")?;
        }
        Ok(())
    }
}

/// Kernels and currents of one algebra at fixed parameters.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub params: AlgebraParams,
    pub kernels: BTreeMap<String, Kernel>,
    /// In declaration order.
    pub currents: Vec<Current>,
}

impl Catalog {
    pub fn new(params: AlgebraParams) -> Self {
        Self {
            params,
            kernels: BTreeMap::new(),
            currents: Vec::new(),
        }
    }

    pub fn add_kernel(&mut self, kernel: Kernel) -> Result<()> {
        if self.kernels.contains_key(&kernel.name) {
            return Err(Error::DuplicateName(kernel.name));
        }
        self.kernels.insert(kernel.name.clone(), kernel);
        Ok(())
    }

    pub fn add_current(&mut self, current: Current) -> Result<()> {
        if self.currents.iter().any(|c| c.name == current.name) {
            return Err(Error::DuplicateName(current.name));
        }
        for t in &current.terms {
            if let Some(f) = t.exponents.keys().find(|f| !self.kernels.contains_key(*f)) {
                return Err(Error::UndeclaredName(f.clone()));
            }
        }
        self.currents.push(current);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Current> {
        self.currents
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCurrent(name.to_string()))
    }

    pub fn kernel(&self, name: &str) -> Result<&Kernel> {
        self.kernels
            .get(name)
            .ok_or_else(|| Error::UndeclaredName(name.to_string()))
    }
}

fn term(coeff: i64, shift: Q, sinh: Vec<(Q, i32)>) -> ExpTrigTerm {
    ExpTrigTerm::new(GaussQ::int(coeff), 1, shift, sinh, Q::zero()).expect("catalog slopes are non-zero")
}

fn mode(positive: Vec<ExpTrigTerm>, negative: Vec<ExpTrigTerm>) -> ModeFunction {
    ModeFunction::new(SPECTRAL_VAR, positive, negative)
}

/// `∓ℏ e^{∓(k/4)ℏt}/sinh(kℏt/2)` pair shared by `C±` and `B±`.
fn screened_pair(k: &Q) -> (ModeFunction, ModeFunction) {
    let quarter = k / qi(4);
    let half = k / qi(2);
    let plus = mode(
        vec![term(-1, -quarter.clone(), vec![(half.clone(), -1)])],
        vec![term(-1, quarter.clone(), vec![(half.clone(), -1)])],
    );
    let minus = mode(
        vec![term(1, quarter.clone(), vec![(half.clone(), -1)])],
        vec![term(1, -quarter, vec![(half, -1)])],
    );
    (plus, minus)
}

/// `∓2ℏ sinh(ℏt/2)/sinh(ℏt)` on one half-line, shared by `Λ±` and `β±`.
fn half_line_pair() -> (ModeFunction, ModeFunction) {
    let ratio = || vec![(crate::rational::q(1, 2), 1), (qi(1), -1)];
    (
        mode(vec![term(-2, Q::zero(), ratio())], vec![]),
        mode(vec![], vec![term(2, Q::zero(), ratio())]),
    )
}

pub const CATALOG_CURRENTS: [&str; 14] = [
    "Cp", "Cm", "Hp", "Hm", "Bp", "Bm", "Lp", "Lm", "bp", "bm", "Psi", "PsiDag", "E", "F",
];

/// The free-field catalog: kernels `c`, `b`, `lambda` and the currents
/// `C±, H±, B±, Λ±, β±, Ψ, Ψ†, E, F` (ASCII names in [`CATALOG_CURRENTS`]).
pub fn build_catalog(params: &AlgebraParams) -> Result<Catalog> {
    let params = AlgebraParams::new(params.k.clone(), params.hbar.clone())?;
    let k = params.k.clone();
    let mut cat = Catalog::new(params.clone());
    cat.add_kernel(Kernel::c_hat(&params))?;
    cat.add_kernel(Kernel::b_hat(&params))?;
    cat.add_kernel(Kernel::lambda_hat(&params))?;

    let (cp, cm) = screened_pair(&k);
    let (half_p, half_m) = half_line_pair();
    let cp = Current::primitive("Cp", "c", cp);
    let cm = Current::primitive("Cm", "c", cm);
    let hp = Current::primitive("Hp", "c", mode(vec![term(2, Q::zero(), vec![])], vec![]));
    let hm = Current::primitive("Hm", "c", mode(vec![], vec![term(-2, Q::zero(), vec![])]));
    let (bpm, bmm) = screened_pair(&k);
    let bp = Current::primitive("Bp", "b", bpm);
    let bm = Current::primitive("Bm", "b", bmm);
    let lp = Current::primitive("Lp", "lambda", half_p.clone());
    let lm = Current::primitive("Lm", "lambda", half_m.clone());
    let betap = Current::primitive("bp", "b", half_p);
    let betam = Current::primitive("bm", "b", half_m);

    let g_beta = (&k + qi(2)) / qi(4);
    let g_lambda = &k / qi(4);
    let neg = |q: &Q| -q.clone();
    let inv_hbar = |c: i64| (GaussQ::int(c), -1);

    let psi_a = betap.shifted(&g_beta).mul(&lp.shifted(&g_lambda))?;
    let psi_b = betam.shifted(&neg(&g_beta)).mul(&lm.shifted(&neg(&g_lambda)))?;
    let (c1, h1) = inv_hbar(1);
    let psi = psi_a
        .plus(&psi_b.scaled(&GaussQ::int(-1), 0))
        .mul(&bp)?
        .scaled(&c1, h1)
        .renamed("Psi");

    let dag_a = betap.shifted(&neg(&g_beta)).mul(&lp.shifted(&neg(&g_lambda)).inverse()?)?;
    let dag_b = betam.shifted(&g_beta).mul(&lm.shifted(&g_lambda).inverse()?)?;
    let (c2, h2) = inv_hbar(-1);
    let psi_dag = dag_a
        .plus(&dag_b.scaled(&GaussQ::int(-1), 0))
        .mul(&bm)?
        .scaled(&c2, h2)
        .renamed("PsiDag");

    let e = psi.mul(&cp)?.renamed("E");
    let f = psi_dag.mul(&cm)?.renamed("F");

    for c in [cp, cm, hp, hm, bp, bm, lp, lm, betap, betam, psi, psi_dag, e, f] {
        cat.add_current(c)?;
    }
    Ok(cat)
}
