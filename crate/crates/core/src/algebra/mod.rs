//! Current catalog, relation verification, the `[E, F]` pole analysis and
//! classical limits.

pub mod catalog;
pub mod ef;
pub mod limit;
pub mod relation;
pub mod report;

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub use catalog::{build_catalog, Catalog, Current, NormalOrderedTerm, CATALOG_CURRENTS};
pub use ef::{commutator_analysis, ef_commutator_analysis, PoleAnalysis};
pub use limit::{classical_limit, ClassicalBraid, LimitFit};
pub use relation::{
    current_exchange, term_exchange, verify_relation, FactorAtom, PairExchange, Relation, RelationFactor,
    RelationKind, VerifyOptions,
};
pub use report::{ReportSet, VerificationReport};

/// Which factors the substitution `ℏ → −iℏ` is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum Rotation {
    None,
    /// Only factors produced by kernels marked `wick` (the `ĉ` sector).
    CSector,
    /// Every factor.
    #[default]
    Global,
}

impl Rotation {
    pub fn applies_to(self, wick_kernel: bool) -> bool {
        match self {
            Rotation::None => false,
            Rotation::CSector => wick_kernel,
            Rotation::Global => true,
        }
    }
}

impl FromStr for Rotation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "none" => Ok(Rotation::None),
            "c-sector" => Ok(Rotation::CSector),
            "global" => Ok(Rotation::Global),
            other => Err(Error::InvalidParams(format!(
                "unknown rotation `{other}` (expected none, c-sector or global)"
            ))),
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rotation::None => "none",
            Rotation::CSector => "c-sector",
            Rotation::Global => "global",
        })
    }
}
