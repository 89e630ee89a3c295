use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("non-finite complex value {0}")]
    NonFinite(Complex64),
    #[error("Gamma pole at non-positive integer argument {0}")]
    PoleAtNonPositiveInteger(Complex64),
    #[error("asymptotic expansion needs |x| >= 10, got |x| = {0}")]
    ArgumentTooSmall(f64),
    #[error("level k = {0} is excluded")]
    ExcludedLevel(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("terms reference distinct spectral variables `{0}` and `{1}`")]
    MixedSpectralArguments(String, String),
    #[error("product is not meromorphic on the slope lattice: {0}")]
    NonMeromorphicProduct(String),
    #[error("w = {0} lies outside the convergence strip (Im w / hbar < {1} required)")]
    OutsideConvergenceStrip(Complex64, f64),
    #[error("quadrature did not converge: error estimate {0:e}")]
    QuadratureNonConvergent(f64),
    #[error("series families do not telescope into Gamma factors: {0}")]
    NonTelescoping(String),
    #[error("log-divergence coefficients differ: {0} vs {1}")]
    DivergenceMismatch(String, String),
    #[error("unexpected pole at w = {location} from term pair {pair}")]
    UnexpectedPole { location: String, pair: String },
    #[error("residue mismatch at w = {location}: {diff}")]
    ResidueMismatch { location: String, diff: String },
    #[error("classical limit not convergent: fitted order {0}")]
    NonConvergent(f64),
    #[error("parse error at {line}:{col}: expected one of [{}]", expected.join(", "))]
    Parse {
        line: usize,
        col: usize,
        expected: Vec<String>,
    },
    #[error("undeclared name `{0}`")]
    UndeclaredName(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown current `{0}`")]
    UnknownCurrent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
