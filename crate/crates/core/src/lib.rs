pub mod algebra;
pub mod cli;
pub mod contraction;
pub mod dsl;
pub mod error;
pub mod laurent;
pub mod modes;
pub mod quad;
pub mod rational;
pub mod series;
pub mod specfun;
pub mod structure;

pub use error::{Error, Result};
