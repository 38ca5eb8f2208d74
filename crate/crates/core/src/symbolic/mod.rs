//! Exact symbolic models of Cantor ℤ-systems.
//!
//! Two families are supported: odometers with an eventually periodic base
//! sequence, and two-sided subshifts given either by a substitution or by a
//! list of forbidden words. Clopen sets are finite unions of cylinders and
//! every Boolean operation and translation on them is exact.

mod clopen;
mod language;
mod returns;
mod system;

pub use clopen::ClopenSet;
pub use language::LangLevel;
pub use returns::{Gap, ReturnTimeReport};
pub use system::{SubshiftRules, SymbolicSystem, SystemKind, Word, DEFAULT_ODOMETER_DEPTH, DEFAULT_SUBSHIFT_DEPTH};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("cylinder depth {requested} exceeds the depth limit {limit}")]
    DepthExceeded { requested: usize, limit: usize },
    #[error("the set is empty")]
    EmptySet,
    #[error("maximal gap exceeds the search bound {0}")]
    BoundExceeded(u64),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("invalid cylinder word {0:?}")]
    InvalidWord(String),
    #[error("clopen sets belong to different systems")]
    SystemMismatch,
    #[error("language has more than {0} words at one length")]
    LanguageTooLarge(usize),
}
