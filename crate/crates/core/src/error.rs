use thiserror::Error;

use crate::action::ActionError;
use crate::certify::CertifyError;
use crate::coarse::CoarseError;
use crate::cstar::CstarError;
use crate::groupoid::GroupoidError;
use crate::nerve::NerveError;
use crate::pou::PouError;
use crate::symbolic::SymbolicError;
use crate::witness::WitnessError;

/// Errors raised while reading one of the textual file formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed rational {0:?}")]
    Rational(String),
    #[error("malformed json: {0}")]
    Json(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        ParseError::Json(e.to_string())
    }
}

/// Crate-wide error, one variant per module.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Coarse(#[from] CoarseError),
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    Pou(#[from] PouError),
    #[error(transparent)]
    Cstar(#[from] CstarError),
    #[error(transparent)]
    Certify(Box<CertifyError>),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
