//! Finite-scale witnesses for dynamic asymptotic dimension.

pub mod action;
pub mod certify;
pub mod coarse;
pub mod cstar;
pub mod error;
pub mod groupoid;
pub mod nerve;
pub mod pou;
pub mod rational;
pub mod symbolic;
pub mod witness;

pub use error::{Error, ParseError, Result};
