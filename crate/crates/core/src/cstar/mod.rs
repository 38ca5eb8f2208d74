//! Convolution algebras of finite groupoids.
//!
//! Elements are finitely supported functions on arrows with exact Gaussian
//! rational or floating complex coefficients. Norms are the supremum over
//! orbits of the regular representations on `ℓ²(s⁻¹(x))`.

mod blocks;
mod commutator;
mod element;
mod norm;

pub use blocks::{block_decompose, Block, BlockDecomposition};
pub use commutator::{
    commutator, commutator_report, cutdown, decompose_via_pou, defect_by_convolution, is_bisection,
    min_bisection_cover, ColorTerm, CommutatorReport, DecompositionReport, DeclaredPou, NORM_TOLERANCE,
};
pub use element::{adjoint, convolve, ConvElement, Scalar, C64, CQ};
pub use norm::{norm_report, orbit_representatives, reduced_norm, sparse_spectral_norm, NormReport, RegularRep};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CstarError {
    #[error("elements live on different groupoids")]
    GroupoidMismatch,
    #[error("unknown arrow {0}")]
    UnknownArrow(usize),
    #[error("unit function has {found} values, expected {expected}")]
    UnitFunctionLength { expected: usize, found: usize },
    #[error("cut-down by color {color} leaves its declared subgroupoid at arrow {arrow}")]
    SupportLeak { color: usize, arrow: usize },
    #[error("groupoid is not free: arrow {arrow} is a nontrivial isotropy arrow")]
    NotFree { arrow: usize },
    #[error("block map check failed: {0}")]
    BlockMismatch(String),
}
