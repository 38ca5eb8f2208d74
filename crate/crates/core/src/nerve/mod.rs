//! Probability simplices with the ℓ¹ metric, the skeleton-neighbourhood
//! cover of a complex, equivariant maps into complexes and the conversions
//! between such maps, equivariant covers of `X × Γ` and dad witnesses.
//! Everything is exact rational arithmetic.

mod blr;
mod equivariance;
mod simplex;

pub use blr::{
    check_cover_conditions, cover_from_map, dad_witness_from_blr, map_from_cover, nerve_defect_bound, BlrWitness, CoverReport,
    NerveMap, ProductModel, PulledBackCover,
};
pub use equivariance::{
    act_point, check_equivariance, choose_support, perturbation_delta, perturb_to_finite_support, symmetric_generators,
    EquivarianceReport, Perturbation, SampledMap,
};
pub use simplex::{
    distance_to_face, distance_to_skeleton, l1_distance, nice_cover_assign, nice_cover_membership, nice_cover_radii,
    SimplicialComplex, SimplicialPoint,
};

use thiserror::Error;

use crate::groupoid::GroupoidError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NerveError {
    #[error("not a probability vector: {0}")]
    NotAProbability(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("point is not in the complex (support {0:?} is not a face)")]
    NotInComplex(Vec<usize>),
    #[error("{0:?} is not a simplex of the complex at the requested level")]
    NotASimplex(Vec<usize>),
    #[error("the complex has no vertices")]
    EmptySkeleton,
    #[error("no point of the skeleton cover contains the sample")]
    NotCovered,
    #[error("point {x} has mass {tail} outside S, not below half the budget")]
    NoFiniteS { x: usize, tail: String },
    #[error("map has no sample at point {0}")]
    MissingSample(usize),
    #[error("actions disagree: {0}")]
    ActionMismatch(String),
    #[error("condition ({label}) fails: {detail}")]
    ConditionViolated { label: String, detail: String },
    #[error("cover does not satisfy the interior condition for E^{0}")]
    DepthInsufficient(usize),
    #[error("equivariance defect {defect} is not below {threshold}")]
    EquivarianceTooWeak { defect: String, threshold: String },
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}
