//! Finite metric spaces and single-scale asymptotic-dimension witnesses.

mod bridge;
mod oracle;
mod space;
mod witness;

pub use bridge::{bridge_to_groupoid, verify_bridge, BridgeReport};
pub use oracle::{exhaustive_min_colors, exhaustive_min_witness, DEFAULT_ORACLE_POINTS};
pub use space::{FiniteMetricSpace, GroupGenerators};
pub use witness::{construct_grid_witness, verify_asdim_witness, AsdimReport, AsdimWitness};

use thiserror::Error;

use crate::groupoid::GroupoidError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoarseError {
    #[error("points {0:?} are not covered by any class")]
    CoverGap(Vec<usize>),
    #[error("family {family}: points {x} and {y} lie in distinct classes at distance {distance}")]
    SeparationViolation { family: usize, x: usize, y: usize, distance: u64 },
    #[error("family {family} class {class} has diameter {diameter}, above {bound}")]
    DiameterViolation { family: usize, class: usize, diameter: u64, bound: u64 },
    #[error("unknown point {0}")]
    UnknownPoint(usize),
    #[error("metric axiom fails: {0}")]
    NotAMetric(String),
    #[error("{points} points exceed the limit {limit}")]
    TooLarge { points: usize, limit: usize },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("color {color}: generated class escapes every witness class")]
    TubeEscape { color: usize },
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}
