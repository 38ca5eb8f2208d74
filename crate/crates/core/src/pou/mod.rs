//! Almost invariant partitions of unity on finite groupoids.
//!
//! A dad witness for `K³` is enlarged so that partial orbits of `K` fit in
//! one color, each color is grown into a nested tower along `K`, and the
//! telescoped indicator sums are normalized in squared form. Values of the
//! functions are `ψ / √(max{Σψ², 1})` and every inequality on them is decided
//! exactly on squares.

mod functions;
mod tower;

use std::collections::{BTreeSet, HashMap};

pub use functions::{
    build_pou, default_depth, depth_bound, proof_bound, verify_pou, PartitionOfUnity, PouReport,
};
pub use tower::{
    build_tower, enlarge_cover, pou_for_action, pou_pipeline, ActionPou, EnlargedCover, NestedColorTower,
    PouPipeline,
};

use thiserror::Error;

use crate::groupoid::{FiniteGroupoid, GroupoidError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PouError {
    #[error("colors do not witness the dimension bound for K³: {0}")]
    WitnessInsufficient(String),
    #[error("color {color}: tower top generates {size} arrows, above the bound {bound}")]
    PropagationEscapesColor { color: usize, size: u128, bound: u128 },
    #[error("invalid tower: {0}")]
    TowerInvalid(String),
    #[error("color {color} is nonzero at unit {unit} outside its support")]
    SupportViolation { color: usize, unit: usize },
    #[error("squares sum to {value} at unit {unit}")]
    NormalizationDefect { unit: usize, value: String },
    #[error("color {color} oscillates by at least {epsilon} along arrow {arrow}")]
    OscillationTooLarge { color: usize, arrow: usize, epsilon: String },
    #[error("epsilon must be positive")]
    InvalidEpsilon,
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}

/// `K ∪ K⁻¹ ∪ r(K) ∪ s(K)`, sorted.
pub fn symmetrize(g: &FiniteGroupoid, k: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = k
        .iter()
        .flat_map(|&a| [a, g.inverse(a), g.unit(g.source(a)), g.unit(g.range(a))])
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `{ab : a ∈ A, b ∈ B, s(a) = r(b)}`, sorted.
pub fn compose_sets(g: &FiniteGroupoid, a: &[usize], b: &[usize]) -> Vec<usize> {
    let by_range = index_by(b, |y| g.range(y));
    let mut out = Vec::new();
    for &x in a {
        if let Some(ys) = by_range.get(&g.source(x)) {
            out.extend(ys.iter().map(|&y| g.compose(x, y).expect("composable")));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// `Kⁿ` for a symmetric `K` containing its units.
pub fn power_set(g: &FiniteGroupoid, k: &[usize], n: usize) -> Vec<usize> {
    let mut cur = symmetrize(g, k);
    let base = cur.clone();
    for _ in 1..n {
        cur = compose_sets(g, &cur, &base);
    }
    cur
}

fn index_by(set: &[usize], key: impl Fn(usize) -> usize) -> HashMap<usize, Vec<usize>> {
    let mut out: HashMap<usize, Vec<usize>> = HashMap::new();
    for &x in set {
        out.entry(key(x)).or_default().push(x);
    }
    out
}

/// `r(K) ∪ s(K)`.
fn base_units(g: &FiniteGroupoid, k: &[usize]) -> BTreeSet<usize> {
    k.iter().flat_map(|&a| [g.source(a), g.range(a)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::FiniteAction;

    #[test]
    fn powers_on_a_rotation() {
        let g = FiniteGroupoid::transformation(FiniteAction::rotation(12));
        let k: Vec<usize> = (0..12).map(|x| g.action_arrow(1, x).unwrap()).collect();
        let ks = symmetrize(&g, &k);
        assert_eq!(ks.len(), 36);
        let k3 = power_set(&g, &k, 3);
        let parts: BTreeSet<usize> = k3.iter().map(|&a| g.group_part(a).unwrap()).collect();
        assert_eq!(parts, BTreeSet::from([0, 1, 2, 3, 9, 10, 11]));
        assert_eq!(k3.len(), 84);
        assert_eq!(compose_sets(&g, &ks, &[]), Vec::<usize>::new());
    }
}
