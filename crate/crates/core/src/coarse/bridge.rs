use std::collections::BTreeSet;

use serde::Serialize;

use super::{AsdimWitness, CoarseError, FiniteMetricSpace};
use crate::groupoid::{verify_groupoid_dad_per_color, FiniteGroupoid, GroupoidDadWitness, GroupoidReport};

/// Pair groupoid on the points with `K` the tube of radius `R` and colors
/// the unions of the families.
pub fn bridge_to_groupoid(
    x: &FiniteMetricSpace,
    w: &AsdimWitness,
) -> Result<(FiniteGroupoid, GroupoidDadWitness), CoarseError> {
    if let Some(&bad) = w.families.iter().flatten().flatten().find(|&&p| p >= x.len()) {
        return Err(CoarseError::UnknownPoint(bad));
    }
    let g = FiniteGroupoid::pair(x.len());
    let k: Vec<usize> = (0..x.len())
        .flat_map(|s| {
            let g = &g;
            x.neighbors_within(s, w.scale_r)
                .into_iter()
                .map(move |r| g.pair_arrow(r, s).expect("points of the space"))
        })
        .collect();
    let colors: Vec<BTreeSet<usize>> =
        w.families.iter().map(|f| f.iter().flatten().copied().collect()).collect();
    let gw = GroupoidDadWitness::from_colors(&g, k, colors);
    Ok((g, gw))
}

#[derive(Debug, Clone, Serialize)]
pub struct BridgeReport {
    pub groupoid: GroupoidReport,
    /// First color with a generated class not inside one witness class.
    pub escaping_color: Option<usize>,
    /// Largest distance between endpoints of a generated arrow.
    pub max_arrow_distance: u64,
    pub bound_s: u64,
    /// Generated orbit classes coincide with the witness classes.
    pub round_trip_exact: bool,
}

impl BridgeReport {
    pub fn accepted(&self) -> bool {
        self.status().is_ok()
    }

    pub fn status(&self) -> Result<(), CoarseError> {
        self.groupoid.status()?;
        match self.escaping_color {
            Some(color) => Err(CoarseError::TubeEscape { color }),
            None => Ok(()),
        }
    }
}

fn normalized(classes: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    classes
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect()
}

/// Runs the groupoid verifier with the size bound `Σ_{C ∈ family i} |C|²`
/// for color `i`, checks that generated arrows stay inside `⊔ C × C` and
/// compares the generated orbit classes with the witness classes.
pub fn verify_bridge(
    x: &FiniteMetricSpace,
    w: &AsdimWitness,
    g: &FiniteGroupoid,
    gw: &GroupoidDadWitness,
) -> Result<BridgeReport, CoarseError> {
    let bounds: Vec<Option<u128>> = w
        .families
        .iter()
        .map(|f| Some(f.iter().map(|c| (c.len() as u128).pow(2)).sum()))
        .collect();
    let groupoid = verify_groupoid_dad_per_color(g, gw, &bounds)?;
    let mut escaping_color = None;
    let mut max_arrow_distance = 0;
    let mut round_trip_exact = true;
    for (i, family) in w.families.iter().enumerate() {
        let generated = gw.generated.get(i).map(|s| s.orbit_classes(g)).unwrap_or_default();
        let mut owner = vec![usize::MAX; x.len()];
        for (c, class) in family.iter().enumerate() {
            for &p in class {
                owner[p] = c;
            }
        }
        for class in &generated {
            max_arrow_distance = max_arrow_distance.max(x.diameter_of(class));
            let o = owner[class[0]];
            if o == usize::MAX || class.iter().any(|&p| owner[p] != o) {
                escaping_color.get_or_insert(i);
            }
        }
        round_trip_exact &= normalized(&generated) == normalized(family);
    }
    Ok(BridgeReport { groupoid, escaping_color, max_arrow_distance, bound_s: w.bound_s, round_trip_exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::construct_grid_witness;
    use crate::groupoid::GroupoidError;

    #[test]
    fn interval_witness_bridges() {
        let x = FiniteMetricSpace::interval(0, 199).unwrap();
        let w = construct_grid_witness(&x, 10).unwrap();
        let (g, gw) = bridge_to_groupoid(&x, &w).unwrap();
        let r = verify_bridge(&x, &w, &g, &gw).unwrap();
        assert!(r.accepted(), "{:?}", r.status());
        assert!(r.round_trip_exact);
        assert_eq!(r.max_arrow_distance, 49);
    }

    #[test]
    fn bounded_space_one_color() {
        let x = FiniteMetricSpace::path(5);
        let w = AsdimWitness { scale_r: 2, bound_s: 4, families: vec![vec![(0..5).collect()]] };
        let (g, gw) = bridge_to_groupoid(&x, &w).unwrap();
        assert!(verify_bridge(&x, &w, &g, &gw).unwrap().accepted());
    }

    #[test]
    fn merged_classes_are_rejected() {
        let x = FiniteMetricSpace::interval(0, 199).unwrap();
        let mut w = construct_grid_witness(&x, 10).unwrap();
        // move the class [50,100) into the family holding [0,50)
        let moved = w.families[1].remove(0);
        w.families[0].push(moved);
        let (g, gw) = bridge_to_groupoid(&x, &w).unwrap();
        let r = verify_bridge(&x, &w, &g, &gw).unwrap();
        assert!(matches!(r.status(), Err(CoarseError::Groupoid(GroupoidError::SizeExceeded { color: 0, .. }))));
        assert!(!r.round_trip_exact);
    }
}
