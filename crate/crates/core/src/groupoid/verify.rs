use std::collections::BTreeSet;

use serde::Serialize;

use super::{generate_subgroupoid, FiniteGroupoid, GroupoidError, Subgroupoid};

/// Colors of units plus the declared generated subgroupoid of each color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidDadWitness {
    /// The arrow set `K`, sorted.
    pub k: Vec<usize>,
    pub colors: Vec<BTreeSet<usize>>,
    pub generated: Vec<Subgroupoid>,
}

impl GroupoidDadWitness {
    /// Computes the generated subgroupoids from `K` and the colors.
    pub fn from_colors(g: &FiniteGroupoid, mut k: Vec<usize>, colors: Vec<BTreeSet<usize>>) -> Self {
        k.sort_unstable();
        k.dedup();
        let generated = colors
            .iter()
            .map(|u| generate_subgroupoid(g, &seed(g, &k, u)))
            .collect();
        GroupoidDadWitness { k, colors, generated }
    }

    pub fn seed(&self, g: &FiniteGroupoid, color: usize) -> Vec<usize> {
        seed(g, &self.k, &self.colors[color])
    }
}

/// `{g ∈ K : s(g), r(g) ∈ U}`.
pub fn seed(g: &FiniteGroupoid, k: &[usize], u: &BTreeSet<usize>) -> Vec<usize> {
    k.iter()
        .copied()
        .filter(|&x| u.contains(&g.source(x)) && u.contains(&g.range(x)))
        .collect()
}

/// `{(k·x, k, x) : k ∈ E}` in a transformation groupoid.
pub fn action_generators(g: &FiniteGroupoid, e: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = e
        .iter()
        .flat_map(|&k| (0..g.num_points()).map(move |x| g.action_arrow(k, x).expect("transformation groupoid")))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Units touched by `K`.
pub fn touched_units(g: &FiniteGroupoid, k: &[usize]) -> BTreeSet<usize> {
    k.iter().flat_map(|&x| [g.source(x), g.range(x)]).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupoidColorReport {
    pub color: usize,
    pub size: u128,
    pub bound: Option<u128>,
    pub within_bound: bool,
    pub declared_closed: Option<String>,
    pub matches_declared: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupoidReport {
    pub uncovered: Vec<usize>,
    pub colors: Vec<GroupoidColorReport>,
    pub size_bound: Option<u128>,
}

impl GroupoidReport {
    pub fn accepted(&self) -> bool {
        self.status().is_ok()
    }

    pub fn status(&self) -> Result<(), GroupoidError> {
        if !self.uncovered.is_empty() {
            return Err(GroupoidError::CoverGap(self.uncovered.clone()));
        }
        for c in &self.colors {
            if !c.within_bound {
                return Err(GroupoidError::SizeExceeded {
                    color: c.color,
                    size: c.size,
                    bound: c.bound.unwrap_or(u128::MAX),
                });
            }
        }
        for c in &self.colors {
            if let Some(reason) = &c.declared_closed {
                return Err(GroupoidError::NotClosed { color: c.color, reason: reason.clone() });
            }
            if !c.matches_declared {
                return Err(GroupoidError::GeneratedMismatch(c.color));
            }
        }
        Ok(())
    }

    pub fn max_size(&self) -> u128 {
        self.colors.iter().map(|c| c.size).max().unwrap_or(0)
    }
}

/// Cover of `s(K) ∪ r(K)`, then per color: size of the generated
/// subgroupoid against `size_bound`, closedness of the declared set, and
/// equality with it. `None` means every finite subgroupoid counts as small.
pub fn verify_groupoid_dad(
    g: &FiniteGroupoid,
    w: &GroupoidDadWitness,
    size_bound: Option<u128>,
) -> Result<GroupoidReport, GroupoidError> {
    let bounds = vec![size_bound; w.colors.len()];
    let mut r = verify_groupoid_dad_per_color(g, w, &bounds)?;
    r.size_bound = size_bound;
    Ok(r)
}

/// As [`verify_groupoid_dad`] with a separate size bound for each color.
pub fn verify_groupoid_dad_per_color(
    g: &FiniteGroupoid,
    w: &GroupoidDadWitness,
    bounds: &[Option<u128>],
) -> Result<GroupoidReport, GroupoidError> {
    if let Some(&bad) = w.k.iter().find(|&&x| x >= g.num_arrows()) {
        return Err(GroupoidError::UnknownArrow(bad));
    }
    if let Some(&bad) = w.colors.iter().flatten().find(|&&x| x >= g.num_points()) {
        return Err(GroupoidError::UnknownUnit(bad));
    }
    let mut covered = BTreeSet::new();
    for c in &w.colors {
        covered.extend(c.iter().copied());
    }
    let uncovered: Vec<usize> = touched_units(g, &w.k).difference(&covered).copied().collect();
    let colors = std::thread::scope(|s| {
        let handles: Vec<_> = (0..w.colors.len())
            .map(|i| {
                let size_bound = bounds.get(i).copied().flatten();
                s.spawn(move || {
                    let gen = generate_subgroupoid(g, &w.seed(g, i));
                    let size = gen.arrow_count();
                    let declared = w.generated.get(i);
                    let declared_closed = match declared {
                        Some(d) => d.check_closed(g).err(),
                        None => Some("no declared set".into()),
                    };
                    GroupoidColorReport {
                        color: i,
                        size,
                        bound: size_bound,
                        within_bound: size_bound.is_none_or(|b| size <= b),
                        matches_declared: declared.is_some_and(|d| d.same_as(&gen, g)),
                        declared_closed,
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("color check panicked")).collect()
    });
    Ok(GroupoidReport { uncovered, colors, size_bound: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::FiniteAction;

    #[test]
    fn locally_finite_single_color() {
        let g = FiniteGroupoid::disjoint_pairs(&[1, 2, 3, 2]);
        let k: Vec<usize> = (0..g.num_arrows()).collect();
        let all: BTreeSet<usize> = (0..g.num_points()).collect();
        let w = GroupoidDadWitness::from_colors(&g, k, vec![all]);
        let r = verify_groupoid_dad(&g, &w, Some(18)).unwrap();
        assert!(r.accepted(), "{:?}", r.status());
    }

    fn rotation12() -> (FiniteGroupoid, Vec<usize>) {
        let g = FiniteGroupoid::transformation(FiniteAction::rotation(12));
        let k = action_generators(&g, &[11, 0, 1]);
        (g, k)
    }

    #[test]
    fn rotation_single_color_exceeds() {
        let (g, k) = rotation12();
        let w = GroupoidDadWitness::from_colors(&g, k, vec![(0..12).collect()]);
        let r = verify_groupoid_dad(&g, &w, Some(100)).unwrap();
        assert_eq!(r.colors[0].size, 144);
        assert!(matches!(r.status(), Err(GroupoidError::SizeExceeded { size: 144, .. })));
    }

    #[test]
    fn rotation_two_arcs() {
        let (g, k) = rotation12();
        // arcs of six consecutive units; each color is one arc
        let a: BTreeSet<usize> = (0..6).collect();
        let b: BTreeSet<usize> = (6..12).collect();
        let w = GroupoidDadWitness::from_colors(&g, k, vec![a, b]);
        let r = verify_groupoid_dad(&g, &w, Some(36)).unwrap();
        assert!(r.accepted(), "{:?}", r.status());
        assert_eq!(r.max_size(), 36);
    }

    #[test]
    fn cover_gap_and_mismatch() {
        let (g, k) = rotation12();
        let a: BTreeSet<usize> = (0..6).collect();
        let w = GroupoidDadWitness::from_colors(&g, k.clone(), vec![a.clone()]);
        let r = verify_groupoid_dad(&g, &w, None).unwrap();
        assert!(matches!(r.status(), Err(GroupoidError::CoverGap(_))));
        let mut w2 = GroupoidDadWitness::from_colors(&g, k, vec![a, (6..12).collect()]);
        w2.generated[1] = Subgroupoid::Classes(vec![vec![6, 7]]);
        let r = verify_groupoid_dad(&g, &w2, None).unwrap();
        assert_eq!(r.status().unwrap_err(), GroupoidError::GeneratedMismatch(1));
    }
}
