use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::{base_units, build_pou, index_by, power_set, symmetrize, PartitionOfUnity, PouError};
use crate::action::FiniteAction;
use crate::groupoid::verify::{action_generators, seed};
use crate::groupoid::{generate_subgroupoid, verify_groupoid_dad, FiniteGroupoid, GroupoidDadWitness, Subgroupoid};
use crate::nerve::symmetric_generators;

/// Colors after enlargement along `K`, with the checks made on them.
#[derive(Debug, Clone, Serialize)]
pub struct EnlargedCover {
    /// Symmetrized `K`.
    pub k: Vec<usize>,
    pub colors: Vec<BTreeSet<usize>>,
    pub k3_arrows: usize,
    /// Arrow counts of the subgroupoids `G_i` generated inside the input colors by `K³`.
    pub witness_sizes: Vec<u128>,
    /// Arrow counts of the subgroupoids generated inside the enlarged colors by `K`.
    pub generated_sizes: Vec<u128>,
    /// Each enlarged generated subgroupoid lies in `K·G_i·K`.
    pub within_kgk: Vec<bool>,
    /// `s(r⁻¹(x) ∩ K)` lies in one color for every `x ∈ r(K) ∪ s(K)`.
    pub partial_orbits_contained: bool,
}

impl EnlargedCover {
    pub fn accepted(&self) -> bool {
        self.partial_orbits_contained && self.within_kgk.iter().all(|&b| b)
    }
}

/// `U_i := s(K ∩ r⁻¹(V_i)) ∩ (r(K) ∪ s(K))` for colors `V_i` that witness the bound for `K³`.
pub fn enlarge_cover(
    g: &FiniteGroupoid,
    k: &[usize],
    colors: &[BTreeSet<usize>],
    size_bound: Option<u128>,
) -> Result<EnlargedCover, PouError> {
    let ks = symmetrize(g, k);
    let k3 = power_set(g, &ks, 3);
    let w = GroupoidDadWitness::from_colors(g, k3.clone(), colors.to_vec());
    verify_groupoid_dad(g, &w, size_bound)?
        .status()
        .map_err(|e| PouError::WitnessInsufficient(e.to_string()))?;
    let base = base_units(g, &ks);
    let by_range = index_by(&ks, |a| g.range(a));
    let enlarged: Vec<BTreeSet<usize>> = colors
        .iter()
        .map(|v| {
            v.iter()
                .filter_map(|x| by_range.get(x))
                .flatten()
                .map(|&a| g.source(a))
                .filter(|x| base.contains(x))
                .collect()
        })
        .collect();
    let partial_orbits_contained = base.iter().all(|x| {
        let orbit: Vec<usize> = by_range.get(x).into_iter().flatten().map(|&a| g.source(a)).collect();
        enlarged.iter().any(|u| orbit.iter().all(|y| u.contains(y)))
    });
    let mut generated_sizes = Vec::new();
    let mut within_kgk = Vec::new();
    for (u, gi) in enlarged.iter().zip(&w.generated) {
        let h = generate_subgroupoid(g, &seed(g, &ks, u));
        generated_sizes.push(h.arrow_count());
        within_kgk.push(inside_kgk(g, &ks, &h, gi));
    }
    Ok(EnlargedCover {
        k: ks,
        colors: enlarged,
        k3_arrows: k3.len(),
        witness_sizes: w.generated.iter().map(Subgroupoid::arrow_count).collect(),
        generated_sizes,
        within_kgk,
        partial_orbits_contained,
    })
}

/// `H ⊆ K·G·K` for a symmetric `K`.
fn inside_kgk(g: &FiniteGroupoid, k: &[usize], h: &Subgroupoid, gi: &Subgroupoid) -> bool {
    let by_source = index_by(k, |a| g.source(a));
    let by_range = index_by(k, |a| g.range(a));
    match (h, gi) {
        (Subgroupoid::Classes(hc), Subgroupoid::Classes(_)) => {
            // free: the arrow r(k₂) → s(k₀) lies in G iff both ends share a class
            let class = gi.class_map(g);
            let ends = |x: usize, idx: &HashMap<usize, Vec<usize>>, end: &dyn Fn(usize) -> usize| -> HashSet<usize> {
                idx.get(&x).into_iter().flatten().filter_map(|&a| class.get(&end(a)).copied()).collect()
            };
            hc.iter().all(|c| {
                let from_s: Vec<HashSet<usize>> = c.iter().map(|&s| ends(s, &by_source, &|a| g.range(a))).collect();
                let from_r: Vec<HashSet<usize>> = c.iter().map(|&r| ends(r, &by_range, &|a| g.source(a))).collect();
                from_r.iter().all(|b| from_s.iter().all(|a| !a.is_disjoint(b)))
            })
        }
        _ => h.to_arrows(g).into_iter().all(|x| {
            let k0s = by_range.get(&g.range(x)).into_iter().flatten();
            k0s.into_iter().any(|&k0| {
                by_source.get(&g.source(x)).into_iter().flatten().any(|&k2| {
                    let y = g.compose(g.inverse(k0), x).and_then(|y| g.compose(y, g.inverse(k2)));
                    y.is_some_and(|y| gi.contains(g, y))
                })
            })
        }),
    }
}

/// Nested sets `U⁽⁰⁾ ⊆ … ⊆ U⁽ᴺ⁺¹⁾` of one color.
#[derive(Debug, Clone, Serialize)]
pub struct NestedColorTower {
    pub color: usize,
    pub depth: usize,
    pub units: usize,
    pub levels: Vec<BTreeSet<usize>>,
    /// Arrow count of the subgroupoid generated by `K` inside the top level.
    pub generated_size: u128,
}

impl NestedColorTower {
    pub fn top(&self) -> &BTreeSet<usize> {
        self.levels.last().expect("towers have N + 2 levels")
    }
}

/// `U⁽ⁿ⁺¹⁾ := U⁽ⁿ⁾ ∪ s(K ∩ r⁻¹(U⁽ⁿ⁾))` from the given bottom levels, checked for
/// covering, nesting, propagation and smallness of the top level.
pub fn build_tower(
    g: &FiniteGroupoid,
    k: &[usize],
    colors: &[BTreeSet<usize>],
    n: usize,
    size_bound: Option<u128>,
) -> Result<Vec<NestedColorTower>, PouError> {
    let ks = symmetrize(g, k);
    let base = base_units(g, &ks);
    let covered: BTreeSet<usize> = colors.iter().flatten().copied().collect();
    if let Some(x) = base.difference(&covered).next() {
        return Err(PouError::TowerInvalid(format!("bottom levels miss unit {x}")));
    }
    let by_range = index_by(&ks, |a| g.range(a));
    let step = |u: &BTreeSet<usize>| -> BTreeSet<usize> {
        let mut next = u.clone();
        next.extend(u.iter().filter_map(|x| by_range.get(x)).flatten().map(|&a| g.source(a)));
        next
    };
    let mut towers = Vec::new();
    for (color, bottom) in colors.iter().enumerate() {
        if let Some(&x) = bottom.iter().find(|&&x| x >= g.num_points()) {
            return Err(PouError::TowerInvalid(format!("unit {x} is not in the groupoid")));
        }
        let mut levels = vec![bottom.clone()];
        for _ in 0..=n {
            let next = step(levels.last().expect("nonempty"));
            levels.push(next);
        }
        for w in levels.windows(2) {
            let propagated = ks.iter().filter(|&&a| w[0].contains(&g.range(a))).all(|&a| w[1].contains(&g.source(a)));
            if !w[0].is_subset(&w[1]) || !propagated {
                return Err(PouError::TowerInvalid(format!("color {color} is not propagated along K")));
            }
        }
        let top = levels.last().expect("nonempty");
        let generated_size = generate_subgroupoid(g, &seed(g, &ks, top)).arrow_count();
        if let Some(bound) = size_bound.filter(|&b| generated_size > b) {
            return Err(PouError::PropagationEscapesColor { color, size: generated_size, bound });
        }
        towers.push(NestedColorTower { color, depth: n, units: g.num_points(), levels, generated_size });
    }
    Ok(towers)
}

#[derive(Debug, Clone)]
pub struct PouPipeline {
    pub enlarged: EnlargedCover,
    pub towers: Vec<NestedColorTower>,
    pub pou: PartitionOfUnity,
}

/// Enlargement, towers on the enlarged colors, then the normalized functions.
pub fn pou_pipeline(
    g: &FiniteGroupoid,
    k: &[usize],
    colors: &[BTreeSet<usize>],
    n: usize,
    size_bound: Option<u128>,
) -> Result<PouPipeline, PouError> {
    let enlarged = enlarge_cover(g, k, colors, size_bound)?;
    let towers = build_tower(g, &enlarged.k, &enlarged.colors, n, size_bound)?;
    let pou = build_pou(&towers, n)?;
    Ok(PouPipeline { enlarged, towers, pou })
}

/// The pipeline on `Γ ⋉ X` with `K = {(gx, g, x) : g ∈ E ∪ E⁻¹ ∪ {e}}`.
#[derive(Debug, Clone)]
pub struct ActionPou {
    pub groupoid: FiniteGroupoid,
    pub k: Vec<usize>,
    pub pipeline: PouPipeline,
    /// `E·x = {g⁻¹x : g ∈ E}` lies in one support for every `x`.
    pub orbits_in_one_support: bool,
}

pub fn pou_for_action(
    act: &FiniteAction,
    e: &[usize],
    colors: &[BTreeSet<usize>],
    n: usize,
    size_bound: Option<u128>,
) -> Result<ActionPou, PouError> {
    let groupoid = FiniteGroupoid::transformation(act.clone());
    let e_sym = symmetric_generators(act, e);
    let k = action_generators(&groupoid, &e_sym);
    let pipeline = pou_pipeline(&groupoid, &k, colors, n, size_bound)?;
    let group = act.group();
    let orbits_in_one_support = (0..act.points()).all(|x| {
        pipeline
            .pou
            .supports
            .iter()
            .any(|u| e.iter().all(|&h| u.contains(&act.act(group.inv(h), x))))
    });
    Ok(ActionPou { groupoid, k, pipeline, orbits_in_one_support })
}
