use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;

use super::FiniteGroupoid;

/// Arrow set of a subgroupoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subgroupoid {
    /// Free groupoids only: every arrow with both endpoints in one class.
    /// Classes are sorted and listed by their least point.
    Classes(Vec<Vec<usize>>),
    Arrows(BTreeSet<usize>),
}

impl Subgroupoid {
    pub fn empty(g: &FiniteGroupoid) -> Self {
        if g.is_free() {
            Subgroupoid::Classes(Vec::new())
        } else {
            Subgroupoid::Arrows(BTreeSet::new())
        }
    }

    pub fn arrow_count(&self) -> u128 {
        match self {
            Subgroupoid::Classes(cs) => cs.iter().map(|c| (c.len() as u128).pow(2)).sum(),
            Subgroupoid::Arrows(a) => a.len() as u128,
        }
    }

    /// Units touched by the subgroupoid.
    pub fn units(&self, g: &FiniteGroupoid) -> BTreeSet<usize> {
        match self {
            Subgroupoid::Classes(cs) => cs.iter().flatten().copied().collect(),
            Subgroupoid::Arrows(a) => a.iter().flat_map(|&x| [g.source(x), g.range(x)]).collect(),
        }
    }

    /// Connected components of the unit set under the arrows.
    pub fn orbit_classes(&self, g: &FiniteGroupoid) -> Vec<Vec<usize>> {
        match self {
            Subgroupoid::Classes(cs) => cs.clone(),
            Subgroupoid::Arrows(a) => {
                let pairs: Vec<(usize, usize)> = a.iter().map(|&x| (g.source(x), g.range(x))).collect();
                components(g.num_points(), &pairs)
            }
        }
    }

    /// Point-to-class lookup for the class form.
    pub fn class_map(&self, g: &FiniteGroupoid) -> HashMap<usize, usize> {
        self.orbit_classes(g)
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |&x| (x, i)))
            .collect()
    }

    pub fn contains(&self, g: &FiniteGroupoid, arrow: usize) -> bool {
        match self {
            Subgroupoid::Classes(cs) => cs.iter().any(|c| {
                c.binary_search(&g.source(arrow)).is_ok() && c.binary_search(&g.range(arrow)).is_ok()
            }),
            Subgroupoid::Arrows(a) => a.contains(&arrow),
        }
    }

    /// Materialized arrow set.
    pub fn to_arrows(&self, g: &FiniteGroupoid) -> BTreeSet<usize> {
        match self {
            Subgroupoid::Classes(cs) => {
                let mut out = BTreeSet::new();
                for c in cs {
                    for &s in c {
                        for &r in c {
                            out.extend(g.arrows_between(r, s));
                        }
                    }
                }
                out
            }
            Subgroupoid::Arrows(a) => a.clone(),
        }
    }

    /// Closed under units, inverses and composition.
    pub fn check_closed(&self, g: &FiniteGroupoid) -> Result<(), String> {
        match self {
            Subgroupoid::Classes(cs) => {
                if !g.is_free() {
                    return Err("class form requires a free groupoid".into());
                }
                let mut seen = BTreeSet::new();
                for c in cs {
                    if c.windows(2).any(|w| w[0] >= w[1]) {
                        return Err("classes must be strictly sorted".into());
                    }
                    for &x in c {
                        if x >= g.num_points() {
                            return Err(format!("unknown unit {x}"));
                        }
                        if !seen.insert(x) {
                            return Err(format!("unit {x} lies in two classes"));
                        }
                    }
                }
                Ok(())
            }
            Subgroupoid::Arrows(a) => {
                let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for &x in a {
                    if x >= g.num_arrows() {
                        return Err(format!("unknown arrow {x}"));
                    }
                    by_source.entry(g.source(x)).or_default().push(x);
                }
                for &x in a {
                    if !a.contains(&g.inverse(x)) {
                        return Err(format!("inverse of {x} missing"));
                    }
                    if !a.contains(&g.unit(g.source(x))) {
                        return Err(format!("unit at the source of {x} missing"));
                    }
                    for &y in by_source.get(&g.range(x)).into_iter().flatten() {
                        let yx = g.compose(y, x).expect("composable");
                        if !a.contains(&yx) {
                            return Err(format!("{y}·{x} missing"));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Equality as arrow sets, whatever the two forms.
    pub fn same_as(&self, other: &Subgroupoid, g: &FiniteGroupoid) -> bool {
        match (self, other) {
            (Subgroupoid::Classes(a), Subgroupoid::Classes(b)) => normalize(a) == normalize(b),
            (Subgroupoid::Arrows(a), Subgroupoid::Arrows(b)) => a == b,
            _ => {
                self.arrow_count() == other.arrow_count() && self.to_arrows(g) == other.to_arrows(g)
            }
        }
    }
}

fn normalize(cs: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut v: Vec<Vec<usize>> = cs
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort();
            c
        })
        .collect();
    v.sort();
    v
}

/// Components of the graph on touched points, each sorted, listed by least point.
fn components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::<usize>::new(n);
    let mut touched = BTreeSet::new();
    for &(a, b) in edges {
        uf.union(a, b);
        touched.insert(a);
        touched.insert(b);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in touched {
        groups.entry(uf.find_mut(x)).or_default().push(x);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|c| c[0]);
    out
}

/// Least subgroupoid containing `seed`: the union over `n` of
/// `(K ∪ K⁻¹ ∪ r(K) ∪ s(K))^n`. Free groupoids are answered by union-find.
pub fn generate_subgroupoid(g: &FiniteGroupoid, seed: &[usize]) -> Subgroupoid {
    if g.is_free() {
        let edges: Vec<(usize, usize)> = seed.iter().map(|&x| (g.source(x), g.range(x))).collect();
        return Subgroupoid::Classes(components(g.num_points(), &edges));
    }
    let mut set = BTreeSet::new();
    let mut by_source: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut by_range: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut todo = Vec::new();
    let add = |x: usize,
                   set: &mut BTreeSet<usize>,
                   todo: &mut Vec<usize>,
                   by_source: &mut HashMap<usize, Vec<usize>>,
                   by_range: &mut HashMap<usize, Vec<usize>>| {
        if set.insert(x) {
            by_source.entry(g.source(x)).or_default().push(x);
            by_range.entry(g.range(x)).or_default().push(x);
            todo.push(x);
        }
    };
    for &x in seed {
        for y in [x, g.inverse(x), g.unit(g.source(x)), g.unit(g.range(x))] {
            add(y, &mut set, &mut todo, &mut by_source, &mut by_range);
        }
    }
    while let Some(a) = todo.pop() {
        let left: Vec<usize> = by_source.get(&g.range(a)).cloned().unwrap_or_default();
        let right: Vec<usize> = by_range.get(&g.source(a)).cloned().unwrap_or_default();
        for b in left {
            let ba = g.compose(b, a).expect("composable");
            add(ba, &mut set, &mut todo, &mut by_source, &mut by_range);
        }
        for b in right {
            let ab = g.compose(a, b).expect("composable");
            add(ab, &mut set, &mut todo, &mut by_source, &mut by_range);
        }
    }
    Subgroupoid::Arrows(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{FiniteAction, FiniteGroup};

    #[test]
    fn pair_groupoid_chain_generates_everything() {
        let g = FiniteGroupoid::pair(3);
        let seed = [g.pair_arrow(1, 0).unwrap(), g.pair_arrow(2, 1).unwrap()];
        let s = generate_subgroupoid(&g, &seed);
        assert_eq!(s.arrow_count(), 9);
        assert_eq!(s.to_arrows(&g).len(), 9);
        assert!(s.check_closed(&g).is_ok());
    }

    #[test]
    fn empty_and_unit_seeds() {
        let g = FiniteGroupoid::pair(3);
        assert_eq!(generate_subgroupoid(&g, &[]).arrow_count(), 0);
        let u = generate_subgroupoid(&g, &[g.unit(1)]);
        assert_eq!(u.to_arrows(&g), BTreeSet::from([g.unit(1)]));
    }

    #[test]
    fn closure_with_isotropy() {
        // Z/3 acting trivially on two points: isotropy everywhere
        let a = FiniteAction::new(FiniteGroup::cyclic(3), 2, vec![vec![0, 1]; 3]).unwrap();
        let g = FiniteGroupoid::transformation(a);
        let gen = generate_subgroupoid(&g, &[g.action_arrow(1, 0).unwrap()]);
        let expect: BTreeSet<usize> = (0..3).map(|k| g.action_arrow(k, 0).unwrap()).collect();
        assert_eq!(gen, Subgroupoid::Arrows(expect));
        assert!(gen.check_closed(&g).is_ok());
        let broken = Subgroupoid::Arrows(BTreeSet::from([g.action_arrow(1, 0).unwrap()]));
        assert!(broken.check_closed(&g).is_err());
    }

    #[test]
    fn forms_compare_as_arrow_sets() {
        let g = FiniteGroupoid::transformation(FiniteAction::rotation(6));
        let seed = [g.action_arrow(1, 0).unwrap()];
        let classes = generate_subgroupoid(&g, &seed);
        let arrows = Subgroupoid::Arrows(classes.to_arrows(&g));
        assert!(classes.same_as(&arrows, &g));
        assert_eq!(classes.arrow_count(), 4);
    }
}
