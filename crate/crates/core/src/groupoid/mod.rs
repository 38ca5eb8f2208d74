//! Finite groupoids with arrows `0..n` and objects (units) `0..m`.
//!
//! Three representations share one interface: pair groupoids and
//! transformation groupoids compute structure arithmetically so that large
//! instances are never materialized, while explicit groupoids carry their
//! composition table.

mod subgroupoid;
pub mod verify;

pub use subgroupoid::{generate_subgroupoid, Subgroupoid};
pub use verify::{verify_groupoid_dad, verify_groupoid_dad_per_color, GroupoidColorReport, GroupoidDadWitness, GroupoidReport};

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::action::{ActionError, FiniteAction};

/// Above this many arrows the groupoid laws are checked on random samples.
pub const EXHAUSTIVE_LAW_CHECK: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("groupoid law violated: {0}")]
    LawViolated(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(usize),
    #[error("unknown unit {0}")]
    UnknownUnit(usize),
    #[error("units {0:?} are not covered by the colors")]
    CoverGap(Vec<usize>),
    #[error("color {color}: generated subgroupoid has {size} arrows, above the bound {bound}")]
    SizeExceeded { color: usize, size: u128, bound: u128 },
    #[error("color {color}: declared generated set is not a subgroupoid ({reason})")]
    NotClosed { color: usize, reason: String },
    #[error("color {0}: declared generated set differs from the generated subgroupoid")]
    GeneratedMismatch(usize),
}

#[derive(Debug, Clone)]
struct Explicit {
    source: Vec<usize>,
    range: Vec<usize>,
    inverse: Vec<usize>,
    unit_arrow: Vec<usize>,
    compose: HashMap<(usize, usize), usize>,
    from_index: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
enum Repr {
    Explicit(Explicit),
    Pair,
    Transformation(FiniteAction),
}

#[derive(Debug, Clone)]
pub struct FiniteGroupoid {
    repr: Repr,
    points: usize,
    arrows: usize,
    free: bool,
}

impl FiniteGroupoid {
    /// The full pair groupoid on `n` points; arrow `r*n + s` goes from `s` to `r`.
    pub fn pair(n: usize) -> Self {
        FiniteGroupoid { repr: Repr::Pair, points: n, arrows: n * n, free: true }
    }

    /// `Γ ⋉ X`: arrow `g*|X| + x` is `(g·x, g, x)`.
    pub fn transformation(action: FiniteAction) -> Self {
        let points = action.points();
        let arrows = action.group().order() * points;
        let free = action.is_free();
        FiniteGroupoid { repr: Repr::Transformation(action), points, arrows, free }
    }

    /// Explicit groupoid. Arrows `0..arrows` have the given source and range
    /// units; `unit_arrow[x]` is the identity at `x`; `compose` lists every
    /// composable pair `(g, h)` with `s(g) = r(h)` where neither is a unit.
    pub fn explicit(
        points: usize,
        unit_arrow: Vec<usize>,
        source: Vec<usize>,
        range: Vec<usize>,
        compose: Vec<(usize, usize, usize)>,
    ) -> Result<Self, GroupoidError> {
        let n = source.len();
        let law = |m: String| GroupoidError::LawViolated(m);
        if range.len() != n || unit_arrow.len() != points {
            return Err(law("source, range and unit lists disagree in length".into()));
        }
        if let Some(&x) = source.iter().chain(&range).find(|&&x| x >= points) {
            return Err(GroupoidError::UnknownUnit(x));
        }
        let mut is_unit = vec![false; n];
        for (x, &u) in unit_arrow.iter().enumerate() {
            if u >= n {
                return Err(GroupoidError::UnknownArrow(u));
            }
            if is_unit[u] || source[u] != x || range[u] != x {
                return Err(law(format!("unit arrow {u} must be a loop at unit {x}")));
            }
            is_unit[u] = true;
        }
        let mut table = HashMap::new();
        for (g, h, gh) in compose {
            if g >= n || h >= n || gh >= n {
                return Err(GroupoidError::UnknownArrow(g.max(h).max(gh)));
            }
            if source[g] != range[h] {
                return Err(law(format!("{g}·{h} listed but s({g}) != r({h})")));
            }
            if source[gh] != source[h] || range[gh] != range[g] {
                return Err(law(format!("{g}·{h} = {gh} has wrong endpoints")));
            }
            if table.insert((g, h), gh).is_some_and(|old| old != gh) {
                return Err(law(format!("{g}·{h} listed twice with different values")));
            }
        }
        let mut from_index = vec![Vec::new(); points];
        for g in 0..n {
            from_index[source[g]].push(g);
        }
        let mut gpd = Explicit {
            source,
            range,
            inverse: vec![usize::MAX; n],
            unit_arrow,
            compose: table,
            from_index,
        };
        // completeness of the table
        for g in 0..n {
            if is_unit[g] {
                continue;
            }
            for &h in &gpd.from_index_rev(gpd.source[g]) {
                if !is_unit[h] && !gpd.compose.contains_key(&(g, h)) {
                    return Err(law(format!("composition {g}·{h} missing")));
                }
            }
        }
        for g in 0..n {
            let (s, r) = (gpd.source[g], gpd.range[g]);
            let inv = gpd.from_index[r].iter().copied().find(|&h| {
                gpd.range[h] == s
                    && gpd.compose_raw(g, h, &is_unit) == Some(gpd.unit_arrow[r])
                    && gpd.compose_raw(h, g, &is_unit) == Some(gpd.unit_arrow[s])
            });
            gpd.inverse[g] = inv.ok_or_else(|| law(format!("arrow {g} has no inverse")))?;
        }
        let free = (0..n).all(|g| is_unit[g] || gpd.source[g] != gpd.range[g]);
        let out = FiniteGroupoid { repr: Repr::Explicit(gpd), points, arrows: n, free };
        out.check_associativity()?;
        Ok(out)
    }

    /// Disjoint union of full pair groupoids on blocks of the given sizes.
    pub fn disjoint_pairs(sizes: &[usize]) -> Self {
        let mut source = Vec::new();
        let mut range = Vec::new();
        let mut unit_arrow = Vec::new();
        let mut compose = Vec::new();
        let mut offset = 0;
        for &m in sizes {
            let base = source.len();
            let id = |r: usize, s: usize| base + r * m + s;
            for r in 0..m {
                for s in 0..m {
                    source.push(offset + s);
                    range.push(offset + r);
                }
            }
            for x in 0..m {
                unit_arrow.push(id(x, x));
            }
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        if a != b && b != c {
                            compose.push((id(a, b), id(b, c), id(a, c)));
                        }
                    }
                }
            }
            offset += m;
        }
        Self::explicit(offset, unit_arrow, source, range, compose).expect("disjoint pair groupoids are valid")
    }

    pub fn num_points(&self) -> usize {
        self.points
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows
    }

    pub fn is_free(&self) -> bool {
        self.free
    }

    pub fn action(&self) -> Option<&FiniteAction> {
        match &self.repr {
            Repr::Transformation(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self.repr, Repr::Pair)
    }

    pub fn source(&self, g: usize) -> usize {
        match &self.repr {
            Repr::Explicit(e) => e.source[g],
            Repr::Pair => g % self.points,
            Repr::Transformation(_) => g % self.points,
        }
    }

    pub fn range(&self, g: usize) -> usize {
        match &self.repr {
            Repr::Explicit(e) => e.range[g],
            Repr::Pair => g / self.points,
            Repr::Transformation(a) => a.act(g / self.points, g % self.points),
        }
    }

    /// Identity arrow at unit `x`.
    pub fn unit(&self, x: usize) -> usize {
        match &self.repr {
            Repr::Explicit(e) => e.unit_arrow[x],
            Repr::Pair => x * self.points + x,
            Repr::Transformation(a) => a.group().identity() * self.points + x,
        }
    }

    pub fn is_unit(&self, g: usize) -> bool {
        self.unit(self.source(g)) == g
    }

    pub fn inverse(&self, g: usize) -> usize {
        match &self.repr {
            Repr::Explicit(e) => e.inverse[g],
            Repr::Pair => self.source(g) * self.points + self.range(g),
            Repr::Transformation(a) => {
                let x = g % self.points;
                let k = g / self.points;
                a.group().inv(k) * self.points + a.act(k, x)
            }
        }
    }

    /// `g·h`, defined iff `s(g) = r(h)`.
    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        if self.source(g) != self.range(h) {
            return None;
        }
        match &self.repr {
            Repr::Explicit(e) => {
                if self.is_unit(g) {
                    Some(h)
                } else if self.is_unit(h) {
                    Some(g)
                } else {
                    e.compose.get(&(g, h)).copied()
                }
            }
            Repr::Pair => Some(self.range(g) * self.points + self.source(h)),
            Repr::Transformation(a) => {
                let kg = g / self.points;
                let kh = h / self.points;
                Some(a.group().mul(kg, kh) * self.points + h % self.points)
            }
        }
    }

    /// Group element of a transformation-groupoid arrow.
    pub fn group_part(&self, g: usize) -> Option<usize> {
        match &self.repr {
            Repr::Transformation(_) => Some(g / self.points),
            _ => None,
        }
    }

    /// Arrow `(k·x, k, x)` of a transformation groupoid.
    pub fn action_arrow(&self, k: usize, x: usize) -> Option<usize> {
        match &self.repr {
            Repr::Transformation(_) => Some(k * self.points + x),
            _ => None,
        }
    }

    /// Pair-groupoid arrow from `s` to `r`.
    pub fn pair_arrow(&self, r: usize, s: usize) -> Option<usize> {
        match &self.repr {
            Repr::Pair => Some(r * self.points + s),
            _ => None,
        }
    }

    /// Arrows with source `x`, sorted.
    pub fn arrows_from(&self, x: usize) -> Vec<usize> {
        match &self.repr {
            Repr::Explicit(e) => e.from_index[x].clone(),
            Repr::Pair | Repr::Transformation(_) => {
                let k = self.arrows / self.points;
                (0..k).map(|r| r * self.points + x).collect()
            }
        }
    }

    /// Arrows from `s` to `r`.
    pub fn arrows_between(&self, r: usize, s: usize) -> Vec<usize> {
        match &self.repr {
            Repr::Pair => vec![r * self.points + s],
            _ => self.arrows_from(s).into_iter().filter(|&g| self.range(g) == r).collect(),
        }
    }

    /// Isotropy arrows that are not units, by brute force.
    pub fn isotropy_witness(&self) -> Option<usize> {
        (0..self.arrows).find(|&g| self.source(g) == self.range(g) && !self.is_unit(g))
    }

    fn check_associativity(&self) -> Result<(), GroupoidError> {
        let n = self.arrows;
        let check = |g: usize, h: usize, k: usize| -> Result<(), GroupoidError> {
            let (Some(gh), Some(hk)) = (self.compose(g, h), self.compose(h, k)) else {
                return Ok(());
            };
            if self.compose(gh, k) != self.compose(g, hk) {
                return Err(GroupoidError::LawViolated(format!("({g}·{h})·{k} != {g}·({h}·{k})")));
            }
            Ok(())
        };
        if n <= EXHAUSTIVE_LAW_CHECK {
            for h in 0..n {
                let into = self.arrows_from(self.range(h));
                let outof: Vec<usize> = self.arrows_from_range(self.source(h));
                for &g in &into {
                    for &k in &outof {
                        check(g, h, k)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..100_000 {
                let h = rng.gen_range(0..n);
                let into = self.arrows_from(self.range(h));
                let outof = self.arrows_from_range(self.source(h));
                if into.is_empty() || outof.is_empty() {
                    continue;
                }
                let g = into[rng.gen_range(0..into.len())];
                let k = outof[rng.gen_range(0..outof.len())];
                check(g, h, k)?;
            }
        }
        Ok(())
    }

    /// Arrows with range `x`.
    pub fn arrows_from_range(&self, x: usize) -> Vec<usize> {
        self.arrows_from(x).into_iter().map(|g| self.inverse(g)).collect()
    }
}

impl Explicit {
    fn from_index_rev(&self, x: usize) -> Vec<usize> {
        // arrows with range x
        (0..self.source.len()).filter(|&h| self.range[h] == x).collect()
    }

    fn compose_raw(&self, g: usize, h: usize, is_unit: &[bool]) -> Option<usize> {
        if self.source[g] != self.range[h] {
            return None;
        }
        if is_unit[g] {
            Some(h)
        } else if is_unit[h] {
            Some(g)
        } else {
            self.compose.get(&(g, h)).copied()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::FiniteGroup;

    #[test]
    fn swap_action_groupoid() {
        let a = FiniteAction::new(FiniteGroup::cyclic(2), 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let g = FiniteGroupoid::transformation(a);
        assert_eq!(g.num_arrows(), 4);
        assert!(g.is_free());
        assert_eq!(g.isotropy_witness(), None);
    }

    #[test]
    fn trivial_group_gives_units_only() {
        let a = FiniteAction::new(FiniteGroup::trivial(), 5, vec![(0..5).collect()]).unwrap();
        let g = FiniteGroupoid::transformation(a);
        assert_eq!(g.num_arrows(), 5);
        assert!((0..5).all(|x| g.is_unit(x)));
    }

    #[test]
    fn rotation_groupoid_laws() {
        let g = FiniteGroupoid::transformation(FiniteAction::rotation(12));
        assert_eq!(g.num_arrows(), 144);
        assert!(g.is_free());
        for a in 0..144 {
            let inv = g.inverse(a);
            assert_eq!(g.compose(a, inv), Some(g.unit(g.range(a))));
            assert_eq!(g.compose(inv, a), Some(g.unit(g.source(a))));
        }
        g.check_associativity().unwrap();
    }

    #[test]
    fn pair_groupoid_composition() {
        let g = FiniteGroupoid::pair(3);
        let a = g.pair_arrow(0, 1).unwrap();
        let b = g.pair_arrow(1, 2).unwrap();
        assert_eq!(g.compose(a, b), g.pair_arrow(0, 2));
        assert_eq!(g.compose(b, a), None);
        g.check_associativity().unwrap();
    }

    #[test]
    fn explicit_blocks_and_isotropy() {
        let g = FiniteGroupoid::disjoint_pairs(&[1, 2, 3]);
        assert_eq!(g.num_points(), 6);
        assert_eq!(g.num_arrows(), 1 + 4 + 9);
        assert!(g.is_free());
        // Z/2 acting trivially on one point has a nontrivial loop
        let a = FiniteAction::new(FiniteGroup::cyclic(2), 1, vec![vec![0], vec![0]]).unwrap();
        let h = FiniteGroupoid::transformation(a);
        assert!(!h.is_free());
        assert_eq!(h.isotropy_witness(), Some(1));
    }

    #[test]
    fn explicit_rejects_missing_inverse() {
        // one arrow 0 -> 1 without a reverse arrow
        let r = FiniteGroupoid::explicit(2, vec![0, 1], vec![0, 1, 0], vec![0, 1, 1], vec![]);
        assert!(matches!(r, Err(GroupoidError::LawViolated(_))));
    }
}
