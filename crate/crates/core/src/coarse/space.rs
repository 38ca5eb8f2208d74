use std::collections::{BTreeMap, HashMap, VecDeque};

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CoarseError;
use crate::action::FiniteGroup;

/// Spaces with a stored distance table are limited to this many points.
pub const MAX_TABLE_POINTS: usize = 4096;
/// Metric axioms are checked on every triple up to this many points.
pub const EXHAUSTIVE_METRIC_CHECK: usize = 500;
const SAMPLED_TRIPLES: usize = 200_000;
const MAX_GROUP_ORDER: usize = 1 << 20;

/// Generators of a finitely generated group, for word-metric balls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupGenerators {
    /// Vectors generating a subgroup of ℤⁿ.
    Integer(Vec<Vec<i64>>),
    /// Permutations of one finite set.
    Permutation(Vec<Vec<usize>>),
}

#[derive(Debug, Clone)]
enum Metric {
    Table(Vec<u64>),
    /// Integer box with the ℓ¹ (grid graph) metric; first coordinate varies fastest.
    Grid { lo: Vec<i64>, hi: Vec<i64> },
    AbelianBall {
        points: Vec<Vec<i64>>,
        index: HashMap<Vec<i64>, usize>,
        length: HashMap<Vec<i64>, u64>,
    },
    GroupBall { group: FiniteGroup, elems: Vec<usize>, length: Vec<u64> },
}

/// A finite set of points `0..n` with an integer metric.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    metric: Metric,
    n: usize,
}

impl FiniteMetricSpace {
    /// Explicit distance table, checked against the metric axioms.
    pub fn from_table(rows: Vec<Vec<u64>>) -> Result<Self, CoarseError> {
        let n = rows.len();
        if n > MAX_TABLE_POINTS {
            return Err(CoarseError::TooLarge { points: n, limit: MAX_TABLE_POINTS });
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(CoarseError::InvalidSpace("distance table is not square".into()));
        }
        let space = FiniteMetricSpace { metric: Metric::Table(rows.concat()), n };
        space.check_metric()?;
        Ok(space)
    }

    /// Shortest-path metric of a connected graph with positive integer edge lengths.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self, CoarseError> {
        if n == 0 {
            return Err(CoarseError::InvalidSpace("no points".into()));
        }
        if n > MAX_TABLE_POINTS {
            return Err(CoarseError::TooLarge { points: n, limit: MAX_TABLE_POINTS });
        }
        let mut g = UnGraph::<(), u64>::with_capacity(n, edges.len());
        for _ in 0..n {
            g.add_node(());
        }
        for &(a, b, w) in edges {
            if a >= n || b >= n {
                return Err(CoarseError::UnknownPoint(a.max(b)));
            }
            if w == 0 {
                return Err(CoarseError::InvalidSpace(format!("edge {a}-{b} has length 0")));
            }
            g.add_edge(NodeIndex::new(a), NodeIndex::new(b), w);
        }
        let mut dist = vec![0; n * n];
        for s in 0..n {
            let d = dijkstra(&g, NodeIndex::new(s), None, |e| *e.weight());
            if d.len() != n {
                return Err(CoarseError::InvalidSpace("graph is disconnected".into()));
            }
            for (t, v) in d {
                dist[s * n + t.index()] = v;
            }
        }
        Ok(FiniteMetricSpace { metric: Metric::Table(dist), n })
    }

    /// The path graph on `n` points with unit edges.
    pub fn path(n: usize) -> Self {
        let mut dist = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = i.abs_diff(j) as u64;
            }
        }
        FiniteMetricSpace { metric: Metric::Table(dist), n }
    }

    /// The integer box `∏ [lo_k, hi_k]` with the ℓ¹ metric.
    pub fn grid(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self, CoarseError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(CoarseError::InvalidSpace("box corners disagree in dimension".into()));
        }
        let mut n: usize = 1;
        for (a, b) in lo.iter().zip(&hi) {
            if a > b {
                return Err(CoarseError::InvalidSpace("empty box".into()));
            }
            n = n
                .checked_mul((b - a + 1) as usize)
                .ok_or_else(|| CoarseError::InvalidSpace("box too large".into()))?;
        }
        Ok(FiniteMetricSpace { metric: Metric::Grid { lo, hi }, n })
    }

    /// `[a, b] ⊆ ℤ`.
    pub fn interval(a: i64, b: i64) -> Result<Self, CoarseError> {
        Self::grid(vec![a], vec![b])
    }

    /// The ball of the given radius about the identity, with the word metric
    /// `d(s,t) = |s⁻¹t|` of the whole group.
    pub fn group_ball(gens: &GroupGenerators, radius: u64) -> Result<Self, CoarseError> {
        match gens {
            GroupGenerators::Integer(vs) => {
                let dim = vs.first().map(Vec::len).unwrap_or(0);
                if dim == 0 || vs.iter().any(|v| v.len() != dim) {
                    return Err(CoarseError::InvalidSpace("generators must share a positive dimension".into()));
                }
                let steps: Vec<Vec<i64>> = vs
                    .iter()
                    .flat_map(|v| [v.clone(), v.iter().map(|x| -x).collect()])
                    .collect();
                let origin = vec![0i64; dim];
                let mut length = HashMap::from([(origin.clone(), 0u64)]);
                let mut queue = VecDeque::from([origin]);
                while let Some(p) = queue.pop_front() {
                    let l = length[&p];
                    if l == 2 * radius {
                        continue;
                    }
                    for s in &steps {
                        let q: Vec<i64> = p.iter().zip(s).map(|(a, b)| a + b).collect();
                        if !length.contains_key(&q) {
                            length.insert(q.clone(), l + 1);
                            queue.push_back(q);
                        }
                    }
                }
                let mut points: Vec<Vec<i64>> =
                    length.iter().filter(|(_, &l)| l <= radius).map(|(p, _)| p.clone()).collect();
                points.sort();
                let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
                let n = points.len();
                Ok(FiniteMetricSpace { metric: Metric::AbelianBall { points, index, length }, n })
            }
            GroupGenerators::Permutation(ps) => {
                let group = FiniteGroup::from_permutations(ps, MAX_GROUP_ORDER)
                    .map_err(|e| CoarseError::InvalidSpace(e.to_string()))?;
                let order = group.order();
                let by_perm: BTreeMap<&[usize], usize> =
                    (0..order).map(|a| (group.permutation(a).expect("permutation group"), a)).collect();
                let mut steps: Vec<usize> = ps.iter().map(|p| by_perm[p.as_slice()]).collect();
                steps.extend(steps.clone().into_iter().map(|a| group.inv(a)));
                let mut length = vec![u64::MAX; order];
                length[group.identity()] = 0;
                let mut queue = VecDeque::from([group.identity()]);
                while let Some(a) = queue.pop_front() {
                    for &s in &steps {
                        let b = group.mul(a, s);
                        if length[b] == u64::MAX {
                            length[b] = length[a] + 1;
                            queue.push_back(b);
                        }
                    }
                }
                let mut elems: Vec<usize> = (0..order).filter(|&a| length[a] <= radius).collect();
                elems.sort_by_key(|&a| (length[a], a));
                let n = elems.len();
                Ok(FiniteMetricSpace { metric: Metric::GroupBall { group, elems, length }, n })
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Grid or ℤⁿ-ball coordinates of a point.
    pub fn coords(&self, i: usize) -> Option<Vec<i64>> {
        match &self.metric {
            Metric::Grid { lo, hi } => {
                let mut rest = i;
                Some(
                    lo.iter()
                        .zip(hi)
                        .map(|(a, b)| {
                            let w = (b - a + 1) as usize;
                            let c = a + (rest % w) as i64;
                            rest /= w;
                            c
                        })
                        .collect(),
                )
            }
            Metric::AbelianBall { points, .. } => Some(points[i].clone()),
            _ => None,
        }
    }

    /// Inverse of [`coords`](Self::coords).
    pub fn index_of(&self, c: &[i64]) -> Option<usize> {
        match &self.metric {
            Metric::Grid { lo, hi } => {
                if c.len() != lo.len() {
                    return None;
                }
                let mut idx = 0usize;
                let mut stride = 1usize;
                for ((x, a), b) in c.iter().zip(lo).zip(hi) {
                    if x < a || x > b {
                        return None;
                    }
                    idx += (x - a) as usize * stride;
                    stride *= (b - a + 1) as usize;
                }
                Some(idx)
            }
            Metric::AbelianBall { index, .. } => index.get(c).copied(),
            _ => None,
        }
    }

    /// Group element of a point of a permutation-group ball.
    pub fn group_element(&self, i: usize) -> Option<usize> {
        match &self.metric {
            Metric::GroupBall { elems, .. } => Some(elems[i]),
            _ => None,
        }
    }

    /// Word length of a group element, for permutation-group balls.
    pub fn word_length(&self, a: usize) -> Option<u64> {
        match &self.metric {
            Metric::GroupBall { length, .. } => length.get(a).copied(),
            _ => None,
        }
    }

    pub fn grid_box(&self) -> Option<(&[i64], &[i64])> {
        match &self.metric {
            Metric::Grid { lo, hi } => Some((lo, hi)),
            _ => None,
        }
    }

    pub fn dist(&self, i: usize, j: usize) -> u64 {
        match &self.metric {
            Metric::Table(d) => d[i * self.n + j],
            Metric::Grid { .. } => {
                let (a, b) = (self.coords(i).expect("grid"), self.coords(j).expect("grid"));
                a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).sum()
            }
            Metric::AbelianBall { points, length, .. } => {
                let d: Vec<i64> = points[j].iter().zip(&points[i]).map(|(a, b)| a - b).collect();
                length[&d]
            }
            Metric::GroupBall { group, elems, length } => {
                length[group.mul(group.inv(elems[i]), elems[j])]
            }
        }
    }

    /// Points at distance at most `r` from `i`, including `i`.
    pub fn neighbors_within(&self, i: usize, r: u64) -> Vec<usize> {
        match &self.metric {
            Metric::Grid { lo, .. } => {
                let c = self.coords(i).expect("grid");
                let mut out = Vec::new();
                let mut off = vec![0i64; lo.len()];
                self.grid_offsets(&c, &mut off, 0, r as i64, &mut out);
                out
            }
            _ => (0..self.n).filter(|&j| self.dist(i, j) <= r).collect(),
        }
    }

    fn grid_offsets(&self, c: &[i64], off: &mut Vec<i64>, k: usize, budget: i64, out: &mut Vec<usize>) {
        if k == off.len() {
            let p: Vec<i64> = c.iter().zip(off.iter()).map(|(a, b)| a + b).collect();
            if let Some(j) = self.index_of(&p) {
                out.push(j);
            }
            return;
        }
        for d in -budget..=budget {
            off[k] = d;
            self.grid_offsets(c, off, k + 1, budget - d.abs(), out);
        }
        off[k] = 0;
    }

    /// Largest pairwise distance within a set of points.
    pub fn diameter_of(&self, set: &[usize]) -> u64 {
        if let Metric::Grid { lo, .. } = &self.metric {
            // ℓ¹ diameter is the largest spread of Σ ±x_k over the sign patterns
            let dim = lo.len();
            let coords: Vec<Vec<i64>> = set.iter().map(|&i| self.coords(i).expect("grid")).collect();
            let mut best = 0u64;
            for signs in 0..(1u32 << dim) {
                let vals = coords.iter().map(|c| {
                    c.iter()
                        .enumerate()
                        .map(|(k, x)| if signs >> k & 1 == 1 { -x } else { *x })
                        .sum::<i64>()
                });
                let (mn, mx) = vals.fold((i64::MAX, i64::MIN), |(a, b), v| (a.min(v), b.max(v)));
                if mx >= mn {
                    best = best.max(mx.abs_diff(mn));
                }
            }
            return best;
        }
        let mut best = 0;
        for (a, &x) in set.iter().enumerate() {
            for &y in &set[a + 1..] {
                best = best.max(self.dist(x, y));
            }
        }
        best
    }

    pub fn diameter(&self) -> u64 {
        let all: Vec<usize> = (0..self.n).collect();
        self.diameter_of(&all)
    }

    /// Largest ball cardinality for each radius `0..=max_r`.
    pub fn ball_profile(&self, max_r: u64) -> Vec<usize> {
        let centers: Vec<usize> = match &self.metric {
            Metric::Grid { lo, hi } => {
                let mid: Vec<i64> = lo.iter().zip(hi).map(|(a, b)| a + (b - a) / 2).collect();
                vec![self.index_of(&mid).expect("midpoint in box")]
            }
            // group balls are homogeneous away from the boundary; the identity is central
            Metric::AbelianBall { index, points, .. } => vec![index[&vec![0; points[0].len()]]],
            Metric::GroupBall { .. } => vec![0],
            Metric::Table(_) => (0..self.n).collect(),
        };
        (0..=max_r)
            .map(|r| centers.iter().map(|&c| self.neighbors_within(c, r).len()).max().unwrap_or(0))
            .collect()
    }

    /// Zero diagonal, positivity, symmetry and the triangle inequality: every
    /// triple up to [`EXHAUSTIVE_METRIC_CHECK`] points, random triples above.
    pub fn check_metric(&self) -> Result<(), CoarseError> {
        let n = self.n;
        let bad = |m: String| Err(CoarseError::NotAMetric(m));
        for i in 0..n {
            if self.dist(i, i) != 0 {
                return bad(format!("d({i},{i}) != 0"));
            }
            for j in 0..n {
                if i != j && self.dist(i, j) == 0 {
                    return bad(format!("d({i},{j}) = 0"));
                }
                if self.dist(i, j) != self.dist(j, i) {
                    return bad(format!("d({i},{j}) != d({j},{i})"));
                }
            }
        }
        let triangle = |i: usize, j: usize, k: usize| self.dist(i, k) <= self.dist(i, j) + self.dist(j, k);
        if n <= EXHAUSTIVE_METRIC_CHECK {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if !triangle(i, j, k) {
                            return bad(format!("d({i},{k}) > d({i},{j}) + d({j},{k})"));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..SAMPLED_TRIPLES {
                let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !triangle(i, j, k) {
                    return bad(format!("d({i},{k}) > d({i},{j}) + d({j},{k})"));
                }
            }
        }
        Ok(())
    }
}
