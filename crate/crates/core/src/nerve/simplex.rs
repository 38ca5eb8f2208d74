use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use super::NerveError;
use crate::action::FiniteAction;
use crate::rational::{pow10_neg, q, qi, Q};

/// A finitely supported probability vector `Σ t_v v`; zero weights are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplicialPoint {
    weights: BTreeMap<usize, Q>,
}

impl SimplicialPoint {
    pub fn new(weights: impl IntoIterator<Item = (usize, Q)>) -> Result<Self, NerveError> {
        let mut map: BTreeMap<usize, Q> = BTreeMap::new();
        for (v, t) in weights {
            if t.is_negative() {
                return Err(NerveError::NotAProbability(format!("negative weight on vertex {v}")));
            }
            *map.entry(v).or_insert_with(Q::zero) += t;
        }
        map.retain(|_, t| !t.is_zero());
        let total: Q = map.values().sum();
        if !total.is_one() {
            return Err(NerveError::NotAProbability(format!("weights sum to {total}")));
        }
        Ok(SimplicialPoint { weights: map })
    }

    pub fn vertex(v: usize) -> Self {
        SimplicialPoint { weights: BTreeMap::from([(v, Q::one())]) }
    }

    /// Barycenter of a set of vertices.
    pub fn barycenter(vs: &BTreeSet<usize>) -> Result<Self, NerveError> {
        let n = vs.len() as i64;
        Self::new(vs.iter().map(|&v| (v, q(1, n.max(1)))))
    }

    /// Integer weights over a common denominator.
    pub fn from_counts(counts: &[(usize, i64)], den: i64) -> Result<Self, NerveError> {
        Self::new(counts.iter().map(|&(v, c)| (v, q(c, den))))
    }

    pub fn weight(&self, v: usize) -> Q {
        self.weights.get(&v).cloned().unwrap_or_else(Q::zero)
    }

    pub fn weights(&self) -> &BTreeMap<usize, Q> {
        &self.weights
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.weights.keys().copied().collect()
    }

    pub fn mass_on(&self, set: &BTreeSet<usize>) -> Q {
        self.weights.iter().filter(|(v, _)| set.contains(v)).map(|(_, t)| t).sum()
    }

    /// Image under a vertex map.
    pub fn map_vertices(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut out: BTreeMap<usize, Q> = BTreeMap::new();
        for (&v, t) in &self.weights {
            *out.entry(f(v)).or_insert_with(Q::zero) += t;
        }
        SimplicialPoint { weights: out }
    }
}

/// `Σ |t_v − s_v|`.
pub fn l1_distance(a: &SimplicialPoint, b: &SimplicialPoint) -> Q {
    let keys: BTreeSet<usize> = a.weights.keys().chain(b.weights.keys()).copied().collect();
    keys.into_iter().map(|v| (a.weight(v) - b.weight(v)).abs()).sum()
}

/// A complex given by its maximal faces; every subset of a face is a face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: BTreeSet<usize>,
    maximal: Vec<BTreeSet<usize>>,
}

impl SimplicialComplex {
    /// Faces may be listed redundantly; vertices in no face become 0-faces.
    pub fn new(vertices: BTreeSet<usize>, faces: Vec<BTreeSet<usize>>) -> Result<Self, NerveError> {
        if let Some(v) = faces.iter().flatten().find(|v| !vertices.contains(v)) {
            return Err(NerveError::InvalidComplex(format!("face uses unknown vertex {v}")));
        }
        let mut all: Vec<BTreeSet<usize>> = faces.into_iter().filter(|f| !f.is_empty()).collect();
        let used: BTreeSet<usize> = all.iter().flatten().copied().collect();
        all.extend(vertices.difference(&used).map(|&v| BTreeSet::from([v])));
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        all.dedup();
        let mut maximal: Vec<BTreeSet<usize>> = Vec::new();
        for f in all {
            if !maximal.iter().any(|m| f.is_subset(m)) {
                maximal.push(f);
            }
        }
        maximal.sort();
        Ok(SimplicialComplex { vertices, maximal })
    }

    /// The full simplex on vertices `0..n`.
    pub fn full_simplex(n: usize) -> Self {
        let vs: BTreeSet<usize> = (0..n).collect();
        Self::new(vs.clone(), vec![vs]).expect("simplex")
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn maximal_faces(&self) -> &[BTreeSet<usize>] {
        &self.maximal
    }

    pub fn dimension(&self) -> usize {
        self.maximal.iter().map(|f| f.len()).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn contains_face(&self, s: &BTreeSet<usize>) -> bool {
        self.maximal.iter().any(|m| s.is_subset(m))
    }

    pub fn contains_point(&self, mu: &SimplicialPoint) -> bool {
        self.contains_face(&mu.support())
    }

    /// All `i`-simplices, sorted.
    pub fn faces_of_dim(&self, i: usize) -> Vec<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for m in &self.maximal {
            let v: Vec<usize> = m.iter().copied().collect();
            subsets(&v, i + 1, 0, &mut Vec::new(), &mut out);
        }
        out.into_iter().collect()
    }

    /// The vertex action maps faces to faces.
    pub fn is_invariant(&self, act: &FiniteAction) -> bool {
        (0..act.group().order()).all(|g| {
            self.maximal.iter().all(|m| {
                let img: BTreeSet<usize> = m.iter().map(|&v| act.act(g, v)).collect();
                self.contains_face(&img)
            })
        })
    }
}

fn subsets(v: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<BTreeSet<usize>>) {
    if cur.len() == k {
        out.insert(cur.iter().copied().collect());
        return;
    }
    for j in start..v.len() {
        cur.push(v[j]);
        subsets(v, k, j + 1, cur, out);
        cur.pop();
    }
}

/// `d(μ, Δ) = 2(1 − Σ_{v∈Δ} t_v)`.
pub fn distance_to_face(mu: &SimplicialPoint, face: &BTreeSet<usize>) -> Q {
    qi(2) * (Q::one() - mu.mass_on(face))
}

/// Within each maximal face, the `k` heaviest vertices (ties by id).
fn heaviest(mu: &SimplicialPoint, m: &BTreeSet<usize>, k: usize) -> BTreeSet<usize> {
    let mut v: Vec<usize> = m.iter().copied().collect();
    v.sort_by(|a, b| mu.weight(*b).cmp(&mu.weight(*a)).then(a.cmp(b)));
    v.into_iter().take(k).collect()
}

fn check_in(mu: &SimplicialPoint, c: &SimplicialComplex) -> Result<(), NerveError> {
    if c.vertices.is_empty() {
        return Err(NerveError::EmptySkeleton);
    }
    if !c.contains_point(mu) {
        return Err(NerveError::NotInComplex(mu.support().into_iter().collect()));
    }
    Ok(())
}

/// `d(μ, C_i) = 2(1 − max_Δ Σ_{v∈Δ} t_v)` over faces of dimension at most `i`.
pub fn distance_to_skeleton(mu: &SimplicialPoint, c: &SimplicialComplex, i: usize) -> Result<Q, NerveError> {
    check_in(mu, c)?;
    let best = c.maximal.iter().map(|m| mu.mass_on(&heaviest(mu, m, i + 1))).max().expect("nonempty");
    Ok(qi(2) * (Q::one() - best))
}

/// Radii `(1/3)10⁻ⁱ` and `(5/2)10⁻ⁱ` of the level-`i` cover pieces.
pub fn nice_cover_radii(i: usize) -> (Q, Q) {
    let p = pow10_neg(i as u32);
    (q(1, 3) * &p, q(5, 2) * p)
}

/// `d(μ, Δ) < (1/3)10⁻ⁱ` and, for `i > 0`, `d(μ, C_{i−1}) > (5/2)10⁻ⁱ`.
pub fn nice_cover_membership(
    mu: &SimplicialPoint,
    c: &SimplicialComplex,
    i: usize,
    face: &BTreeSet<usize>,
) -> Result<bool, NerveError> {
    check_in(mu, c)?;
    if face.len() != i + 1 || !c.contains_face(face) {
        return Err(NerveError::NotASimplex(face.iter().copied().collect()));
    }
    let (near, far) = nice_cover_radii(i);
    if distance_to_face(mu, face) >= near {
        return Ok(false);
    }
    Ok(i == 0 || distance_to_skeleton(mu, c, i - 1)? > far)
}

/// Least level `i` whose piece contains `μ`, with the unique simplex `Δ`.
pub fn nice_cover_assign(mu: &SimplicialPoint, c: &SimplicialComplex) -> Result<(usize, BTreeSet<usize>), NerveError> {
    check_in(mu, c)?;
    for i in 0..=c.dimension() {
        // the heaviest i-face is the only candidate for the near condition
        let best = c
            .maximal
            .iter()
            .filter(|m| m.len() > i)
            .map(|m| {
                let mut f = heaviest(mu, m, i + 1);
                let rest = m.iter().copied().filter(|v| !f.contains(v)).collect::<Vec<_>>();
                f.extend(rest.into_iter().take(i + 1 - f.len()));
                (mu.mass_on(&f), f)
            })
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        if let Some((_, face)) = best {
            if nice_cover_membership(mu, c, i, &face)? {
                return Ok((i, face));
            }
        }
    }
    Err(NerveError::NotCovered)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(a: i64, b: i64, c: i64, den: i64) -> SimplicialPoint {
        SimplicialPoint::from_counts(&[(0, a), (1, b), (2, c)], den).unwrap()
    }

    #[test]
    fn distances() {
        let a = SimplicialPoint::vertex(0);
        let b = SimplicialPoint::vertex(1);
        assert_eq!(l1_distance(&a, &a), qi(0));
        assert_eq!(l1_distance(&a, &b), qi(2));
        assert_eq!(l1_distance(&tri(1, 1, 0, 2), &a), qi(1));
        assert!(SimplicialPoint::from_counts(&[(0, 1)], 2).is_err());
    }

    #[test]
    fn skeleton_distances() {
        let c = SimplicialComplex::full_simplex(3);
        assert_eq!(distance_to_skeleton(&tri(1, 1, 1, 3), &c, 1).unwrap(), q(2, 3));
        assert_eq!(distance_to_skeleton(&SimplicialPoint::vertex(2), &c, 0).unwrap(), qi(0));
        assert_eq!(distance_to_skeleton(&tri(1, 1, 0, 2), &c, 0).unwrap(), qi(1));
        let edge = SimplicialComplex::new((0..3).collect(), vec![BTreeSet::from([0, 1])]).unwrap();
        assert!(matches!(
            distance_to_skeleton(&tri(1, 1, 1, 3), &edge, 0),
            Err(NerveError::NotInComplex(_))
        ));
    }

    #[test]
    fn assignment_examples() {
        let c = SimplicialComplex::full_simplex(3);
        assert_eq!(nice_cover_assign(&tri(1, 1, 1, 3), &c).unwrap(), (2, BTreeSet::from([0, 1, 2])));
        assert_eq!(nice_cover_assign(&SimplicialPoint::vertex(1), &c).unwrap(), (0, BTreeSet::from([1])));
        assert_eq!(nice_cover_assign(&tri(999, 1, 0, 1000), &c).unwrap(), (0, BTreeSet::from([0])));
        assert!(nice_cover_membership(&tri(1, 1, 0, 2), &c, 1, &BTreeSet::from([0, 1])).unwrap());
        assert!(nice_cover_membership(&tri(1, 1, 0, 2), &c, 1, &BTreeSet::from([0])).is_err());
    }

    #[test]
    fn complex_normalization() {
        let c = SimplicialComplex::new(
            (0..4).collect(),
            vec![BTreeSet::from([0, 1]), BTreeSet::from([0, 1, 2]), BTreeSet::from([1])],
        )
        .unwrap();
        assert_eq!(c.maximal_faces(), &[BTreeSet::from([0, 1, 2]), BTreeSet::from([3])]);
        assert_eq!(c.dimension(), 2);
        assert_eq!(c.faces_of_dim(1).len(), 3);
    }
}
