use std::collections::{BTreeMap, BTreeSet};

use dadim_core::action::{FiniteAction, FiniteGroup};
use dadim_core::nerve::{
    check_equivariance, cover_from_map, dad_witness_from_blr, distance_to_skeleton, l1_distance, map_from_cover,
    nerve_defect_bound, nice_cover_assign, nice_cover_membership, nice_cover_radii, perturb_to_finite_support,
    NerveError, SampledMap, SimplicialComplex, SimplicialPoint,
};
use dadim_core::rational::{pow10_neg, q, qi, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn point(counts: &[(usize, i64)]) -> SimplicialPoint {
    let den: i64 = counts.iter().map(|c| c.1).sum();
    SimplicialPoint::from_counts(counts, den).unwrap()
}

fn arb_point(vertices: usize, den: i64) -> impl Strategy<Value = SimplicialPoint> {
    proptest::collection::vec(0..=den, vertices).prop_filter_map("all zero", |w| {
        let total: i64 = w.iter().sum();
        (total > 0).then(|| {
            let counts: Vec<(usize, i64)> = w.iter().copied().enumerate().filter(|c| c.1 > 0).collect();
            SimplicialPoint::from_counts(&counts, total).unwrap()
        })
    })
}

/// All points of the full simplex on `k` vertices with weights in `(1/den)ℤ`.
fn grid(k: usize, den: i64) -> Vec<SimplicialPoint> {
    fn rec(k: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() + 1 == k {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=left {
            cur.push(a);
            rec(k, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, den, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|w| {
            let counts: Vec<(usize, i64)> = w.into_iter().enumerate().filter(|c| c.1 > 0).collect();
            SimplicialPoint::from_counts(&counts, den).unwrap()
        })
        .collect()
}

/// Brute force `min_{ν ∈ Δ} d(μ, ν)` over `ν` with weights in `(1/den)ℤ`.
fn brute_distance_to_face(mu: &SimplicialPoint, face: &BTreeSet<usize>, den: i64) -> Q {
    let vs: Vec<usize> = face.iter().copied().collect();
    grid(vs.len(), den)
        .into_iter()
        .map(|nu| l1_distance(mu, &nu.map_vertices(|i| vs[i])))
        .min()
        .unwrap()
}

fn subsets_of_size(m: &BTreeSet<usize>, k: usize) -> Vec<BTreeSet<usize>> {
    let v: Vec<usize> = m.iter().copied().collect();
    (0u32..1 << v.len())
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..v.len()).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect())
        .collect()
}

#[test]
fn distance_examples() {
    let a = SimplicialPoint::vertex(0);
    let b = SimplicialPoint::vertex(1);
    let half = point(&[(0, 1), (1, 1)]);
    assert_eq!(l1_distance(&a, &a), qi(0));
    assert_eq!(l1_distance(&a, &b), qi(2));
    assert_eq!(l1_distance(&half, &a), qi(1));

    let tri = SimplicialComplex::full_simplex(3);
    let bary = point(&[(0, 1), (1, 1), (2, 1)]);
    assert_eq!(distance_to_skeleton(&bary, &tri, 1).unwrap(), q(2, 3));
    let edges = subsets_of_size(&(0..3).collect(), 2);
    assert_eq!(edges.iter().map(|e| brute_distance_to_face(&bary, e, 3)).min().unwrap(), q(2, 3));
    assert_eq!(distance_to_skeleton(&a, &tri, 0).unwrap(), qi(0));
    assert_eq!(distance_to_skeleton(&half, &tri, 0).unwrap(), qi(1));
    let empty = SimplicialComplex::new(BTreeSet::new(), vec![]).unwrap();
    assert!(matches!(distance_to_skeleton(&a, &empty, 0), Err(NerveError::EmptySkeleton)));
}

#[test]
fn nice_cover_examples() {
    let tri = SimplicialComplex::full_simplex(3);
    let bary = point(&[(0, 1), (1, 1), (2, 1)]);
    assert_eq!(nice_cover_assign(&bary, &tri).unwrap(), (2, BTreeSet::from([0, 1, 2])));
    assert_eq!(nice_cover_assign(&SimplicialPoint::vertex(1), &tri).unwrap(), (0, BTreeSet::from([1])));
    let near = point(&[(0, 999), (1, 1)]);
    assert_eq!(distance_to_skeleton(&near, &tri, 0).unwrap(), qi(2) * pow10_neg(3));
    assert_eq!(nice_cover_assign(&near, &tri).unwrap(), (0, BTreeSet::from([0])));
    let path = SimplicialComplex::new((0..3).collect(), vec![BTreeSet::from([0, 1]), BTreeSet::from([1, 2])]).unwrap();
    assert!(matches!(nice_cover_assign(&bary, &path), Err(NerveError::NotInComplex(_))));
    assert!(matches!(
        nice_cover_membership(&near, &path, 1, &BTreeSet::from([0, 2])),
        Err(NerveError::NotASimplex(_))
    ));
}

#[test]
fn nice_cover_on_triangle_grid() {
    let tri = SimplicialComplex::full_simplex(3);
    let pts = grid(3, 60);
    assert_eq!(pts.len(), 1891);
    let mut by_level: BTreeMap<usize, Vec<(BTreeSet<usize>, &SimplicialPoint)>> = BTreeMap::new();
    for mu in &pts {
        let (i, face) = nice_cover_assign(mu, &tri).unwrap();
        assert!(nice_cover_membership(mu, &tri, i, &face).unwrap());
        // no other simplex of the same level contains μ
        for other in tri.faces_of_dim(i) {
            if other != face {
                assert!(!nice_cover_membership(mu, &tri, i, &other).unwrap());
            }
        }
        by_level.entry(i).or_default().push((face, mu));
    }
    assert_eq!(by_level.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
    for (i, members) in &by_level {
        let (near, _) = nice_cover_radii(*i);
        for (a, (fa, mu)) in members.iter().enumerate() {
            for (fb, nu) in &members[a + 1..] {
                if fa != fb {
                    assert!(l1_distance(mu, nu) >= near, "level {i}: {mu:?} {nu:?}");
                }
            }
        }
    }
}

/// `ℤ/6` acting on vertices and edge midpoints of a hexagon.
fn hexagon() -> (FiniteAction, FiniteAction, SimplicialComplex, SampledMap) {
    let group = FiniteGroup::cyclic(6);
    let table_x: Vec<Vec<usize>> =
        (0..6).map(|g| (0..12).map(|p| (p % 6 + g) % 6 + 6 * (p / 6)).collect()).collect();
    let act_x = FiniteAction::new(group, 12, table_x).unwrap();
    let act_v = FiniteAction::rotation(6);
    let c = SimplicialComplex::new((0..6).collect(), (0..6).map(|v| BTreeSet::from([v, (v + 1) % 6])).collect())
        .unwrap();
    let f: SampledMap = (0..12)
        .map(|p| if p < 6 { SimplicialPoint::vertex(p) } else { point(&[(p - 6, 1), ((p - 5) % 6, 1)]) })
        .collect();
    (act_x, act_v, c, f)
}

#[test]
fn pullback_of_hexagon_cover() {
    let (act_x, act_v, c, f) = hexagon();
    assert_eq!(check_equivariance(&f, &act_x, &act_v, &[1], &q(1, 1000)).unwrap().max_defect, qi(0));
    let pulled = cover_from_map(&act_x, &act_v, &c, &f, &[1]).unwrap();
    assert_eq!(pulled.radius, q(1, 60));
    assert_eq!(pulled.sets.len(), 12);
    assert_eq!(pulled.report.multiplicity, 1);
    assert_eq!(pulled.report.orbits, 2);
    assert!(pulled.report.stabilizer_orders.iter().all(|&o| o == 1));
    let levels: Vec<usize> = pulled.labels.iter().map(|l| l.0).collect();
    assert_eq!(levels.iter().filter(|&&i| i == 1).count(), 6);

    let w = dad_witness_from_blr(&act_x, &act_v, &c, &f, &[1]).unwrap();
    assert!(w.report.accepted());
    assert!(w.key_step && w.within_f);
    assert_eq!(w.witness.colors.len(), 2);
}

/// `{(x, g) : x − g ∈ A}` in `ℤ/p × ℤ/p`.
fn invariant_arc(p: usize, a: &BTreeSet<usize>) -> Vec<bool> {
    (0..p * p).map(|i| a.contains(&((i / p + p - i % p) % p))).collect()
}

fn arc(p: usize, start: usize, len: usize) -> BTreeSet<usize> {
    (start..start + len).map(|k| k % p).collect()
}

#[test]
fn small_arc_cover_is_too_coarse_for_a_witness() {
    let act = FiniteAction::rotation(12);
    let cover = vec![invariant_arc(12, &arc(12, 0, 10)), invariant_arc(12, &arc(12, 6, 10))];
    let m = map_from_cover(&act, &cover, &[1], 2).unwrap();
    assert_eq!(m.bound, nerve_defect_bound(1, 2));
    assert!(m.equivariance.max_defect <= m.bound);
    assert!(matches!(
        dad_witness_from_blr(&act, &m.vertex_action, &m.complex, &m.f, &[1]),
        Err(NerveError::EquivarianceTooWeak { .. })
    ));
}

#[test]
fn deep_arc_cover_gives_two_color_witness() {
    // smallest depth whose defect falls below (1/3)10⁻¹
    let n = 60;
    let p = 4 * n + 4;
    let cover = vec![invariant_arc(p, &arc(p, 0, 4 * n + 2)), invariant_arc(p, &arc(p, p / 2, 4 * n + 2))];
    let act = FiniteAction::rotation(p);
    let m = map_from_cover(&act, &cover, &[1], n).unwrap();
    assert_eq!(m.d, 1);
    assert!(m.max_nonzero <= 2);
    let threshold = q(1, 30);
    assert!(m.equivariance.max_defect < threshold, "defect {}", m.equivariance.max_defect);
    let w = dad_witness_from_blr(&act, &m.vertex_action, &m.complex, &m.f, &[1]).unwrap();
    assert_eq!(w.threshold, threshold);
    assert!(w.report.accepted());
    assert!(w.key_step && w.within_f);
    assert_eq!(w.witness.colors.len(), 2);
}

fn arb_complex() -> impl Strategy<Value = SimplicialComplex> {
    proptest::collection::vec(proptest::collection::btree_set(0usize..12, 1..=4), 1..5).prop_map(|faces| {
        let vertices: BTreeSet<usize> = faces.iter().flatten().copied().collect();
        SimplicialComplex::new(vertices, faces).unwrap()
    })
}

/// A point supported on a random face of `c`, weights in `(1/den)ℤ`.
fn arb_point_in(c: SimplicialComplex) -> impl Strategy<Value = (SimplicialComplex, SimplicialPoint, i64)> {
    let faces = c.maximal_faces().to_vec();
    (0..faces.len(), proptest::collection::vec(0i64..=4, 4)).prop_filter_map("zero", move |(k, w)| {
        let face: Vec<usize> = faces[k].iter().copied().collect();
        let counts: Vec<(usize, i64)> = face.iter().zip(&w).filter(|(_, &c)| c > 0).map(|(&v, &c)| (v, c)).collect();
        let den: i64 = counts.iter().map(|c| c.1).sum();
        (den > 0).then(|| (c.clone(), SimplicialPoint::from_counts(&counts, den).unwrap(), den))
    })
}

proptest! {
    #[test]
    fn l1_is_a_metric(a in arb_point(5, 6), b in arb_point(5, 6), c in arb_point(5, 6)) {
        prop_assert_eq!(l1_distance(&a, &a), qi(0));
        prop_assert_eq!(l1_distance(&a, &b), l1_distance(&b, &a));
        prop_assert!(l1_distance(&a, &b) <= l1_distance(&a, &c) + l1_distance(&c, &b));
        prop_assert!(l1_distance(&a, &b) <= qi(2));
        if a != b {
            prop_assert!(l1_distance(&a, &b) > qi(0));
        }
    }

    #[test]
    fn skeleton_distance_matches_brute_force((c, mu, den) in arb_complex().prop_flat_map(arb_point_in)) {
        for i in 0..=c.dimension() {
            let faces: Vec<BTreeSet<usize>> = (0..=i).flat_map(|k| c.faces_of_dim(k)).collect();
            let brute = faces.iter().map(|f| brute_distance_to_face(&mu, f, den)).min().unwrap();
            prop_assert_eq!(distance_to_skeleton(&mu, &c, i).unwrap(), brute);
        }
    }

    #[test]
    fn nice_cover_covers_and_separates(
        (c, mu, _) in arb_complex().prop_flat_map(arb_point_in),
        nu_seed in any::<u64>(),
    ) {
        let (i, face) = nice_cover_assign(&mu, &c).unwrap();
        prop_assert!(nice_cover_membership(&mu, &c, i, &face).unwrap());
        // a second point on the same complex, from the seed
        let faces = c.maximal_faces();
        let m: Vec<usize> = faces[(nu_seed % faces.len() as u64) as usize].iter().copied().collect();
        let counts: Vec<(usize, i64)> =
            m.iter().enumerate().map(|(k, &v)| (v, ((nu_seed >> (8 + 4 * k)) & 7) as i64)).filter(|c| c.1 > 0).collect();
        if !counts.is_empty() {
            let den = counts.iter().map(|c| c.1).sum();
            let nu = SimplicialPoint::from_counts(&counts, den).unwrap();
            let (j, other) = nice_cover_assign(&nu, &c).unwrap();
            if i == j && face != other {
                prop_assert!(l1_distance(&mu, &nu) >= nice_cover_radii(i).0);
            }
        }
    }

    #[test]
    fn finite_support_perturbation(
        f in proptest::collection::vec(arb_point(6, 20), 1..6),
        s in proptest::collection::btree_set(0usize..6, 1..6),
        budget in 1i64..20,
    ) {
        let delta = q(budget, 10);
        match perturb_to_finite_support(&f, &s, &delta) {
            Ok(p) => {
                for (x, mu) in f.iter().enumerate() {
                    let t = mu.mass_on(&s);
                    prop_assert_eq!(&p.per_point[x], &(qi(2) * (Q::one() - t)));
                    prop_assert_eq!(l1_distance(mu, &p.map[x]), p.per_point[x].clone());
                    prop_assert!(p.per_point[x] < delta);
                    prop_assert!(p.map[x].support().is_subset(&s));
                }
            }
            Err(NerveError::NoFiniteS { x, .. }) => {
                prop_assert!(Q::one() - f[x].mass_on(&s) >= q(1, 2) * delta);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn nerve_map_is_a_partition_of_unity(
        p in 6usize..14,
        starts in proptest::collection::vec(0usize..14, 2..4),
        extra in 0usize..4,
        n in 1usize..4,
    ) {
        let len = p / 2 + 2 * n + extra;
        let act = FiniteAction::rotation(p);
        let sets: BTreeSet<BTreeSet<usize>> = starts.iter().map(|&s| arc(p, s % p, len.min(p))).collect();
        let cover: Vec<Vec<bool>> = sets.iter().map(|a| invariant_arc(p, a)).collect();
        match map_from_cover(&act, &cover, &[1], n) {
            Ok(m) => {
                for mu in &m.f {
                    let total: Q = mu.weights().values().sum();
                    prop_assert_eq!(total, Q::one());
                    prop_assert!(mu.weights().values().all(|w| *w > Q::zero()));
                }
                prop_assert!(m.max_nonzero <= m.d + 1);
                prop_assert_eq!(&m.bound, &nerve_defect_bound(m.d, n));
                prop_assert!(m.equivariance.max_defect <= m.bound);
            }
            Err(NerveError::DepthInsufficient(_)) | Err(NerveError::ConditionViolated { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
