use std::collections::BTreeSet;

use dadim_core::coarse::{
    bridge_to_groupoid, construct_grid_witness, exhaustive_min_colors, exhaustive_min_witness, verify_asdim_witness,
    verify_bridge, AsdimWitness, FiniteMetricSpace, GroupGenerators,
};
use petgraph::unionfind::UnionFind;
use proptest::prelude::*;

/// Restricted growth strings of length n.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..=max + 1 {
            cur[i] = c;
            rec(i + 1, max.max(c), cur, out);
        }
    }
    if n > 0 {
        rec(1, 0, &mut cur, &mut out);
    }
    out
}

/// Families from a coloring, classes the `R`-components inside each color.
fn components_witness(x: &FiniteMetricSpace, r: u64, s: u64, color: &[usize]) -> AsdimWitness {
    let n = x.len();
    let mut uf = UnionFind::<usize>::new(n);
    for a in 0..n {
        for b in 0..n {
            if color[a] == color[b] && x.dist(a, b) <= r {
                uf.union(a, b);
            }
        }
    }
    let k = color.iter().max().map_or(0, |m| m + 1);
    let mut families = vec![Vec::new(); k];
    let mut seen = BTreeSet::new();
    for a in 0..n {
        let root = uf.find(a);
        if seen.insert(root) {
            families[color[a]].push((0..n).filter(|&b| uf.find(b) == root).collect());
        }
    }
    AsdimWitness { scale_r: r, bound_s: s, families }
}

fn random_space(n: usize, extra: &[(usize, usize, u64)]) -> FiniteMetricSpace {
    let mut edges: Vec<(usize, usize, u64)> = (1..n).map(|i| (i - 1, i, 1 + (i as u64 % 2))).collect();
    edges.extend(extra.iter().map(|&(a, b, w)| (a % n, b % n, w)).filter(|e| e.0 != e.1));
    FiniteMetricSpace::from_edges(n, &edges).unwrap()
}

#[test]
fn oracle_matches_partition_brute_force() {
    let spaces = vec![
        FiniteMetricSpace::path(8),
        random_space(7, &[(0, 4, 1), (2, 6, 3)]),
        FiniteMetricSpace::from_edges(6, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 0, 1)]).unwrap(),
    ];
    for x in &spaces {
        let parts = set_partitions(x.len());
        let diam = x.diameter();
        for r in 1..=diam {
            for s in 0..=diam {
                let best = parts
                    .iter()
                    .filter(|c| verify_asdim_witness(x, &components_witness(x, r, s, c)).unwrap().accepted())
                    .map(|c| c.iter().max().unwrap() + 1)
                    .min()
                    .unwrap();
                assert_eq!(exhaustive_min_colors(x, r, s, 16).unwrap(), best, "R={r} S={s}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn interval_witnesses_verify(r in 1u64..=50, a in -500i64..500, len in 0i64..3000) {
        let x = FiniteMetricSpace::interval(a, a + len).unwrap();
        let w = construct_grid_witness(&x, r).unwrap();
        let rep = verify_asdim_witness(&x, &w).unwrap();
        prop_assert!(rep.accepted());
        prop_assert_eq!(w.bound_s, 5 * r - 1);
    }

    #[test]
    fn brick_witnesses_verify(r in 1u64..=6, x0 in -40i64..40, y0 in -40i64..40, w in 0i64..120, h in 0i64..120) {
        let x = FiniteMetricSpace::grid(vec![x0, y0], vec![x0 + w, y0 + h]).unwrap();
        let wit = construct_grid_witness(&x, r).unwrap();
        prop_assert_eq!(wit.families.len(), 3);
        let rep = verify_asdim_witness(&x, &wit).unwrap();
        prop_assert!(rep.accepted(), "{:?}", rep.status());
    }

    #[test]
    fn oracle_is_a_lower_bound(n in 2usize..=12, extra in proptest::collection::vec((0usize..12, 0usize..12, 1u64..4), 0..4), r in 1u64..6, s in 0u64..8, seed in proptest::collection::vec(0usize..12, 12)) {
        let x = random_space(n, &extra);
        let min = exhaustive_min_witness(&x, r, s, 16).unwrap();
        prop_assert!(verify_asdim_witness(&x, &min).unwrap().accepted());
        // a random coloring and its finest classes
        let color: Vec<usize> = seed[..n].iter().map(|c| c % n).collect();
        let w = components_witness(&x, r, s, &color);
        if verify_asdim_witness(&x, &w).unwrap().accepted() {
            prop_assert!(w.nonempty_families() >= min.families.len());
        }
    }

    #[test]
    fn bridge_round_trip(r in 1u64..=8, len in 0i64..400) {
        let x = FiniteMetricSpace::interval(0, len).unwrap();
        let w = construct_grid_witness(&x, r).unwrap();
        let (g, gw) = bridge_to_groupoid(&x, &w).unwrap();
        let rep = verify_bridge(&x, &w, &g, &gw).unwrap();
        prop_assert!(rep.accepted());
        prop_assert!(rep.round_trip_exact);
        prop_assert!(rep.max_arrow_distance <= w.bound_s);
    }
}

#[test]
fn brick_bridge_on_small_plane() {
    let x = FiniteMetricSpace::grid(vec![0, 0], vec![59, 59]).unwrap();
    let w = construct_grid_witness(&x, 2).unwrap();
    let (g, gw) = bridge_to_groupoid(&x, &w).unwrap();
    let rep = verify_bridge(&x, &w, &g, &gw).unwrap();
    assert!(rep.accepted(), "{:?}", rep.status());
    assert!(rep.round_trip_exact);
}

#[test]
fn word_metric_tubes_are_finite_translates() {
    // ball of radius 3 in ℤ² with generators (1,0), (1,1)
    let gens = GroupGenerators::Integer(vec![vec![1, 0], vec![1, 1]]);
    let x = FiniteMetricSpace::group_ball(&gens, 3).unwrap();
    let ball2 = FiniteMetricSpace::group_ball(&gens, 2).unwrap();
    let allowed: BTreeSet<Vec<i64>> = (0..ball2.len()).map(|i| ball2.coords(i).unwrap()).collect();
    for s in 0..x.len() {
        for t in 0..x.len() {
            let (cs, ct) = (x.coords(s).unwrap(), x.coords(t).unwrap());
            let diff: Vec<i64> = ct.iter().zip(&cs).map(|(a, b)| a - b).collect();
            // (s,t) lies in the tube of radius 2 iff s⁻¹t lies in the finite set B(2)
            assert_eq!(x.dist(s, t) <= 2, allowed.contains(&diff));
        }
    }
    // the same for S₃ with two transpositions
    let s3 = GroupGenerators::Permutation(vec![vec![1, 0, 2], vec![0, 2, 1]]);
    let x = FiniteMetricSpace::group_ball(&s3, 3).unwrap();
    for i in 0..x.len() {
        for j in 0..x.len() {
            assert_eq!(x.dist(i, j), x.dist(j, i));
        }
    }
    assert_eq!(x.ball_profile(3), vec![1, 3, 5, 6]);
}
