use std::cmp::Ordering;
use std::collections::BTreeSet;

use dadim_core::action::FiniteAction;
use dadim_core::groupoid::FiniteGroupoid;
use dadim_core::pou::{
    build_pou, build_tower, default_depth, depth_bound, enlarge_cover, pou_for_action, pou_pipeline, proof_bound,
    verify_pou, PouError,
};
use dadim_core::rational::{q, qi, ScaledRoot, Q};
use num_traits::One;
use proptest::prelude::*;

fn arc(p: usize, start: usize, len: usize) -> BTreeSet<usize> {
    (start..start + len).map(|x| x % p).collect()
}

fn cyclic_distance(p: usize, x: usize, set: &BTreeSet<usize>) -> usize {
    set.iter().map(|&y| ((x + p - y) % p).min((y + p - x) % p)).min().unwrap_or(usize::MAX)
}

fn rotation_k(g: &FiniteGroupoid, p: usize) -> Vec<usize> {
    (0..p).map(|x| g.action_arrow(1, x).unwrap()).collect()
}

#[test]
fn partial_orbits_on_rotation_twelve() {
    let g = FiniteGroupoid::transformation(FiniteAction::rotation(12));
    let k = rotation_k(&g, 12);
    let e = enlarge_cover(&g, &k, &[arc(12, 0, 6), arc(12, 6, 6)], Some(143)).unwrap();
    for x in 0..12 {
        let orbit: BTreeSet<usize> = [11, 0, 1].iter().map(|&h| (x + h) % 12).collect();
        assert!(e.colors.iter().any(|u| orbit.is_subset(u)), "{x}");
    }
    assert!(e.accepted());
}

#[test]
fn action_form_matches_groupoid_form() {
    let act = FiniteAction::rotation(30);
    let colors = [arc(30, 0, 15), arc(30, 15, 15)];
    let a = pou_for_action(&act, &[1], &colors, 5, None).unwrap();
    let g = FiniteGroupoid::transformation(act.clone());
    let p = pou_pipeline(&g, &rotation_k(&g, 30), &colors, 5, None).unwrap();
    assert_eq!(a.pipeline.pou, p.pou);
    assert!(a.orbits_in_one_support);
    // sup_x |φ_i(x+1) − φ_i(x)|, read off the arrows of K
    let pou = &p.pou;
    let sup = (0..30)
        .flat_map(|x| (0..2).map(move |i| (i, x)))
        .map(|(i, x)| (pou.phi_f64(i, (x + 1) % 30) - pou.phi_f64(i, x)).abs())
        .fold(0.0, f64::max);
    let r = verify_pou(&g, &a.k, pou, &qi(1)).unwrap();
    assert!((r.max_oscillation - sup).abs() < 1e-12);
}

#[test]
fn wide_cycle_with_size_bound() {
    let p = 600;
    let act = FiniteAction::rotation(p);
    let n = 64;
    let bound = (p * p - 1) as u128;
    let a = pou_for_action(&act, &[1], &[arc(p, 0, 300), arc(p, 300, 300)], n, Some(bound)).unwrap();
    assert!(a.pipeline.towers.iter().all(|t| t.generated_size < bound));
    let r = verify_pou(&a.groupoid, &a.k, &a.pipeline.pou, &q(1, 2)).unwrap();
    assert!(r.accepted(), "{:?}", r.status());
    assert!(r.within_depth_bound && r.within_proof_bound && r.psi_step_within);
    assert_eq!(r.max_psi_step, q(1, n as i64));
    // too deep: the towers wrap around the cycle
    assert!(matches!(
        pou_for_action(&act, &[1], &[arc(p, 0, 300), arc(p, 300, 300)], 300, Some(bound)),
        Err(PouError::PropagationEscapesColor { .. })
    ));
}

#[test]
fn acceptance_depths_on_rotation_twelve() {
    let act = FiniteAction::rotation(12);
    for n in [4, 16, 64] {
        let a = pou_for_action(&act, &[1], &[arc(12, 0, 6), arc(12, 6, 6)], n, None).unwrap();
        let r = verify_pou(&a.groupoid, &a.k, &a.pipeline.pou, &qi(1)).unwrap();
        assert!(r.normalization_defects.is_empty());
        assert!(r.within_depth_bound, "N = {n}");
    }
}

#[test]
fn default_depth_is_least() {
    for (d, eps) in [(0usize, q(1, 2)), (1, q(1, 3)), (2, q(3, 4)), (3, q(1, 10))] {
        let n = default_depth(d, &eps).unwrap();
        let c = 1.0 + ((d + 1) as f64).sqrt();
        let lhs = |n: usize| 2.0 * c * c / n as f64;
        let e2 = dadim_core::rational::to_f64(&(&eps * &eps));
        assert!(lhs(n) < e2);
        assert!(n == 3 || lhs(n - 1) >= e2);
        // the depth bound is then below ε
        assert_eq!(depth_bound(d, n).cmp_rational(&eps), Ordering::Greater, "ε above the bound");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rotation_pou_properties(
        p in 8usize..40,
        cut in 0usize..40,
        overlap in 0usize..4,
        n in 3usize..20,
    ) {
        let cut = cut % p;
        let half = p / 2;
        let colors = [arc(p, cut, half + overlap), arc(p, cut + half, p - half)];
        let act = FiniteAction::rotation(p);
        let a = pou_for_action(&act, &[1], &colors, n, None).unwrap();
        let pou = &a.pipeline.pou;
        // ψ from distances to the bottom levels
        for (i, t) in a.pipeline.towers.iter().enumerate() {
            for x in 0..p {
                let dist = cyclic_distance(p, x, &t.levels[0]);
                let expect = q(n.saturating_sub(dist) as i64, n as i64);
                prop_assert_eq!(&pou.psi[i][x], &expect);
            }
        }
        let r = verify_pou(&a.groupoid, &a.k, pou, &qi(1)).unwrap();
        prop_assert!(r.support_violations.is_empty());
        prop_assert!(r.normalization_defects.is_empty());
        for x in 0..p {
            prop_assert!(pou.sum_of_squares(x).is_one());
        }
        prop_assert!(r.psi_step_within);
        prop_assert!(r.min_psi_sum >= Q::one());
        prop_assert!(r.within_proof_bound);
        prop_assert!(r.within_depth_bound);
        prop_assert!(r.partial_orbits_contained && a.orbits_in_one_support);
        // floating-point cross-check of the exact bound decisions
        let pb = proof_bound(1, n).to_f64();
        prop_assert!(r.max_oscillation <= pb + 1e-12);
        let zero = ScaledRoot::rational(qi(0));
        prop_assert_eq!(pou.phi(0, 0).cmp_abs_diff(&zero, &proof_bound(1, n)) == Ordering::Greater, pou.phi_f64(0, 0) > pb);
    }

    #[test]
    fn towers_propagate_along_k(p in 6usize..30, start in 0usize..30, len in 1usize..8, n in 0usize..6) {
        let g = FiniteGroupoid::transformation(FiniteAction::rotation(p));
        let k = rotation_k(&g, p);
        let bottom = arc(p, start % p, len.min(p));
        let rest: BTreeSet<usize> = (0..p).filter(|x| !bottom.contains(x)).collect();
        let towers = build_tower(&g, &k, &[bottom.clone(), rest], n, None).unwrap();
        for (m, level) in towers[0].levels.iter().enumerate() {
            let expect: BTreeSet<usize> = (0..p).filter(|&x| cyclic_distance(p, x, &bottom) <= m).collect();
            prop_assert_eq!(level, &expect);
        }
        if n >= 3 {
            prop_assert!(build_pou(&towers, n).is_ok());
        } else {
            prop_assert!(build_pou(&towers, n).is_err());
        }
    }
}
