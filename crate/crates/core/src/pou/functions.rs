use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{base_units, index_by, symmetrize, NestedColorTower, PouError};
use crate::groupoid::FiniteGroupoid;
use crate::rational::{format_q, q, qi, serialize_q, sign_linear_surd, to_f64, ScaledRoot, SurdBound, Q};

/// Functions `φ_i = ψ_i / √(max{Σ_j ψ_j², 1})` given by their `ψ_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionOfUnity {
    /// Telescoping depth `N`.
    pub depth: usize,
    pub units: usize,
    pub supports: Vec<BTreeSet<usize>>,
    #[serde(serialize_with = "ser_table")]
    pub psi: Vec<Vec<Q>>,
}

fn ser_table<S: serde::Serializer>(t: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(t.len()))?;
    for row in t {
        let sparse: Vec<(usize, String)> =
            row.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(x, v)| (x, format_q(v))).collect();
        seq.serialize_element(&sparse)?;
    }
    seq.end()
}

impl PartitionOfUnity {
    /// `ψ` values must lie in `[0, 1]`; `depth ≥ 1`.
    pub fn from_psi(
        units: usize,
        supports: Vec<BTreeSet<usize>>,
        psi: Vec<Vec<Q>>,
        depth: usize,
    ) -> Result<Self, PouError> {
        if depth == 0 {
            return Err(PouError::TowerInvalid("depth must be positive".into()));
        }
        if supports.len() != psi.len() || psi.iter().any(|row| row.len() != units) {
            return Err(PouError::TowerInvalid("one ψ row per support, one value per unit".into()));
        }
        if psi.iter().flatten().any(|v| v.is_negative() || *v > Q::one()) {
            return Err(PouError::TowerInvalid("ψ values must lie in [0, 1]".into()));
        }
        Ok(PartitionOfUnity { depth, units, supports, psi })
    }

    pub fn colors(&self) -> usize {
        self.psi.len()
    }

    /// `max{Σ_j ψ_j(x)², 1}`.
    pub fn normalizer(&self, x: usize) -> Q {
        let s: Q = self.psi.iter().map(|row| &row[x] * &row[x]).sum();
        s.max(Q::one())
    }

    pub fn phi(&self, i: usize, x: usize) -> ScaledRoot {
        ScaledRoot { num: self.psi[i][x].clone(), radicand: self.normalizer(x) }
    }

    pub fn phi_f64(&self, i: usize, x: usize) -> f64 {
        self.phi(i, x).to_f64()
    }

    /// `Σ_i φ_i(x)²`, exact.
    pub fn sum_of_squares(&self, x: usize) -> Q {
        let n = self.normalizer(x);
        self.psi.iter().map(|row| &row[x] * &row[x]).sum::<Q>() / n
    }
}

/// `ψ_i(x) = #{0 ≤ m < N : x ∈ U_i⁽ᵐ⁾} / N`, supports `U_i⁽ᴺ⁺¹⁾`.
pub fn build_pou(towers: &[NestedColorTower], n: usize) -> Result<PartitionOfUnity, PouError> {
    if n < 3 {
        return Err(PouError::TowerInvalid(format!("depth {n} is below 3")));
    }
    let units = towers.first().map(|t| t.units).ok_or_else(|| PouError::TowerInvalid("no colors".into()))?;
    if let Some(t) = towers.iter().find(|t| t.depth != n || t.levels.len() != n + 2 || t.units != units) {
        return Err(PouError::TowerInvalid(format!("color {} does not have depth {n}", t.color)));
    }
    let psi = towers
        .iter()
        .map(|t| {
            (0..units)
                .map(|x| q(t.levels[..n].iter().filter(|l| l.contains(&x)).count() as i64, n as i64))
                .collect()
        })
        .collect();
    let supports = towers.iter().map(|t| t.top().clone()).collect();
    PartitionOfUnity::from_psi(units, supports, psi, n)
}

/// `√2(1 + √(d+1)) / √N = (1 + √(d+1)) / √(N/2)`.
pub fn depth_bound(d: usize, n: usize) -> SurdBound {
    SurdBound { alpha: qi(1), beta: qi(1), w: qi(d as i64 + 1), den: q(n as i64, 2) }
}

/// `2/N + √(4(d+1)/N) = (2 + 2√((d+1)N)) / √(N²)`.
pub fn proof_bound(d: usize, n: usize) -> SurdBound {
    let n = n as i64;
    SurdBound { alpha: qi(2), beta: qi(2), w: qi((d as i64 + 1) * n), den: qi(n * n) }
}

/// Least `N ≥ 3` with `2(1 + √(d+1))² / N < ε²`.
pub fn default_depth(d: usize, eps: &Q) -> Result<usize, PouError> {
    if !eps.is_positive() {
        return Err(PouError::InvalidEpsilon);
    }
    let e2 = eps * eps;
    // N ε² − 2(d+2) − 4√(d+1) > 0
    let ok = |n: usize| sign_linear_surd(&(qi(n as i64) * &e2 - qi(2 * (d as i64 + 2))), &qi(-4), &qi(d as i64 + 1)) == Ordering::Greater;
    let c = 1.0 + ((d + 1) as f64).sqrt();
    let guess = (2.0 * c * c / to_f64(&e2)).floor();
    let mut n = if guess.is_finite() { (guess as usize).saturating_sub(2).max(3) } else { 3 };
    while !ok(n) {
        n += 1;
    }
    while n > 3 && ok(n - 1) {
        n -= 1;
    }
    Ok(n)
}

#[derive(Debug, Clone, Serialize)]
pub struct PouReport {
    pub colors: usize,
    pub depth: usize,
    #[serde(serialize_with = "serialize_q")]
    pub epsilon: Q,
    pub arrows_checked: usize,
    pub units_checked: usize,
    /// (color, unit) with `ψ ≠ 0` outside the support.
    pub support_violations: Vec<(usize, usize)>,
    /// (unit, `Σφ²`) where the sum is not exactly 1.
    pub normalization_defects: Vec<(usize, String)>,
    /// (color, arrow) with oscillation `≥ ε`.
    pub oscillation_violations: Vec<(usize, usize)>,
    pub max_oscillation: f64,
    /// (color, arrow) attaining the maximum.
    pub worst: Option<(usize, usize)>,
    #[serde(serialize_with = "serialize_q")]
    pub max_psi_step: Q,
    /// `|ψ_j(r(g)) − ψ_j(s(g))| ≤ 2/N` on every arrow.
    pub psi_step_within: bool,
    /// `min Σ_j ψ_j(x)` over `r(K) ∪ s(K)`.
    #[serde(serialize_with = "serialize_q")]
    pub min_psi_sum: Q,
    /// Every oscillation is `≤ 2/N + √(4(d+1)/N)`.
    pub within_proof_bound: bool,
    /// Every oscillation is `< √2(1 + √(d+1))/√N`.
    pub within_depth_bound: bool,
    pub depth_bound: f64,
    /// `s(r⁻¹(x) ∩ K)` lies in one support for every `x`.
    pub partial_orbits_contained: bool,
}

impl PouReport {
    pub fn accepted(&self) -> bool {
        self.status().is_ok()
    }

    pub fn status(&self) -> Result<(), PouError> {
        if let Some(&(color, unit)) = self.support_violations.first() {
            return Err(PouError::SupportViolation { color, unit });
        }
        if let Some((unit, value)) = self.normalization_defects.first() {
            return Err(PouError::NormalizationDefect { unit: *unit, value: value.clone() });
        }
        if let Some(&(color, arrow)) = self.oscillation_violations.first() {
            return Err(PouError::OscillationTooLarge { color, arrow, epsilon: format_q(&self.epsilon) });
        }
        Ok(())
    }
}

/// Exhaustive check over the arrows of `K` and the units of `r(K) ∪ s(K)`.
pub fn verify_pou(g: &FiniteGroupoid, k: &[usize], pou: &PartitionOfUnity, eps: &Q) -> Result<PouReport, PouError> {
    if !eps.is_positive() {
        return Err(PouError::InvalidEpsilon);
    }
    if pou.units != g.num_points() {
        return Err(PouError::TowerInvalid(format!("{} units, groupoid has {}", pou.units, g.num_points())));
    }
    let ks = symmetrize(g, k);
    let base = base_units(g, &ks);
    let colors = pou.colors();
    let d = colors.saturating_sub(1);
    let n = pou.depth;

    let support_violations = (0..colors)
        .flat_map(|i| (0..pou.units).map(move |x| (i, x)))
        .filter(|&(i, x)| !pou.psi[i][x].is_zero() && !pou.supports[i].contains(&x))
        .collect();
    let normalization_defects = base
        .iter()
        .map(|&x| (x, pou.sum_of_squares(x)))
        .filter(|(_, s)| !s.is_one())
        .map(|(x, s)| (x, format_q(&s)))
        .collect();
    let min_psi_sum = base
        .iter()
        .map(|&x| pou.psi.iter().map(|row| row[x].clone()).sum::<Q>())
        .min()
        .unwrap_or_else(Q::zero);

    let eps_bound = SurdBound { alpha: eps.clone(), beta: Q::zero(), w: Q::zero(), den: Q::one() };
    let proof = proof_bound(d, n);
    let depth = depth_bound(d, n);
    let step_bound = q(2, n as i64);
    let mut oscillation_violations = Vec::new();
    let mut max_oscillation = 0.0;
    let mut worst = None;
    let mut max_psi_step = Q::zero();
    let mut within_proof_bound = true;
    let mut within_depth_bound = true;
    let mut arrows_checked = 0;
    for &a in &ks {
        let (s, r) = (g.source(a), g.range(a));
        if s == r {
            continue;
        }
        arrows_checked += 1;
        let (ns, nr) = (pou.normalizer(s), pou.normalizer(r));
        for i in 0..colors {
            let step = (&pou.psi[i][s] - &pou.psi[i][r]).abs();
            if step > max_psi_step {
                max_psi_step = step;
            }
            if pou.psi[i][s] == pou.psi[i][r] && ns == nr {
                continue;
            }
            let x = ScaledRoot { num: pou.psi[i][s].clone(), radicand: ns.clone() };
            let y = ScaledRoot { num: pou.psi[i][r].clone(), radicand: nr.clone() };
            if x.cmp_abs_diff(&y, &eps_bound) != Ordering::Less {
                oscillation_violations.push((i, a));
            }
            if x.cmp_abs_diff(&y, &proof) == Ordering::Greater {
                within_proof_bound = false;
            }
            if x.cmp_abs_diff(&y, &depth) != Ordering::Less {
                within_depth_bound = false;
            }
            let osc = (x.to_f64() - y.to_f64()).abs();
            if osc > max_oscillation {
                max_oscillation = osc;
                worst = Some((i, a));
            }
        }
    }
    let by_range = index_by(&ks, |a| g.range(a));
    let partial_orbits_contained = base.iter().all(|x| {
        let orbit: Vec<usize> = by_range.get(x).into_iter().flatten().map(|&a| g.source(a)).collect();
        pou.supports.iter().any(|u| orbit.iter().all(|y| u.contains(y)))
    });
    Ok(PouReport {
        colors,
        depth: n,
        epsilon: eps.clone(),
        arrows_checked,
        units_checked: base.len(),
        support_violations,
        normalization_defects,
        oscillation_violations,
        max_oscillation,
        worst,
        psi_step_within: max_psi_step <= step_bound,
        max_psi_step,
        min_psi_sum,
        within_proof_bound,
        within_depth_bound,
        depth_bound: depth.to_f64(),
        partial_orbits_contained,
    })
}
