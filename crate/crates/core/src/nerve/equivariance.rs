use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;

use super::{l1_distance, NerveError, SimplicialPoint};
use crate::action::FiniteAction;
use crate::rational::{format_q, q, qi, Q};

/// A map on the points `0..m` of a finite space, one sample per point.
pub type SampledMap = Vec<SimplicialPoint>;

/// `g·μ` for a simplicial action given on vertices.
pub fn act_point(act_v: &FiniteAction, g: usize, mu: &SimplicialPoint) -> SimplicialPoint {
    mu.map_vertices(|v| act_v.act(g, v))
}

/// `E ∪ E⁻¹ ∪ {e}`, sorted.
pub fn symmetric_generators(act: &FiniteAction, e: &[usize]) -> Vec<usize> {
    let g = act.group();
    let mut out: BTreeSet<usize> = e.iter().flat_map(|&k| [k, g.inv(k)]).collect();
    out.insert(g.identity());
    out.into_iter().collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivarianceReport {
    /// `sup_x d(f(gx), g f(x))` for each `g ∈ E`.
    #[serde(serialize_with = "ser_pairs")]
    pub per_element: Vec<(usize, Q)>,
    #[serde(serialize_with = "ser_q")]
    pub max_defect: Q,
    /// Element and point attaining the maximum.
    pub worst: Option<(usize, usize)>,
    #[serde(serialize_with = "ser_q")]
    pub epsilon: Q,
    pub accepted: bool,
    pub samples: usize,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_q(x))
}

fn ser_pairs<S: serde::Serializer>(v: &[(usize, Q)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (g, x) in v {
        seq.serialize_element(&(g, format_q(x)))?;
    }
    seq.end()
}

/// Largest `d(f(gx), g f(x))` over samples and `g ∈ E`; accepted iff `< ε`.
pub fn check_equivariance(
    f: &[SimplicialPoint],
    act_x: &FiniteAction,
    act_v: &FiniteAction,
    e: &[usize],
    eps: &Q,
) -> Result<EquivarianceReport, NerveError> {
    if act_x.group().order() != act_v.group().order() {
        return Err(NerveError::ActionMismatch("groups of different orders".into()));
    }
    if f.len() < act_x.points() {
        return Err(NerveError::MissingSample(f.len()));
    }
    if let Some(&g) = e.iter().find(|&&g| g >= act_x.group().order()) {
        return Err(NerveError::ActionMismatch(format!("element {g} is not in the group")));
    }
    let mut per_element = Vec::new();
    let mut max_defect = Q::zero();
    let mut worst = None;
    for &g in e {
        let mut sup = Q::zero();
        for x in 0..act_x.points() {
            let d = l1_distance(&f[act_x.act(g, x)], &act_point(act_v, g, &f[x]));
            if d > sup {
                sup = d.clone();
            }
            if d > max_defect || worst.is_none() {
                max_defect = max_defect.max(d);
                worst = Some((g, x));
            }
        }
        per_element.push((g, sup));
    }
    Ok(EquivarianceReport {
        accepted: &max_defect < eps,
        per_element,
        max_defect,
        worst,
        epsilon: eps.clone(),
        samples: act_x.points(),
    })
}

/// `min{1, ½ min_{g∈E} (ε − sup_x d(f(gx), g f(x)))}`.
pub fn perturbation_delta(eps: &Q, sup_defects: &[Q]) -> Q {
    let slack = sup_defects.iter().map(|d| eps - d).min().unwrap_or_else(|| eps.clone());
    (q(1, 2) * slack).min(Q::one())
}

#[derive(Debug, Clone)]
pub struct Perturbation {
    pub map: SampledMap,
    pub support: BTreeSet<usize>,
    pub delta: Q,
    /// `d(f(x), f'(x)) = 2(1 − T(x))` per sample.
    pub per_point: Vec<Q>,
    pub max_perturbation: Q,
}

/// `f'(x) = Σ_{v∈S} (t_v(x)/T(x)) v`; every sample must have mass `< δ/2` outside `S`.
pub fn perturb_to_finite_support(
    f: &[SimplicialPoint],
    s: &BTreeSet<usize>,
    delta: &Q,
) -> Result<Perturbation, NerveError> {
    let half = q(1, 2) * delta;
    let mut map = Vec::with_capacity(f.len());
    let mut per_point = Vec::with_capacity(f.len());
    for (x, mu) in f.iter().enumerate() {
        let t = mu.mass_on(s);
        let tail = Q::one() - &t;
        if tail >= half {
            return Err(NerveError::NoFiniteS { x, tail: format_q(&tail) });
        }
        let weights: BTreeMap<usize, Q> =
            mu.weights().iter().filter(|(v, _)| s.contains(v)).map(|(&v, w)| (v, w / &t)).collect();
        map.push(SimplicialPoint::new(weights).expect("renormalized weights sum to one"));
        per_point.push(qi(2) * tail);
    }
    let max_perturbation = per_point.iter().max().cloned().unwrap_or_else(Q::zero);
    Ok(Perturbation { map, support: s.clone(), delta: delta.clone(), per_point, max_perturbation })
}

/// Adds vertices by decreasing largest weight until every sample has tail `< δ/2`.
pub fn choose_support(f: &[SimplicialPoint], delta: &Q) -> Result<BTreeSet<usize>, NerveError> {
    let half = q(1, 2) * delta;
    let mut peak: BTreeMap<usize, Q> = BTreeMap::new();
    for mu in f {
        for (&v, w) in mu.weights() {
            let e = peak.entry(v).or_insert_with(Q::zero);
            if w > e {
                *e = w.clone();
            }
        }
    }
    let mut order: Vec<(usize, Q)> = peak.into_iter().collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut s = BTreeSet::new();
    let ok = |s: &BTreeSet<usize>| f.iter().all(|mu| Q::one() - mu.mass_on(s) < half);
    for (v, _) in order {
        if ok(&s) {
            break;
        }
        s.insert(v);
    }
    if ok(&s) {
        Ok(s)
    } else {
        Err(NerveError::NoFiniteS { x: 0, tail: "1".into() })
    }
}
