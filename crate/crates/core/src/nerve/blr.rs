use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{
    act_point, check_equivariance, l1_distance, nice_cover_assign, symmetric_generators, EquivarianceReport,
    NerveError, SampledMap, SimplicialComplex, SimplicialPoint,
};
use crate::action::FiniteAction;
use crate::groupoid::verify::action_generators;
use crate::groupoid::{verify_groupoid_dad, FiniteGroupoid, GroupoidDadWitness, GroupoidReport};
use crate::rational::{format_q, pow10_neg, q, qi, Q};

/// `X × Γ` with `Γ` acting diagonally on the left; `(x, g)` has index `x·|Γ| + g`.
#[derive(Debug, Clone, Copy)]
pub struct ProductModel<'a> {
    pub act: &'a FiniteAction,
}

impl<'a> ProductModel<'a> {
    pub fn new(act: &'a FiniteAction) -> Self {
        ProductModel { act }
    }

    fn order(&self) -> usize {
        self.act.group().order()
    }

    pub fn len(&self) -> usize {
        self.act.points() * self.order()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, x: usize, g: usize) -> usize {
        x * self.order() + g
    }

    pub fn split(&self, p: usize) -> (usize, usize) {
        (p / self.order(), p % self.order())
    }

    /// `h·(x, g) = (hx, hg)`.
    pub fn left(&self, h: usize, p: usize) -> usize {
        let (x, g) = self.split(p);
        self.index(self.act.act(h, x), self.act.group().mul(h, g))
    }

    /// `(x, g) ↦ (x, gh)`.
    pub fn right(&self, p: usize, h: usize) -> usize {
        let (x, g) = self.split(p);
        self.index(x, self.act.group().mul(g, h))
    }

    pub fn translate(&self, h: usize, set: &[bool]) -> Vec<bool> {
        let mut out = vec![false; set.len()];
        for (p, &b) in set.iter().enumerate() {
            if b {
                out[self.left(h, p)] = true;
            }
        }
        out
    }

    /// Points `p` with `p·E ⊆ set`.
    fn interior(&self, set: &[bool], e: &[usize]) -> Vec<bool> {
        (0..set.len()).map(|p| e.iter().all(|&h| set[self.right(p, h)])).collect()
    }

    /// `{p·h : p ∈ set, h ∈ E}`.
    fn spread(&self, set: &[bool], e: &[usize]) -> Vec<bool> {
        let mut out = vec![false; set.len()];
        for (p, &b) in set.iter().enumerate() {
            if b {
                for &h in e {
                    out[self.right(p, h)] = true;
                }
            }
        }
        out
    }
}

/// `E^m` as a sorted set of group elements.
fn power(act: &FiniteAction, e: &[usize], m: usize) -> Vec<usize> {
    let g = act.group();
    let mut cur: BTreeSet<usize> = BTreeSet::from([g.identity()]);
    for _ in 0..m {
        cur = cur.iter().flat_map(|&a| e.iter().map(move |&b| g.mul(a, b))).collect();
    }
    cur.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct CoverReport {
    /// `translate[g][U]` is the index of `gU`.
    pub translate: Vec<Vec<usize>>,
    pub multiplicity: usize,
    pub stabilizer_orders: Vec<usize>,
    /// Number of `Γ`-orbits of cover elements.
    pub orbits: usize,
    pub vertex_action: FiniteAction,
}

fn violated(label: &str, detail: String) -> NerveError {
    NerveError::ConditionViolated { label: label.into(), detail }
}

fn first_gap(model: ProductModel<'_>, cover: &[Vec<bool>], e: &[usize]) -> Option<usize> {
    (0..model.len()).find(|&p| !cover.iter().any(|u| e.iter().all(|&h| u[model.right(p, h)])))
}

/// Checks that the cover is equivariant, that each set misses its other
/// translates (label `A`), that multiplicity is at most `d+1` (label `C`) and
/// that every `{x} × gE` lies in one set (label `E`). Stabilizers are finite
/// subgroups and the cover is finite, so the remaining conditions hold.
pub fn check_cover_conditions(
    act: &FiniteAction,
    cover: &[Vec<bool>],
    e: &[usize],
    d: usize,
) -> Result<CoverReport, NerveError> {
    let model = ProductModel::new(act);
    if cover.iter().any(|u| u.len() != model.len()) {
        return Err(violated("cover", "sets must be subsets of X × Γ".into()));
    }
    let index: HashMap<&[bool], usize> = cover.iter().enumerate().map(|(i, u)| (u.as_slice(), i)).collect();
    let order = act.group().order();
    let mut translate = vec![vec![0; cover.len()]; order];
    for (g, row) in translate.iter_mut().enumerate() {
        for (i, u) in cover.iter().enumerate() {
            let gu = model.translate(g, u);
            row[i] = *index
                .get(gu.as_slice())
                .ok_or_else(|| violated("equivariance", format!("translate of set {i} by {g} is not in the cover")))?;
            if row[i] != i && gu.iter().zip(u).any(|(a, b)| *a && *b) {
                return Err(violated("A", format!("set {i} meets its translate by {g}")));
            }
        }
    }
    let stabilizer_orders = (0..cover.len()).map(|i| (0..order).filter(|&g| translate[g][i] == i).count()).collect();
    let multiplicity = (0..model.len()).map(|p| cover.iter().filter(|u| u[p]).count()).max().unwrap_or(0);
    if multiplicity > d + 1 {
        return Err(violated("C", format!("multiplicity {multiplicity} exceeds {}", d + 1)));
    }
    if let Some(p) = first_gap(model, cover, e) {
        let (x, g) = model.split(p);
        return Err(violated("E", format!("no set contains {{{x}}} × {g}E")));
    }
    let mut seen = vec![false; cover.len()];
    let mut orbits = 0;
    for i in 0..cover.len() {
        if !seen[i] {
            orbits += 1;
            for row in &translate {
                seen[row[i]] = true;
            }
        }
    }
    let vertex_action = FiniteAction::new(act.group().clone(), cover.len(), translate.clone())
        .map_err(|e| violated("equivariance", e.to_string()))?;
    Ok(CoverReport { translate, multiplicity, stabilizer_orders, orbits, vertex_action })
}

/// The nerve map built from an equivariant cover.
#[derive(Debug, Clone)]
pub struct NerveMap {
    pub complex: SimplicialComplex,
    pub vertex_action: FiniteAction,
    pub f: SampledMap,
    pub depth: usize,
    pub d: usize,
    /// `(2d+2)(4d+6)/n`.
    pub bound: Q,
    /// `max Σ_U |φ_U(x,g) − φ_U(x,gh)|` over `h ∈ E`.
    pub pou_defect: Q,
    pub max_nonzero: usize,
    pub equivariance: EquivarianceReport,
}

/// Nerve map of an equivariant cover of `X × Γ` that passes
/// [`check_cover_conditions`] for `Eⁿ`.
///
/// Shrinkings are `V⁽ⁿ⁾ = U⁽ⁿ⁾` and `V⁽ᵐ⁻¹⁾ = V⁽ᵐ⁾·E`; the Urysohn functions are
/// the indicators of `V⁽ᵐ⁾`, so `ψ_U = Σ_{m=1}^n 1_{V⁽ᵐ⁾}` and `φ_U = ψ_U / Σ_V ψ_V`.
pub fn map_from_cover(act: &FiniteAction, cover: &[Vec<bool>], e: &[usize], n: usize) -> Result<NerveMap, NerveError> {
    if n == 0 {
        return Err(NerveError::DepthInsufficient(0));
    }
    let model = ProductModel::new(act);
    let e_sym = symmetric_generators(act, e);
    let report = check_cover_conditions(act, cover, &e_sym, cover.len())?;
    if first_gap(model, cover, &power(act, &e_sym, n)).is_some() {
        return Err(NerveError::DepthInsufficient(n));
    }
    let d = report.multiplicity.saturating_sub(1);
    // ψ_U as integer counts
    let psi: Vec<Vec<u32>> = cover
        .iter()
        .map(|u| {
            let mut interior = u.clone();
            for _ in 0..n {
                interior = model.interior(&interior, &e_sym);
            }
            let mut v = interior;
            let mut counts = vec![0u32; u.len()];
            for m in (1..=n).rev() {
                for (c, &b) in counts.iter_mut().zip(&v) {
                    *c += b as u32;
                }
                if m > 1 {
                    v = model.spread(&v, &e_sym);
                }
            }
            counts
        })
        .collect();
    let total: Vec<u32> = (0..model.len()).map(|p| psi.iter().map(|c| c[p]).sum()).collect();
    debug_assert!(total.iter().all(|&t| t as usize >= n));
    let phi = |u: usize, p: usize| q(psi[u][p] as i64, total[p] as i64);
    let max_nonzero = (0..model.len()).map(|p| psi.iter().filter(|c| c[p] > 0).count()).max().unwrap_or(0);
    // Σ_U |ψ_U(p)/T(p) − ψ_U(ph)/T(ph)| as (numerator, denominator) in integers
    let mut worst: (u128, u128) = (0, 1);
    for p in 0..model.len() {
        for &h in &e_sym {
            let ph = model.right(p, h);
            let (tp, tph) = (total[p] as u128, total[ph] as u128);
            let num: u128 = psi.iter().map(|c| (c[p] as u128 * tph).abs_diff(c[ph] as u128 * tp)).sum();
            let den = tp * tph;
            if num * worst.1 > worst.0 * den {
                worst = (num, den);
            }
        }
    }
    let pou_defect = q(worst.0 as i64, worst.1 as i64);
    let identity = act.group().identity();
    let f: SampledMap = (0..act.points())
        .map(|x| {
            let p = model.index(x, identity);
            SimplicialPoint::new((0..cover.len()).map(|u| (u, phi(u, p)))).expect("partition of unity")
        })
        .collect();
    let faces: Vec<BTreeSet<usize>> = (0..model.len())
        .map(|p| (0..cover.len()).filter(|&u| cover[u][p]).collect::<BTreeSet<usize>>())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let complex = SimplicialComplex::new((0..cover.len()).collect(), faces)?;
    let di = d as i64;
    let bound = q((2 * di + 2) * (4 * di + 6), n as i64);
    let equivariance = check_equivariance(&f, act, &report.vertex_action, &e_sym, &bound)?;
    Ok(NerveMap {
        complex,
        vertex_action: report.vertex_action,
        f,
        depth: n,
        d,
        bound,
        pou_defect,
        max_nonzero,
        equivariance,
    })
}

/// Pullback cover of `X × Γ` with its labels `(i, Δ)`.
#[derive(Debug, Clone)]
pub struct PulledBackCover {
    pub sets: Vec<Vec<bool>>,
    pub labels: Vec<(usize, BTreeSet<usize>)>,
    pub report: CoverReport,
    pub radius: Q,
}

fn check_map(
    act_x: &FiniteAction,
    act_v: &FiniteAction,
    c: &SimplicialComplex,
    f: &[SimplicialPoint],
) -> Result<(), NerveError> {
    if act_x.group().order() != act_v.group().order() {
        return Err(NerveError::ActionMismatch("groups of different orders".into()));
    }
    if f.len() < act_x.points() {
        return Err(NerveError::MissingSample(f.len()));
    }
    if !c.is_invariant(act_v) || c.vertices().iter().any(|&v| v >= act_v.points()) {
        return Err(NerveError::ActionMismatch("vertex action does not preserve the complex".into()));
    }
    if let Some(mu) = f.iter().find(|mu| !c.contains_point(mu)) {
        return Err(NerveError::NotInComplex(mu.support().into_iter().collect()));
    }
    Ok(())
}

/// Pullback of the skeleton cover along `φ(x, g) = g f(g⁻¹x)`.
///
/// The neighbourhood `N_δ(V_{iΔ})`, `δ = (1/6)10⁻ᵈ`, is replaced by the
/// `δ`-neighbourhood of the sampled part `V_{iΔ} ∩ φ(X × Γ)`.
pub fn cover_from_map(
    act_x: &FiniteAction,
    act_v: &FiniteAction,
    c: &SimplicialComplex,
    f: &[SimplicialPoint],
    e: &[usize],
) -> Result<PulledBackCover, NerveError> {
    check_map(act_x, act_v, c, f)?;
    let d = c.dimension();
    let radius = q(1, 6) * pow10_neg(d as u32);
    let model = ProductModel::new(act_x);
    let group = act_x.group();
    let mut values: BTreeMap<SimplicialPoint, Vec<usize>> = BTreeMap::new();
    for p in 0..model.len() {
        let (x, g) = model.split(p);
        let mu = act_point(act_v, g, &f[act_x.act(group.inv(g), x)]);
        values.entry(mu).or_default().push(p);
    }
    let mut cores: BTreeMap<(usize, BTreeSet<usize>), Vec<&SimplicialPoint>> = BTreeMap::new();
    for mu in values.keys() {
        cores.entry(nice_cover_assign(mu, c)?).or_default().push(mu);
    }
    let mut sets: Vec<Vec<bool>> = Vec::new();
    let mut labels = Vec::new();
    let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
    for (label, core) in cores {
        let mut set = vec![false; model.len()];
        for (mu, ps) in &values {
            if core.iter().any(|c| l1_distance(mu, c) < radius) {
                for &p in ps {
                    set[p] = true;
                }
            }
        }
        if !seen.contains_key(&set) {
            seen.insert(set.clone(), sets.len());
            sets.push(set);
            labels.push(label);
        }
    }
    let report = check_cover_conditions(act_x, &sets, &symmetric_generators(act_x, e), d)?;
    Ok(PulledBackCover { sets, labels, report, radius })
}

/// Dad witness on `Γ ⋉ X` read off an `(E, (1/3)10⁻ᵈ)`-equivariant map.
#[derive(Debug, Clone)]
pub struct BlrWitness {
    pub groupoid: FiniteGroupoid,
    pub witness: GroupoidDadWitness,
    pub report: GroupoidReport,
    pub labels: Vec<(usize, BTreeSet<usize>)>,
    /// `F = {g : gS ∩ S ≠ ∅}`.
    pub f_set: BTreeSet<usize>,
    /// Group parts of all generated arrows lie in `F`.
    pub within_f: bool,
    /// `x ∈ U_{iΔ}, gx ∈ U_i, g ∈ E ⇒ gx ∈ U_{i gΔ}` on every sample.
    pub key_step: bool,
    pub defect: Q,
    pub threshold: Q,
}

pub fn dad_witness_from_blr(
    act_x: &FiniteAction,
    act_v: &FiniteAction,
    c: &SimplicialComplex,
    f: &[SimplicialPoint],
    e: &[usize],
) -> Result<BlrWitness, NerveError> {
    check_map(act_x, act_v, c, f)?;
    let d = c.dimension();
    let threshold = q(1, 3) * pow10_neg(d as u32);
    let e_sym = symmetric_generators(act_x, e);
    let eq = check_equivariance(f, act_x, act_v, &e_sym, &threshold)?;
    if !eq.accepted {
        return Err(NerveError::EquivarianceTooWeak {
            defect: format_q(&eq.max_defect),
            threshold: format_q(&threshold),
        });
    }
    let labels: Vec<(usize, BTreeSet<usize>)> =
        f.iter().take(act_x.points()).map(|mu| nice_cover_assign(mu, c)).collect::<Result<_, _>>()?;
    let mut key_step = true;
    for (x, (i, delta)) in labels.iter().enumerate() {
        for &g in &e_sym {
            let (j, other) = &labels[act_x.act(g, x)];
            let moved: BTreeSet<usize> = delta.iter().map(|&v| act_v.act(g, v)).collect();
            if j == i && *other != moved {
                key_step = false;
            }
        }
    }
    let s: BTreeSet<usize> = f.iter().flat_map(|mu| mu.support()).collect();
    let f_set: BTreeSet<usize> =
        (0..act_x.group().order()).filter(|&g| s.iter().any(|&v| s.contains(&act_v.act(g, v)))).collect();
    let groupoid = FiniteGroupoid::transformation(act_x.clone());
    let k = action_generators(&groupoid, &e_sym);
    let colors: Vec<BTreeSet<usize>> =
        (0..=d).map(|i| (0..act_x.points()).filter(|&x| labels[x].0 == i).collect()).collect();
    let witness = GroupoidDadWitness::from_colors(&groupoid, k, colors);
    let report = verify_groupoid_dad(&groupoid, &witness, None)?;
    let within_f = witness.generated.iter().all(|gen| {
        gen.to_arrows(&groupoid)
            .into_iter()
            .all(|a| f_set.contains(&groupoid.group_part(a).expect("transformation groupoid")))
    });
    Ok(BlrWitness {
        groupoid,
        witness,
        report,
        labels,
        f_set,
        within_f,
        key_step,
        defect: eq.max_defect,
        threshold,
    })
}

/// `(2d+2)(4d+6)/n`.
pub fn nerve_defect_bound(d: usize, n: usize) -> Q {
    let d = qi(d as i64);
    (qi(2) * &d + qi(2)) * (qi(4) * d + qi(6)) / qi(n as i64)
}
