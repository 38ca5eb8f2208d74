//! Dynamic asymptotic dimension witnesses for ℤ-actions on symbolic spaces.
//!
//! A witness is a clopen cover `U_0..U_d` together with, for each color, the
//! finite set of integers reachable along `E`-paths that never leave the
//! color. The verifier recomputes those sets by a breadth-first search whose
//! states carry the exact clopen set of points still following the path.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::error::ParseError;
use crate::symbolic::{ClopenSet, SymbolicError, SymbolicSystem};

pub const BLOWUP_CAP: u64 = 1_000_000;
/// Search bound for subshift gaps when choosing a default blowup bound.
pub const GAP_SEARCH: u64 = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("system is not known to be minimal")]
    NotMinimal,
    #[error("colors do not cover the space; uncovered cylinders: {0:?}")]
    CoverGap(Vec<String>),
    #[error("color {color}: more than {bound} group elements reached ({})", if *.provably_infinite { "the set is infinite" } else { "bound too small or witness invalid" })]
    BlowupExceeded {
        color: usize,
        bound: u64,
        provably_infinite: bool,
    },
    #[error("color {0}: declared finite set differs from the reached set")]
    DeclaredMismatch(usize),
    #[error("generator set must be nonempty and symmetric")]
    InvalidGenerators,
    #[error("color {color}: reached element {element} outside the bound [-{bound}, {bound}]")]
    BoundViolated { color: usize, element: i64, bound: i64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DadWitness {
    pub colors: Vec<ClopenSet>,
    /// The generator set `E`, sorted.
    pub generators: Vec<i64>,
    pub finite_sets: Vec<BTreeSet<i64>>,
}

/// One frontier entry of the search: group element and the points that
/// can follow some path to it inside the color.
#[derive(Debug, Clone)]
pub struct PathConstraintState {
    pub group_element: i64,
    pub constraint: ClopenSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorOutcome {
    Finite(BTreeSet<i64>),
    Blowup {
        explored: u64,
        bound: u64,
        /// Some nonzero `m` has every point of the color reaching `m`; then
        /// all multiples of `m` are reached and the set is infinite.
        provably_infinite: bool,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ColorReport {
    pub color: usize,
    pub outcome: ColorOutcome,
    pub matches_declared: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub uncovered: Vec<String>,
    pub colors: Vec<ColorReport>,
    pub blowup_bound: u64,
}

impl WitnessReport {
    pub fn accepted(&self) -> bool {
        self.status().is_ok()
    }

    /// First failure, in the order cover, blowup, declared mismatch.
    pub fn status(&self) -> Result<(), WitnessError> {
        if !self.uncovered.is_empty() {
            return Err(WitnessError::CoverGap(self.uncovered.clone()));
        }
        for c in &self.colors {
            if let ColorOutcome::Blowup { bound, provably_infinite, .. } = c.outcome {
                return Err(WitnessError::BlowupExceeded {
                    color: c.color,
                    bound,
                    provably_infinite,
                });
            }
        }
        for c in &self.colors {
            if !c.matches_declared {
                return Err(WitnessError::DeclaredMismatch(c.color));
            }
        }
        Ok(())
    }

    pub fn reached(&self, color: usize) -> Option<&BTreeSet<i64>> {
        match &self.colors.get(color)?.outcome {
            ColorOutcome::Finite(s) => Some(s),
            ColorOutcome::Blowup { .. } => None,
        }
    }
}

fn check_generators(e: &[i64]) -> Result<(), WitnessError> {
    if e.is_empty() || e.iter().any(|g| !e.contains(&-g)) {
        return Err(WitnessError::InvalidGenerators);
    }
    Ok(())
}

/// Exact search for the set of integers reachable along `E`-paths inside `u`.
///
/// `reach[n]` is the set of `x in u` admitting such a path from `0` to `n`;
/// it satisfies `reach[n+e] ⊇ reach[n] ∩ (-(n+e))·u` and is computed as the
/// least solution.
pub fn explore_color(u: &ClopenSet, e: &[i64], bound: u64) -> Result<ColorOutcome, SymbolicError> {
    if u.is_empty() {
        return Ok(ColorOutcome::Finite(BTreeSet::new()));
    }
    let mut reach: BTreeMap<i64, ClopenSet> = BTreeMap::new();
    reach.insert(0, u.clone());
    let mut queue = VecDeque::from([0i64]);
    let mut queued: BTreeSet<i64> = BTreeSet::from([0]);
    let mut pulled: HashMap<i64, ClopenSet> = HashMap::new();
    while let Some(n) = queue.pop_front() {
        queued.remove(&n);
        let here = reach[&n].clone();
        for &g in e {
            let m = n + g;
            let back = match pulled.get(&m) {
                Some(b) => b.clone(),
                None => {
                    let b = u.translate(-m)?;
                    pulled.insert(m, b.clone());
                    b
                }
            };
            let add = here.intersection(&back)?;
            if add.is_empty() {
                continue;
            }
            let grown = match reach.get(&m) {
                None => Some(add),
                Some(old) => {
                    let new = old.union(&add)?;
                    (new != *old).then_some(new)
                }
            };
            if let Some(new) = grown {
                reach.insert(m, new);
                if queued.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        if reach.len() as u64 > bound {
            let provably_infinite = reach.iter().any(|(&m, c)| m != 0 && c == u);
            return Ok(ColorOutcome::Blowup {
                explored: reach.len() as u64,
                bound,
                provably_infinite,
            });
        }
    }
    Ok(ColorOutcome::Finite(reach.into_keys().collect()))
}

/// Frontier states of a finished search, one per reached element.
pub fn path_states(u: &ClopenSet, e: &[i64], bound: u64) -> Result<Vec<PathConstraintState>, SymbolicError> {
    let ColorOutcome::Finite(set) = explore_color(u, e, bound)? else {
        return Ok(Vec::new());
    };
    // recompute constraints along the reached set
    let mut reach: BTreeMap<i64, ClopenSet> = BTreeMap::new();
    reach.insert(0, u.clone());
    let mut changed = true;
    while changed {
        changed = false;
        let snapshot: Vec<(i64, ClopenSet)> = reach.iter().map(|(k, v)| (*k, v.clone())).collect();
        for (n, c) in snapshot {
            for &g in e {
                let m = n + g;
                if !set.contains(&m) {
                    continue;
                }
                let add = c.intersection(&u.translate(-m)?)?;
                let new = match reach.get(&m) {
                    Some(old) => old.union(&add)?,
                    None => add,
                };
                if reach.get(&m) != Some(&new) && !new.is_empty() {
                    reach.insert(m, new);
                    changed = true;
                }
            }
        }
    }
    Ok(reach
        .into_iter()
        .map(|(group_element, constraint)| PathConstraintState { group_element, constraint })
        .collect())
}

fn max_gap_of(u: &ClopenSet) -> Option<u64> {
    if u.is_empty() {
        return None;
    }
    let bound = if u.system().is_odometer() { 1 } else { GAP_SEARCH };
    u.return_time_report(bound).ok()?.max_gap.exact()
}

/// `(2|E|+1)^(max_gap·(d+1))`, capped; the cap is used when a gap is unknown.
pub fn default_blowup_bound(colors: &[ClopenSet], e: &[i64]) -> u64 {
    let mut gap = 1u64;
    for u in colors {
        match max_gap_of(u) {
            Some(m) => gap = gap.max(m),
            None if u.is_empty() => {}
            None => return BLOWUP_CAP,
        }
    }
    let base = 2 * e.len() as u64 + 1;
    let exp = gap.saturating_mul(colors.len() as u64);
    let mut v: u64 = 1;
    for _ in 0..exp {
        v = v.saturating_mul(base);
        if v >= BLOWUP_CAP {
            return BLOWUP_CAP;
        }
    }
    v
}

/// Uncovered part of the space, as cylinder strings.
pub fn cover_gap(sys: &Arc<SymbolicSystem>, colors: &[ClopenSet]) -> Result<Vec<String>, SymbolicError> {
    let mut all = ClopenSet::empty(sys);
    for c in colors {
        all = all.union(c)?;
    }
    Ok(all.complement()?.to_strings())
}

pub fn verify_dad_witness(
    sys: &Arc<SymbolicSystem>,
    w: &DadWitness,
    blowup_bound: Option<u64>,
) -> Result<WitnessReport, WitnessError> {
    check_generators(&w.generators)?;
    for c in &w.colors {
        if !Arc::ptr_eq(c.system(), sys) {
            return Err(SymbolicError::SystemMismatch.into());
        }
    }
    let bound = blowup_bound.unwrap_or_else(|| default_blowup_bound(&w.colors, &w.generators));
    let uncovered = cover_gap(sys, &w.colors)?;
    let outcomes: Vec<Result<ColorOutcome, SymbolicError>> = std::thread::scope(|s| {
        let handles: Vec<_> = w
            .colors
            .iter()
            .map(|u| s.spawn(move || explore_color(u, &w.generators, bound)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("color search panicked")).collect()
    });
    let mut colors = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        let outcome = o?;
        let matches_declared = match &outcome {
            ColorOutcome::Finite(s) => w.finite_sets.get(i) == Some(s),
            ColorOutcome::Blowup { .. } => false,
        };
        colors.push(ColorReport { color: i, outcome, matches_declared });
    }
    Ok(WitnessReport { uncovered, colors, blowup_bound: bound })
}

/// Output of the two-color construction for a minimal ℤ-system.
#[derive(Debug, Clone)]
pub struct Construction {
    pub witness: DadWitness,
    pub n: u64,
    pub u: ClopenSet,
    pub v: ClopenSet,
    /// Maximal gap of `v`.
    pub m: u64,
}

impl Construction {
    /// `F_0 ⊆ [-3N,3N]` and `F_1 ⊆ [-M-N, M+N]`.
    pub fn check_bounds(&self) -> Result<(), WitnessError> {
        let n = self.n as i64;
        let bounds = [3 * n, self.m as i64 + n];
        for (color, (set, &b)) in self.witness.finite_sets.iter().zip(&bounds).enumerate() {
            if let Some(&element) = set.iter().find(|x| x.abs() > b) {
                return Err(WitnessError::BoundViolated { color, element, bound: b });
            }
        }
        Ok(())
    }
}

/// Least-depth, lexicographically least cylinder with disjoint translates up
/// to radius `5N`.
fn find_base_cylinder(sys: &Arc<SymbolicSystem>, radius: u64) -> Result<ClopenSet, WitnessError> {
    let mut frontier = vec![Vec::new()];
    loop {
        let mut next = Vec::new();
        for w in &frontier {
            next.extend(sys.children(w)?);
        }
        next.sort();
        for w in &next {
            let c = ClopenSet::from_valid(sys, vec![w.clone()])?;
            if c.disjoint_translates_radius(radius)? {
                return Ok(c);
            }
        }
        if sys.is_odometer() {
            // all cylinders of one depth share the return time
            next.truncate(1);
        }
        frontier = next;
    }
}

pub fn construct_minimal_z_witness(sys: &Arc<SymbolicSystem>, n: u64) -> Result<Construction, WitnessError> {
    if !sys.is_minimal() {
        return Err(WitnessError::NotMinimal);
    }
    let ni = n as i64;
    let u = find_base_cylinder(sys, 5 * n)?;
    // least branch one level down; a forced extension names the same set,
    // so descend until a genuine split appears
    let mut word = u.cylinders()[0].clone();
    let first_child = loop {
        let kids = sys.children(&word)?;
        match kids.len() {
            0 => return Err(SymbolicError::InvalidWord(sys.format_word(&word)).into()),
            1 => word = kids[0].clone(),
            _ => break kids[0].clone(),
        }
    };
    let v = ClopenSet::from_valid(sys, vec![first_child])?;
    let mut u0 = ClopenSet::empty(sys);
    let mut vs = ClopenSet::empty(sys);
    for k in -ni..=ni {
        u0 = u0.union(&u.translate(k)?)?;
        vs = vs.union(&v.translate(k)?)?;
    }
    let u1 = vs.complement()?;
    let search = if sys.is_odometer() { 1 } else { (sys.depth_limit() as u64).max(1) };
    let m = v.return_time_report(search)?.max_gap.require()?;
    let generators: Vec<i64> = (-ni..=ni).collect();
    let colors = vec![u0, u1];
    let bound = default_blowup_bound(&colors, &generators);
    let mut finite_sets = Vec::new();
    for (color, c) in colors.iter().enumerate() {
        match explore_color(c, &generators, bound)? {
            ColorOutcome::Finite(s) => finite_sets.push(s),
            ColorOutcome::Blowup { provably_infinite, .. } => {
                return Err(WitnessError::BlowupExceeded { color, bound, provably_infinite })
            }
        }
    }
    let c = Construction {
        witness: DadWitness { colors, generators, finite_sets },
        n,
        u,
        v,
        m,
    };
    c.check_bounds()?;
    Ok(c)
}

impl DadWitness {
    pub fn to_json(&self) -> Value {
        json!({
            "E": self.generators,
            "colors": self.colors.iter().map(|c| c.to_strings()).collect::<Vec<_>>(),
            "finite_sets": self.finite_sets.iter().map(|s| s.iter().collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(sys: &Arc<SymbolicSystem>, v: &Value) -> Result<Self, WitnessError> {
        let schema = |m: &str| WitnessError::Parse(ParseError::Schema(m.to_string()));
        let ints = |v: &Value| -> Option<Vec<i64>> { v.as_array()?.iter().map(Value::as_i64).collect() };
        let mut generators = ints(v.get("E").ok_or_else(|| schema("missing E"))?).ok_or_else(|| schema("E must be integers"))?;
        generators.sort();
        generators.dedup();
        let colors = v
            .get("colors")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("missing colors"))?
            .iter()
            .map(|c| {
                let items: Vec<String> = c
                    .as_array()
                    .ok_or_else(|| schema("color must be a list of words"))?
                    .iter()
                    .map(|s| s.as_str().map(str::to_string).ok_or_else(|| schema("word must be a string")))
                    .collect::<Result<_, _>>()?;
                Ok(ClopenSet::from_strings(sys, &items)?)
            })
            .collect::<Result<Vec<_>, WitnessError>>()?;
        let finite_sets = match v.get("finite_sets") {
            None => Vec::new(),
            Some(f) => f
                .as_array()
                .ok_or_else(|| schema("finite_sets must be a list"))?
                .iter()
                .map(|s| ints(s).map(|x| x.into_iter().collect()).ok_or_else(|| schema("finite set must be integers")))
                .collect::<Result<_, _>>()?,
        };
        Ok(DadWitness { colors, generators, finite_sets })
    }
}
