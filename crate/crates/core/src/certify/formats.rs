//! Textual file formats. Every file is JSON with sorted keys; rationals are
//! `"p/q"` strings and floats carry 12 significant digits.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::action::{FiniteAction, FiniteGroup};
use crate::coarse::{AsdimWitness, FiniteMetricSpace, GroupGenerators};
use crate::cstar::{DeclaredPou, C64};
use crate::error::{Error, ParseError};
use crate::groupoid::verify::seed;
use crate::groupoid::{generate_subgroupoid, FiniteGroupoid, GroupoidDadWitness, Subgroupoid};
use crate::nerve::{ProductModel, SimplicialComplex, SimplicialPoint};
use crate::pou::{PartitionOfUnity, PouPipeline};
use crate::rational::{format_q, parse_q, to_f64, Q};
use crate::symbolic::{SubshiftRules, SymbolicSystem, SystemKind, Word, DEFAULT_ODOMETER_DEPTH, DEFAULT_SUBSHIFT_DEPTH};

/// Significant digits kept for floats in reports.
pub const FLOAT_DIGITS: usize = 12;

fn schema(m: impl Into<String>) -> Error {
    ParseError::Schema(m.into()).into()
}

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&sort_keys(v.clone())).expect("json values serialize");
    s.push('\n');
    s
}

fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut items: Vec<(String, Value)> = m.into_iter().collect();
            items.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(items.into_iter().map(|(k, v)| (k, sort_keys(v))).collect::<Map<_, _>>())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", FLOAT_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Rounds every non-integer number to [`FLOAT_DIGITS`] significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json!(round_sig(n.as_f64().expect("f64 number"))),
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// A serializable report as canonical JSON.
pub fn report_value<T: Serialize>(r: &T) -> Value {
    round_floats(serde_json::to_value(r).expect("reports serialize"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_json(path: &Path) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(serde_json::from_str(&text).map_err(ParseError::from)?)
}

/// Writes the canonical form and returns its sha256.
pub fn write_json(path: &Path, v: &Value) -> Result<String, Error> {
    let text = canonical_string(v);
    std::fs::write(path, &text).map_err(|e| io_error(path, e))?;
    Ok(sha256_hex(text.as_bytes()))
}

pub fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, Error> {
    v.get(key).ok_or_else(|| schema(format!("missing field {key:?}")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize, Error> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| schema(format!("{what} must be a nonnegative integer")))
}

fn usize_list(v: &Value, what: &str) -> Result<Vec<usize>, Error> {
    v.as_array()
        .ok_or_else(|| schema(format!("{what} must be a list")))?
        .iter()
        .map(|x| as_usize(x, what))
        .collect()
}

fn usize_table(v: &Value, what: &str) -> Result<Vec<Vec<usize>>, Error> {
    v.as_array()
        .ok_or_else(|| schema(format!("{what} must be a list of lists")))?
        .iter()
        .map(|row| usize_list(row, what))
        .collect()
}

fn i64_list(v: &Value, what: &str) -> Result<Vec<i64>, Error> {
    v.as_array()
        .ok_or_else(|| schema(format!("{what} must be a list")))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| schema(format!("{what} must hold integers"))))
        .collect()
}

fn rational(v: &Value, what: &str) -> Result<Q, Error> {
    match v {
        Value::String(s) => Ok(parse_q(s)?),
        Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().expect("i64").into())),
        _ => Err(schema(format!("{what} must be a \"p/q\" string or an integer"))),
    }
}

fn real(v: &Value, what: &str) -> Result<f64, Error> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| schema(format!("{what} is not a number"))),
        Value::String(_) => Ok(to_f64(&rational(v, what)?)),
        _ => Err(schema(format!("{what} must be a number or a \"p/q\" string"))),
    }
}

// ---------- symbolic systems ----------

fn split_image(alphabet: &[String], s: &str) -> Result<Word, Error> {
    let letter = |name: &str| {
        alphabet
            .iter()
            .position(|a| a == name)
            .map(|i| i as u8)
            .ok_or_else(|| schema(format!("unknown letter {name:?}")))
    };
    if alphabet.iter().all(|a| a.chars().count() == 1) && !s.contains(' ') {
        s.chars().map(|c| letter(&c.to_string())).collect()
    } else {
        s.split_whitespace().map(letter).collect()
    }
}

fn join_word(alphabet: &[String], w: &[u8]) -> String {
    let sep = if alphabet.iter().all(|a| a.chars().count() == 1) { "" } else { " " };
    w.iter().map(|&c| alphabet[c as usize].as_str()).collect::<Vec<_>>().join(sep)
}

/// `{"kind":"odometer","base":[2]}` or `{"kind":"subshift","alphabet":[…],
/// "substitution":{…}}` (or `"forbidden":[…]`), each with an optional
/// `"depth_limit"`; odometers also take a `"preperiod"`.
pub fn system_from_json(v: &Value) -> Result<Arc<SymbolicSystem>, Error> {
    let depth = |default: usize| -> Result<usize, Error> {
        v.get("depth_limit").map(|d| as_usize(d, "depth_limit")).unwrap_or(Ok(default))
    };
    let u32s = |x: &Value| -> Result<Vec<u32>, Error> { Ok(usize_list(x, "base")?.into_iter().map(|b| b as u32).collect()) };
    match field(v, "kind")?.as_str() {
        Some("odometer") => {
            let period = u32s(field(v, "base")?)?;
            let pre = v.get("preperiod").map(u32s).transpose()?.unwrap_or_default();
            Ok(SymbolicSystem::odometer_with(pre, period, depth(DEFAULT_ODOMETER_DEPTH)?)?)
        }
        Some("subshift") => {
            let alphabet: Vec<String> = field(v, "alphabet")?
                .as_array()
                .ok_or_else(|| schema("alphabet must be a list"))?
                .iter()
                .map(|a| a.as_str().map(str::to_string).ok_or_else(|| schema("letters must be strings")))
                .collect::<Result<_, _>>()?;
            let limit = depth(DEFAULT_SUBSHIFT_DEPTH)?;
            if let Some(sub) = v.get("substitution") {
                let sub = sub.as_object().ok_or_else(|| schema("substitution must map letters to words"))?;
                let images = alphabet
                    .iter()
                    .map(|a| {
                        let img = sub.get(a).and_then(Value::as_str).ok_or_else(|| schema(format!("no image for {a:?}")))?;
                        split_image(&alphabet, img)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(SymbolicSystem::substitution(alphabet, images, limit)?)
            } else {
                let words = field(v, "forbidden")?
                    .as_array()
                    .ok_or_else(|| schema("forbidden must be a list of words"))?
                    .iter()
                    .map(|w| split_image(&alphabet, w.as_str().ok_or_else(|| schema("words must be strings"))?))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(SymbolicSystem::forbidden(alphabet, words, limit)?)
            }
        }
        _ => Err(schema("kind must be \"odometer\" or \"subshift\"")),
    }
}

pub fn system_to_json(sys: &SymbolicSystem) -> Value {
    match sys.kind() {
        SystemKind::Odometer { preperiod, period } => {
            let mut v = json!({"kind": "odometer", "base": period, "depth_limit": sys.depth_limit()});
            if !preperiod.is_empty() {
                v["preperiod"] = json!(preperiod);
            }
            v
        }
        SystemKind::Subshift { alphabet, rules } => {
            let mut v = json!({"kind": "subshift", "alphabet": alphabet, "depth_limit": sys.depth_limit()});
            match rules {
                SubshiftRules::Substitution(images) => {
                    let m: Map<String, Value> =
                        alphabet.iter().zip(images).map(|(a, w)| (a.clone(), json!(join_word(alphabet, w)))).collect();
                    v["substitution"] = Value::Object(m);
                }
                SubshiftRules::Forbidden(words) => {
                    v["forbidden"] = json!(words.iter().map(|w| join_word(alphabet, w)).collect::<Vec<_>>());
                }
            }
            v
        }
    }
}

// ---------- actions and groupoids ----------

fn group_from_json(v: &Value) -> Result<FiniteGroup, Error> {
    if let Some(n) = v.get("cyclic") {
        let n = as_usize(n, "cyclic")?;
        if n == 0 {
            return Err(schema("cyclic order must be positive"));
        }
        return Ok(FiniteGroup::cyclic(n));
    }
    if let Some(t) = v.get("table") {
        return Ok(FiniteGroup::from_table(usize_table(t, "group table")?)?);
    }
    if let Some(p) = v.get("permutations") {
        let max = v.get("max_order").map(|m| as_usize(m, "max_order")).transpose()?.unwrap_or(1 << 16);
        return Ok(FiniteGroup::from_permutations(&usize_table(p, "permutations")?, max)?);
    }
    Err(schema("group must be {\"cyclic\":n}, {\"table\":…} or {\"permutations\":…}"))
}

fn group_to_json(g: &FiniteGroup) -> Value {
    match g.is_cyclic_model() {
        Some(n) => json!({"cyclic": n}),
        None => {
            let n = g.order();
            json!({"table": (0..n).map(|a| (0..n).map(|b| g.mul(a, b)).collect::<Vec<_>>()).collect::<Vec<_>>()})
        }
    }
}

/// `{"rotation": n}`, `{"regular": group}` or `{"group": …, "points": n,
/// "table": [[g·x]]}`.
pub fn action_from_json(v: &Value) -> Result<FiniteAction, Error> {
    if let Some(n) = v.get("rotation") {
        let n = as_usize(n, "rotation")?;
        if n == 0 {
            return Err(schema("rotation order must be positive"));
        }
        return Ok(FiniteAction::rotation(n));
    }
    if let Some(g) = v.get("regular") {
        return Ok(FiniteAction::left_regular(group_from_json(g)?));
    }
    let group = group_from_json(field(v, "group")?)?;
    let points = as_usize(field(v, "points")?, "points")?;
    Ok(FiniteAction::new(group, points, usize_table(field(v, "table")?, "action table")?)?)
}

pub fn action_to_json(a: &FiniteAction) -> Value {
    let n = a.group().order();
    json!({
        "group": group_to_json(a.group()),
        "points": a.points(),
        "table": (0..n).map(|g| (0..a.points()).map(|x| a.act(g, x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

/// `{"pair": n}`, `{"action": …}`, `{"disjoint_pairs": [sizes]}` or the
/// explicit form `{"units":[unit arrow per unit], "arrows":[{"id","s","r"}],
/// "compose":[[g,h,gh]]}`.
pub fn groupoid_from_json(v: &Value) -> Result<FiniteGroupoid, Error> {
    if let Some(n) = v.get("pair") {
        return Ok(FiniteGroupoid::pair(as_usize(n, "pair")?));
    }
    if let Some(a) = v.get("action") {
        return Ok(FiniteGroupoid::transformation(action_from_json(a)?));
    }
    if let Some(s) = v.get("disjoint_pairs") {
        return Ok(FiniteGroupoid::disjoint_pairs(&usize_list(s, "disjoint_pairs")?));
    }
    let units = usize_list(field(v, "units")?, "units")?;
    let arrows = field(v, "arrows")?.as_array().ok_or_else(|| schema("arrows must be a list"))?;
    let mut source = vec![usize::MAX; arrows.len()];
    let mut range = vec![usize::MAX; arrows.len()];
    for a in arrows {
        let id = as_usize(field(a, "id")?, "arrow id")?;
        if id >= arrows.len() || source[id] != usize::MAX {
            return Err(schema(format!("arrow ids must be 0..{} without repeats", arrows.len())));
        }
        source[id] = as_usize(field(a, "s")?, "s")?;
        range[id] = as_usize(field(a, "r")?, "r")?;
    }
    let compose = usize_table(v.get("compose").unwrap_or(&json!([])), "compose")?
        .into_iter()
        .map(|t| match t[..] {
            [g, h, gh] => Ok((g, h, gh)),
            _ => Err(schema("compose entries are [g, h, gh]")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FiniteGroupoid::explicit(units.len(), units, source, range, compose)?)
}

/// `{"K": [arrows], "colors": [[units]]}`, optionally with the declared
/// `"generated"` subgroupoids as `{"classes": …}` or `{"arrows": …}`.
pub fn groupoid_witness_from_json(g: &FiniteGroupoid, v: &Value) -> Result<GroupoidDadWitness, Error> {
    let k = usize_list(field(v, "K")?, "K")?;
    let colors: Vec<BTreeSet<usize>> =
        usize_table(field(v, "colors")?, "colors")?.into_iter().map(|c| c.into_iter().collect()).collect();
    let mut w = GroupoidDadWitness::from_colors(g, k, colors);
    if let Some(gen) = v.get("generated") {
        let list = gen.as_array().ok_or_else(|| schema("generated must be a list"))?;
        if list.len() != w.colors.len() {
            return Err(schema("one generated subgroupoid per color"));
        }
        w.generated = list.iter().map(subgroupoid_from_json).collect::<Result<_, _>>()?;
    }
    Ok(w)
}

fn subgroupoid_from_json(v: &Value) -> Result<Subgroupoid, Error> {
    if let Some(c) = v.get("classes") {
        return Ok(Subgroupoid::Classes(usize_table(c, "classes")?));
    }
    Ok(Subgroupoid::Arrows(usize_list(field(v, "arrows")?, "arrows")?.into_iter().collect()))
}

fn subgroupoid_to_json(s: &Subgroupoid) -> Value {
    match s {
        Subgroupoid::Classes(c) => json!({"classes": c}),
        Subgroupoid::Arrows(a) => json!({"arrows": a}),
    }
}

pub fn groupoid_witness_to_json(w: &GroupoidDadWitness) -> Value {
    json!({
        "K": w.k,
        "colors": w.colors,
        "generated": w.generated.iter().map(subgroupoid_to_json).collect::<Vec<_>>(),
    })
}

// ---------- metric spaces ----------

/// `{"grid":{"dims":[…]}}` or `{"grid":{"lo":[…],"hi":[…]}}`,
/// `{"interval":[a,b]}`, `{"path":n}`, `{"edges":{"n":…,"list":[[i,j,w]]}}`,
/// `{"table":[[…]]}` or `{"group_ball":{"generators":{"integer"|"permutation":…},"radius":r}}`.
pub fn space_from_json(v: &Value) -> Result<FiniteMetricSpace, Error> {
    if let Some(g) = v.get("grid") {
        let (lo, hi) = if let Some(d) = g.get("dims") {
            let dims = usize_list(d, "dims")?;
            if dims.contains(&0) {
                return Err(schema("grid dimensions must be positive"));
            }
            (vec![0; dims.len()], dims.iter().map(|&n| n as i64 - 1).collect())
        } else {
            (i64_list(field(g, "lo")?, "lo")?, i64_list(field(g, "hi")?, "hi")?)
        };
        return Ok(FiniteMetricSpace::grid(lo, hi)?);
    }
    if let Some(i) = v.get("interval") {
        let ab = i64_list(i, "interval")?;
        let [a, b] = ab[..] else { return Err(schema("interval is [a, b]")) };
        return Ok(FiniteMetricSpace::interval(a, b)?);
    }
    if let Some(n) = v.get("path") {
        return Ok(FiniteMetricSpace::path(as_usize(n, "path")?));
    }
    if let Some(e) = v.get("edges") {
        let n = as_usize(field(e, "n")?, "n")?;
        let list = usize_table(field(e, "list")?, "edge list")?
            .into_iter()
            .map(|t| match t[..] {
                [i, j, w] => Ok((i, j, w as u64)),
                [i, j] => Ok((i, j, 1)),
                _ => Err(schema("edges are [i, j] or [i, j, w]")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(FiniteMetricSpace::from_edges(n, &list)?);
    }
    if let Some(t) = v.get("table") {
        let rows = usize_table(t, "distance table")?;
        return Ok(FiniteMetricSpace::from_table(rows.into_iter().map(|r| r.into_iter().map(|d| d as u64).collect()).collect())?);
    }
    if let Some(b) = v.get("group_ball") {
        let gens = field(b, "generators")?;
        let gens = if let Some(i) = gens.get("integer") {
            let rows = i.as_array().ok_or_else(|| schema("integer generators are vectors"))?;
            GroupGenerators::Integer(rows.iter().map(|r| i64_list(r, "generator")).collect::<Result<_, _>>()?)
        } else {
            GroupGenerators::Permutation(usize_table(field(gens, "permutation")?, "permutation")?)
        };
        let radius = as_usize(field(b, "radius")?, "radius")? as u64;
        return Ok(FiniteMetricSpace::group_ball(&gens, radius)?);
    }
    Err(schema("unknown space description"))
}

pub fn asdim_witness_from_json(v: &Value) -> Result<AsdimWitness, Error> {
    Ok(serde_json::from_value(v.clone()).map_err(ParseError::from)?)
}

pub fn asdim_witness_to_json(w: &AsdimWitness) -> Value {
    serde_json::to_value(w).expect("witness serializes")
}

// ---------- complexes, maps, covers ----------

pub fn complex_from_json(v: &Value) -> Result<SimplicialComplex, Error> {
    let vertices = usize_list(field(v, "vertices")?, "vertices")?.into_iter().collect();
    let faces = usize_table(field(v, "maximal_faces")?, "maximal_faces")?
        .into_iter()
        .map(|f| f.into_iter().collect())
        .collect();
    Ok(SimplicialComplex::new(vertices, faces)?)
}

pub fn complex_to_json(c: &SimplicialComplex) -> Value {
    json!({"vertices": c.vertices(), "maximal_faces": c.maximal_faces()})
}

fn point_to_json(mu: &SimplicialPoint) -> Value {
    json!(mu.weights().iter().map(|(v, w)| json!([v, format_q(w)])).collect::<Vec<_>>())
}

/// `[[point, [[vertex, "p/q"], …]], …]` listing points `0..n` in order.
pub fn map_from_json(v: &Value) -> Result<Vec<SimplicialPoint>, Error> {
    let rows = v.as_array().ok_or_else(|| schema("map must be a list of [point, weights]"))?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let pair = row.as_array().filter(|p| p.len() == 2).ok_or_else(|| schema("map rows are [point, weights]"))?;
        if as_usize(&pair[0], "point")? != i {
            return Err(schema(format!("map rows must list points 0.. in order; row {i}")));
        }
        let weights = pair[1]
            .as_array()
            .ok_or_else(|| schema("weights must be a list"))?
            .iter()
            .map(|w| {
                let w = w.as_array().filter(|w| w.len() == 2).ok_or_else(|| schema("weights are [vertex, p/q]"))?;
                Ok((as_usize(&w[0], "vertex")?, rational(&w[1], "weight")?))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        out.push(SimplicialPoint::new(weights)?);
    }
    Ok(out)
}

pub fn map_to_json(f: &[SimplicialPoint]) -> Value {
    json!(f.iter().enumerate().map(|(i, mu)| json!([i, point_to_json(mu)])).collect::<Vec<_>>())
}

/// `{"sets": [[[x, g], …], …]}`: subsets of `X × Γ`.
pub fn cover_from_json(act: &FiniteAction, v: &Value) -> Result<Vec<Vec<bool>>, Error> {
    let model = ProductModel::new(act);
    let sets = field(v, "sets")?.as_array().ok_or_else(|| schema("sets must be a list"))?;
    sets.iter()
        .map(|s| {
            let mut member = vec![false; model.len()];
            for p in usize_table(s, "cover set")? {
                let [x, g] = p[..] else { return Err(schema("cover points are [x, g]")) };
                if x >= act.points() || g >= act.group().order() {
                    return Err(schema(format!("point [{x}, {g}] outside X × Γ")));
                }
                member[model.index(x, g)] = true;
            }
            Ok(member)
        })
        .collect()
}

// ---------- partitions of unity ----------

/// ψ values per color, the tower tops and level sizes.
pub fn pou_to_json(p: &PouPipeline) -> Value {
    let pou = &p.pou;
    let colors: Vec<Value> = (0..pou.colors())
        .map(|i| {
            let t = &p.towers[i];
            json!({
                "support": pou.supports[i],
                "psi": pou.psi[i].iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(x, v)| json!([x, format_q(v)])).collect::<Vec<_>>(),
                "tower_top": t.top(),
                "level_sizes": t.levels.iter().map(BTreeSet::len).collect::<Vec<_>>(),
                "generated_size": t.generated_size.to_string(),
            })
        })
        .collect();
    json!({
        "kind": "pou",
        "depth": pou.depth,
        "units": pou.units,
        "K": p.enlarged.k,
        "enlarged_colors": p.enlarged.colors,
        "colors": colors,
    })
}

/// A partition of unity read back from its certificate, with `K` and the
/// tower tops.
#[derive(Debug, Clone)]
pub struct PouCertificate {
    pub pou: PartitionOfUnity,
    pub k: Vec<usize>,
    pub tower_tops: Vec<BTreeSet<usize>>,
}

pub fn pou_from_json(v: &Value) -> Result<PouCertificate, Error> {
    let depth = as_usize(field(v, "depth")?, "depth")?;
    let units = as_usize(field(v, "units")?, "units")?;
    let k = usize_list(field(v, "K")?, "K")?;
    let colors = field(v, "colors")?.as_array().ok_or_else(|| schema("colors must be a list"))?;
    let mut supports = Vec::new();
    let mut psi = Vec::new();
    let mut tower_tops = Vec::new();
    for c in colors {
        supports.push(usize_list(field(c, "support")?, "support")?.into_iter().collect());
        tower_tops.push(
            c.get("tower_top").map(|t| usize_list(t, "tower_top")).transpose()?.unwrap_or_default().into_iter().collect(),
        );
        let mut row = vec![Q::zero(); units];
        for e in field(c, "psi")?.as_array().ok_or_else(|| schema("psi must be a list"))? {
            let e = e.as_array().filter(|e| e.len() == 2).ok_or_else(|| schema("psi entries are [unit, p/q]"))?;
            let x = as_usize(&e[0], "unit")?;
            if x >= units {
                return Err(schema(format!("unit {x} out of range")));
            }
            row[x] = rational(&e[1], "psi")?;
        }
        psi.push(row);
    }
    let pou = PartitionOfUnity::from_psi(units, supports, psi, depth)?;
    Ok(PouCertificate { pou, k, tower_tops })
}

impl PouCertificate {
    /// Functions as floats and the subgroupoids generated by the tower tops.
    pub fn declared(&self, g: &FiniteGroupoid) -> DeclaredPou {
        let phi = (0..self.pou.colors()).map(|i| (0..self.pou.units).map(|x| self.pou.phi_f64(i, x)).collect()).collect();
        let subgroupoids =
            self.tower_tops.iter().map(|t| generate_subgroupoid(g, &seed(g, &self.k, t))).collect();
        DeclaredPou { phi, subgroupoids }
    }
}

// ---------- convolution elements ----------

/// `[[arrow, re, im], …]` with numbers or `"p/q"` strings.
pub fn element_from_json(v: &Value) -> Result<Vec<(usize, C64)>, Error> {
    v.as_array()
        .ok_or_else(|| schema("element must be a list of [arrow, re, im]"))?
        .iter()
        .map(|e| {
            let e = e.as_array().filter(|e| e.len() == 3).ok_or_else(|| schema("entries are [arrow, re, im]"))?;
            Ok((as_usize(&e[0], "arrow")?, C64::new(real(&e[1], "re")?, real(&e[2], "im")?)))
        })
        .collect()
}

pub fn element_to_json(pairs: &[(usize, C64)]) -> Value {
    round_floats(json!(pairs.iter().map(|(a, c)| json!([a, c.re, c.im])).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_sorts_keys_and_rounds() {
        let v = json!({"b": 1, "a": {"d": 0.1234567890123456, "c": [2.0, 3]}});
        let s = canonical_string(&round_floats(v));
        assert_eq!(s, "{\n  \"a\": {\n    \"c\": [\n      2.0,\n      3\n    ],\n    \"d\": 0.123456789012\n  },\n  \"b\": 1\n}\n");
    }

    #[test]
    fn systems_round_trip() {
        for text in [
            r#"{"kind":"odometer","base":[2]}"#,
            r#"{"kind":"odometer","base":[2,3],"preperiod":[5],"depth_limit":12}"#,
            r#"{"kind":"subshift","alphabet":["a","b"],"substitution":{"a":"ab","b":"a"},"depth_limit":64}"#,
            r#"{"kind":"subshift","alphabet":["x","y"],"forbidden":["yy"]}"#,
        ] {
            let sys = system_from_json(&serde_json::from_str(text).unwrap()).unwrap();
            let back = system_from_json(&system_to_json(&sys)).unwrap();
            assert_eq!(back.kind(), sys.kind());
            assert_eq!(back.depth_limit(), sys.depth_limit());
        }
        assert!(system_from_json(&json!({"kind": "torus"})).is_err());
    }

    #[test]
    fn explicit_groupoid_file() {
        // two points joined by one arrow and its inverse
        let v = json!({
            "units": [0, 1],
            "arrows": [{"id": 0, "s": 0, "r": 0}, {"id": 1, "s": 1, "r": 1}, {"id": 2, "s": 0, "r": 1}, {"id": 3, "s": 1, "r": 0}],
            "compose": [[2, 3, 1], [3, 2, 0]],
        });
        let g = groupoid_from_json(&v).unwrap();
        assert_eq!(g.num_arrows(), 4);
        assert_eq!(g.inverse(2), 3);
        assert!(groupoid_from_json(&json!({"units": [0]})).is_err());
    }

    #[test]
    fn elements_and_maps() {
        let e = element_from_json(&json!([[0, 1, "1/2"], [3, -2.5, 0]])).unwrap();
        assert_eq!(e, vec![(0, C64::new(1.0, 0.5)), (3, C64::new(-2.5, 0.0))]);
        let f = map_from_json(&json!([[0, [[0, "1/3"], [1, "2/3"]]], [1, [[1, 1]]]])).unwrap();
        assert_eq!(map_from_json(&map_to_json(&f)).unwrap(), f);
        assert!(map_from_json(&json!([[1, [[0, 1]]]])).is_err());
    }
}
