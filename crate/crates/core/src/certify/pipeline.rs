//! The certificate chain from a ℤ-system down to a cut-down decomposition.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use super::formats::{
    canonical_string, groupoid_witness_from_json, groupoid_witness_to_json, io_error, pou_from_json, pou_to_json,
    read_json, report_value, sha256_hex, system_from_json, system_to_json,
};
use super::CertifyError;
use crate::action::FiniteAction;
use crate::cstar::{decompose_via_pou, ConvElement, DecompositionReport, DeclaredPou, C64};
use crate::error::Error;
use crate::groupoid::verify::action_generators;
use crate::groupoid::{verify_groupoid_dad_per_color, FiniteGroupoid, GroupoidDadWitness};
use crate::pou::{depth_bound, pou_pipeline, power_set, verify_pou, PouReport};
use crate::rational::{format_q, parse_q, Q};
use crate::symbolic::SymbolicSystem;
use crate::witness::{construct_minimal_z_witness, verify_dad_witness, DadWitness};

pub const STAGE_KINDS: [&str; 5] = ["system", "witness", "groupoid-witness", "pou", "decomposition"];

#[derive(Debug, Clone)]
pub struct PipelineParams {
    /// Generators `E = {−N..N}`.
    pub n: u64,
    /// The odometer is cut down to `ℤ/modulus(quotient_depth)`.
    pub quotient_depth: usize,
    /// Telescoping depth of the partition of unity.
    pub pou_depth: usize,
    pub epsilon: Q,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams { n: 1, quotient_depth: 6, pou_depth: 16, epsilon: parse_q("1/2").expect("literal") }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub index: usize,
    pub kind: String,
    pub file: String,
    pub sha256: String,
    /// Hash of the previous stage's output.
    pub input_sha256: Option<String>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateChain {
    pub stages: Vec<StageRecord>,
    pub green: bool,
    /// Seconds since the Unix epoch when the chain was produced.
    pub created_unix: u64,
}

impl CertificateChain {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("chain serializes")
    }
}

/// Every artifact of a pipeline run, in stage order.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub chain: CertificateChain,
    pub artifacts: Vec<Value>,
    pub decomposition: DecompositionReport,
    pub pou_report: PouReport,
}

impl PipelineRun {
    /// Writes `<index>-<kind>.json` for each stage and `chain.json`.
    pub fn write(&self, dir: &Path) -> Result<(), Error> {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        for (rec, v) in self.chain.stages.iter().zip(&self.artifacts) {
            let path = dir.join(&rec.file);
            std::fs::write(&path, canonical_string(v)).map_err(|e| io_error(&path, e))?;
        }
        let path = dir.join("chain.json");
        std::fs::write(&path, canonical_string(&self.chain.to_json())).map_err(|e| io_error(&path, e))
    }
}

fn stage_err(stage: usize) -> impl Fn(Error) -> CertifyError {
    move |e| CertifyError::Stage { stage, kind: STAGE_KINDS[stage], source: Box::new(e) }
}

fn lift<E: Into<Error>>(stage: usize) -> impl Fn(E) -> CertifyError {
    move |e| stage_err(stage)(e.into())
}

fn generators(n: u64) -> Vec<i64> {
    (-(n as i64)..=n as i64).collect()
}

fn rotation_k(g: &FiniteGroupoid, act: &FiniteAction, e: &[i64]) -> Vec<usize> {
    let parts: Vec<usize> = e.iter().map(|&k| act.group().from_integer(k)).collect();
    action_generators(g, &parts)
}

/// Per-color bound `|F_i| · |X|`: the generated subgroupoid of color `i`
/// only uses group elements from `F_i`.
fn quotient_bounds(w: &DadWitness, points: usize) -> Vec<Option<u128>> {
    w.finite_sets.iter().map(|f| Some(f.len() as u128 * points as u128)).collect()
}

struct Quotient {
    act: FiniteAction,
    g: FiniteGroupoid,
    k: Vec<usize>,
    witness: GroupoidDadWitness,
}

fn quotient(sys: &Arc<SymbolicSystem>, w: &DadWitness, depth: usize, n: u64) -> Result<Quotient, Error> {
    let m = sys.modulus(depth)?;
    if m > 1 << 16 {
        return Err(crate::symbolic::SymbolicError::InvalidSystem(format!("quotient of order {m} is too large")).into());
    }
    let act = FiniteAction::rotation(m as usize);
    let g = FiniteGroupoid::transformation(act.clone());
    let mut colors = Vec::new();
    for c in &w.colors {
        colors.push(c.residues(depth)?.into_iter().map(|r| r as usize).collect::<BTreeSet<usize>>());
    }
    let k = rotation_k(&g, &act, &generators(n));
    let k3 = power_set(&g, &k, 3);
    let witness = GroupoidDadWitness::from_colors(&g, k3, colors);
    Ok(Quotient { act, g, k, witness })
}

/// Runs every stage in order. The witness is built for `E³ = {−3N..3N}` so
/// that it serves the enlargement step for `K = {−N..N}`.
pub fn run_pipeline(system: &Value, params: &PipelineParams) -> Result<PipelineRun, CertifyError> {
    let sys = system_from_json(system).map_err(stage_err(0))?;
    let sys_json = system_to_json(&sys);

    // stage 1
    let cons = construct_minimal_z_witness(&sys, 3 * params.n).map_err(lift(1))?;
    let report = verify_dad_witness(&sys, &cons.witness, None).map_err(lift(1))?;
    report.status().map_err(lift(1))?;
    let mut wit_json = cons.witness.to_json();
    wit_json["N"] = json!(cons.n);
    wit_json["M"] = json!(cons.m);
    wit_json["blowup_bound"] = json!(report.blowup_bound);

    // stage 2
    let qt = quotient(&sys, &cons.witness, params.quotient_depth, params.n).map_err(stage_err(2))?;
    let bounds = quotient_bounds(&cons.witness, qt.g.num_points());
    let greport = verify_groupoid_dad_per_color(&qt.g, &qt.witness, &bounds).map_err(lift(2))?;
    greport.status().map_err(lift(2))?;
    let gw_json = json!({
        "groupoid": {"action": {"rotation": qt.act.points()}},
        "quotient_depth": params.quotient_depth,
        "E": generators(params.n),
        "base_K": qt.k,
        "witness": groupoid_witness_to_json(&qt.witness),
        "size_bounds": bounds.iter().map(|b| b.map(|x| x.to_string())).collect::<Vec<_>>(),
        "report": report_value(&greport),
    });

    // stage 3
    let colors = qt.witness.colors.clone();
    let pipe = pou_pipeline(&qt.g, &qt.k, &colors, params.pou_depth, None).map_err(lift(3))?;
    let preport = verify_pou(&qt.g, &qt.k, &pipe.pou, &params.epsilon).map_err(lift(3))?;
    preport.status().map_err(lift(3))?;
    let mut pou_json = pou_to_json(&pipe);
    pou_json["epsilon"] = json!(format_q(&params.epsilon));
    pou_json["report"] = report_value(&preport);

    // stage 4
    let declared = DeclaredPou::from_pipeline(&qt.g, &pipe);
    let f = ConvElement::from_pairs(&qt.g, qt.k.iter().map(|&a| (a, C64::new(1.0, 0.0)))).map_err(lift(4))?;
    let dec = decompose_via_pou(&f, &declared).map_err(lift(4))?;
    let osc_bound = depth_bound(colors.len() - 1, params.pou_depth).to_f64();
    let dec_ok = dec.accepted()
        && dec.commutator_bound <= dec.bisection_bound * (1.0 + crate::cstar::NORM_TOLERANCE)
        && preport.within_depth_bound;
    let dec_json = json!({
        "element": "sum of the arrows of K",
        "oscillation_bound": osc_bound,
        "report": report_value(&dec),
        "accepted": dec_ok,
    });

    let artifacts = vec![sys_json, wit_json, gw_json, pou_json, dec_json];
    let verified = [true, true, true, preport.accepted(), dec_ok];
    let chain = build_chain(&artifacts, &verified);
    Ok(PipelineRun { chain, artifacts, decomposition: dec, pou_report: preport })
}

fn build_chain(artifacts: &[Value], verified: &[bool]) -> CertificateChain {
    let mut stages = Vec::new();
    let mut prev: Option<String> = None;
    for (i, v) in artifacts.iter().enumerate() {
        let sha = sha256_hex(canonical_string(v).as_bytes());
        stages.push(StageRecord {
            index: i,
            kind: STAGE_KINDS[i].to_string(),
            file: format!("{i}-{}.json", STAGE_KINDS[i]),
            sha256: sha.clone(),
            input_sha256: prev.replace(sha),
            verified: verified[i],
        });
    }
    let created_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let green = stages.iter().all(|s| s.verified);
    CertificateChain { stages, green, created_unix }
}

/// Re-reads a chain written by [`PipelineRun::write`]: hashes, links, then
/// an independent re-verification of every certificate.
pub fn verify_chain(dir: &Path) -> Result<CertificateChain, CertifyError> {
    let chain_v = read_json(&dir.join("chain.json")).map_err(CertifyError::Io)?;
    let records: Vec<StageRecord> = chain_v
        .get("stages")
        .and_then(Value::as_array)
        .ok_or_else(|| CertifyError::Config("chain.json has no stages".into()))?
        .iter()
        .map(|s| {
            let str_of = |k: &str| s.get(k).and_then(Value::as_str).map(str::to_string);
            Some(StageRecord {
                index: s.get("index")?.as_u64()? as usize,
                kind: str_of("kind")?,
                file: str_of("file")?,
                sha256: str_of("sha256")?,
                input_sha256: str_of("input_sha256"),
                verified: s.get("verified")?.as_bool()?,
            })
        })
        .collect::<Option<_>>()
        .ok_or_else(|| CertifyError::Config("malformed stage record".into()))?;
    if records.len() != STAGE_KINDS.len() {
        return Err(CertifyError::Config(format!("expected {} stages", STAGE_KINDS.len())));
    }
    let mut values = Vec::new();
    let mut prev: Option<&str> = None;
    for (i, r) in records.iter().enumerate() {
        let path = dir.join(&r.file);
        let bytes = std::fs::read(&path).map_err(|e| CertifyError::Io(io_error(&path, e)))?;
        let found = sha256_hex(&bytes);
        if found != r.sha256 {
            return Err(CertifyError::HashMismatch { stage: i, file: r.file.clone(), expected: r.sha256.clone(), found });
        }
        if r.input_sha256.as_deref() != prev {
            return Err(CertifyError::BrokenLink { stage: i });
        }
        prev = Some(&r.sha256);
        let text = String::from_utf8_lossy(&bytes);
        values.push(serde_json::from_str::<Value>(&text).map_err(|e| stage_err(i)(crate::error::ParseError::from(e).into()))?);
    }
    let verified = reverify(&values)?;
    let mut chain = build_chain(&values, &verified);
    chain.created_unix = chain_v.get("created_unix").and_then(Value::as_u64).unwrap_or(0);
    Ok(chain)
}

fn reverify(values: &[Value]) -> Result<Vec<bool>, CertifyError> {
    let sys = system_from_json(&values[0]).map_err(stage_err(0))?;
    let w = DadWitness::from_json(&sys, &values[1]).map_err(lift(1))?;
    verify_dad_witness(&sys, &w, None).map_err(lift(1))?.status().map_err(lift(1))?;

    let gv = &values[2];
    let m = gv["groupoid"]["action"]["rotation"].as_u64().ok_or_else(|| CertifyError::Config("groupoid stage".into()))?;
    let depth = gv["quotient_depth"].as_u64().unwrap_or(0) as usize;
    let n = gv["E"].as_array().map_or(0, |e| e.len() as u64 / 2);
    let qt = quotient(&sys, &w, depth, n).map_err(stage_err(2))?;
    if qt.act.points() as u64 != m {
        return Err(stage_err(2)(Error::Io { path: "groupoid".into(), message: "quotient order mismatch".into() }));
    }
    let declared = groupoid_witness_from_json(&qt.g, &gv["witness"]).map_err(stage_err(2))?;
    if declared.colors != qt.witness.colors || declared.k != qt.witness.k {
        return Err(CertifyError::Stage {
            stage: 2,
            kind: STAGE_KINDS[2],
            source: Box::new(crate::groupoid::GroupoidError::GeneratedMismatch(0).into()),
        });
    }
    let bounds = quotient_bounds(&w, qt.g.num_points());
    verify_groupoid_dad_per_color(&qt.g, &declared, &bounds).map_err(lift(2))?.status().map_err(lift(2))?;

    let cert = pou_from_json(&values[3]).map_err(stage_err(3))?;
    let eps = values[3]["epsilon"].as_str().map(parse_q).transpose().map_err(lift(3))?.unwrap_or_else(|| PipelineParams::default().epsilon);
    let preport = verify_pou(&qt.g, &cert.k, &cert.pou, &eps).map_err(lift(3))?;
    preport.status().map_err(lift(3))?;

    let f = ConvElement::from_pairs(&qt.g, qt.k.iter().map(|&a| (a, C64::new(1.0, 0.0)))).map_err(lift(4))?;
    let dec = decompose_via_pou(&f, &cert.declared(&qt.g)).map_err(lift(4))?;
    let recorded = values[4]["accepted"].as_bool().unwrap_or(false);
    Ok(vec![true, true, true, preport.accepted(), dec.accepted() && recorded && preport.within_depth_bound])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameters() {
        let p = PipelineParams::default();
        assert_eq!((p.n, p.quotient_depth, p.pou_depth), (1, 6, 16));
        assert_eq!(generators(2), vec![-2, -1, 0, 1, 2]);
    }
}
