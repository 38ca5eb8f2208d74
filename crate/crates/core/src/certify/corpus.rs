//! Bundled regression cases and their golden certificates.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::formats::{
    asdim_witness_to_json, canonical_string, io_error, pou_to_json, report_value, system_from_json,
};
use super::pipeline::{run_pipeline, PipelineParams};
use super::CertifyError;
use crate::action::FiniteAction;
use crate::coarse::{bridge_to_groupoid, construct_grid_witness, verify_asdim_witness, verify_bridge, FiniteMetricSpace};
use crate::cstar::{block_decompose, norm_report, ConvElement, C64};
use crate::error::Error;
use crate::groupoid::FiniteGroupoid;
use crate::pou::{pou_for_action, verify_pou};
use crate::rational::q;
use crate::witness::{construct_minimal_z_witness, verify_dad_witness};

pub const CORPUS_ENV: &str = "DADIM_CORPUS";
/// Relative tolerance for floats in non-exact cases.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// `$DADIM_CORPUS`, else `corpus` in the working directory.
pub fn corpus_dir() -> PathBuf {
    std::env::var_os(CORPUS_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("corpus"))
}

pub struct Case {
    pub name: &'static str,
    /// Byte-for-byte comparison; otherwise floats compare within tolerance.
    pub exact: bool,
    run: fn() -> Result<Value, Error>,
}

impl Case {
    pub fn run(&self) -> Result<Value, Error> {
        (self.run)()
    }
}

fn odometer_case(n: u64) -> Result<Value, Error> {
    let sys = system_from_json(&json!({"kind": "odometer", "base": [2]}))?;
    let c = construct_minimal_z_witness(&sys, n)?;
    let r = verify_dad_witness(&sys, &c.witness, None)?;
    Ok(json!({"witness": c.witness.to_json(), "M": c.m, "report": report_value(&r)}))
}

fn fibonacci() -> Result<Value, Error> {
    let sys = system_from_json(&json!({"kind": "subshift", "alphabet": ["a", "b"], "substitution": {"a": "ab", "b": "a"}, "depth_limit": 128}))?;
    let c = construct_minimal_z_witness(&sys, 1)?;
    let r = verify_dad_witness(&sys, &c.witness, None)?;
    Ok(json!({"witness": c.witness.to_json(), "M": c.m, "report": report_value(&r)}))
}

fn grid_case(x: FiniteMetricSpace, r: u64) -> Result<Value, Error> {
    let w = construct_grid_witness(&x, r)?;
    let rep = verify_asdim_witness(&x, &w)?;
    let (g, gw) = bridge_to_groupoid(&x, &w)?;
    let b = verify_bridge(&x, &w, &g, &gw)?;
    Ok(json!({"witness": asdim_witness_to_json(&w), "report": report_value(&rep), "bridge": report_value(&b)}))
}

fn rotation_model() -> Result<Value, Error> {
    let arc = |s: usize| (s..s + 6).collect::<BTreeSet<usize>>();
    let a = pou_for_action(&FiniteAction::rotation(12), &[1], &[arc(0), arc(6)], 16, None)?;
    let r = verify_pou(&a.groupoid, &a.k, &a.pipeline.pou, &q(1, 1))?;
    Ok(json!({"pou": pou_to_json(&a.pipeline), "report": report_value(&r)}))
}

fn pair_norms() -> Result<Value, Error> {
    let mut rows = Vec::new();
    for n in 1..=6usize {
        let g = FiniteGroupoid::pair(n);
        let ones = ConvElement::from_pairs(&g, (0..n * n).map(|a| (a, C64::new(1.0, 0.0))))?;
        // a fixed non-normal element: upper-triangular ramp
        let ramp = ConvElement::from_pairs(
            &g,
            (0..n).flat_map(|r| (r..n).map(move |s| (r, s))).map(|(r, s)| (r * n + s, C64::new((r + 1) as f64, s as f64))),
        )?;
        rows.push(json!({
            "n": n,
            "ones": report_value(&norm_report(&ones)),
            "ramp": report_value(&norm_report(&ramp)),
            "blocks": block_decompose(&g)?.structure(),
        }));
    }
    Ok(json!(rows))
}

fn pipeline_case() -> Result<Value, Error> {
    let run = run_pipeline(&json!({"kind": "odometer", "base": [2]}), &PipelineParams::default())
        .map_err(|e| Error::Certify(Box::new(e)))?;
    Ok(json!({"artifacts": run.artifacts, "green": run.chain.green}))
}

pub fn cases() -> Vec<Case> {
    vec![
        Case { name: "odometer-n1", exact: true, run: || odometer_case(1) },
        Case { name: "odometer-n2", exact: true, run: || odometer_case(2) },
        Case { name: "odometer-n3", exact: true, run: || odometer_case(3) },
        Case { name: "fibonacci-n1", exact: true, run: fibonacci },
        Case { name: "interval-r10", exact: true, run: || grid_case(FiniteMetricSpace::interval(0, 399)?, 10) },
        Case { name: "brick-r5", exact: true, run: || grid_case(FiniteMetricSpace::grid(vec![0, 0], vec![39, 39])?, 5) },
        Case { name: "rotation12-pou", exact: true, run: rotation_model },
        Case { name: "pair-norms", exact: false, run: pair_norms },
        Case { name: "pipeline-odometer", exact: false, run: pipeline_case },
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub exact: bool,
    pub ok: bool,
    pub diffs: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusSummary {
    pub dir: String,
    pub cases: Vec<CaseResult>,
}

impl CorpusSummary {
    pub fn green(&self) -> bool {
        self.cases.iter().all(|c| c.ok)
    }
}

fn check_dir(dir: &Path) -> Result<(), CertifyError> {
    if !dir.is_dir() {
        return Err(CertifyError::Config(format!("corpus directory {} does not exist", dir.display())));
    }
    Ok(())
}

fn run_all() -> Vec<(&'static str, bool, Result<Value, Error>)> {
    let cases = cases();
    std::thread::scope(|s| {
        let handles: Vec<_> = cases.iter().map(|c| s.spawn(move || (c.name, c.exact, c.run()))).collect();
        handles.into_iter().map(|h| h.join().expect("corpus case panicked")).collect()
    })
}

/// Runs every case and compares with `<dir>/<name>.json`.
pub fn corpus_check(dir: &Path) -> Result<CorpusSummary, CertifyError> {
    check_dir(dir)?;
    let mut out = Vec::new();
    for (name, exact, result) in run_all() {
        let mut diffs = Vec::new();
        match result {
            Err(e) => diffs.push(format!("case failed: {e}")),
            Ok(fresh) => {
                let path = dir.join(format!("{name}.json"));
                match std::fs::read_to_string(&path) {
                    Err(_) => diffs.push(format!("missing golden file {}", path.display())),
                    Ok(golden) if exact => {
                        if golden != canonical_string(&fresh) {
                            diffs.push(first_line_diff(&golden, &canonical_string(&fresh)));
                        }
                    }
                    Ok(golden) => match serde_json::from_str::<Value>(&golden) {
                        Ok(g) => compare_values(&g, &fresh, "$", &mut diffs),
                        Err(e) => diffs.push(format!("golden is not json: {e}")),
                    },
                }
            }
        }
        out.push(CaseResult { name: name.to_string(), exact, ok: diffs.is_empty(), diffs });
    }
    Ok(CorpusSummary { dir: dir.display().to_string(), cases: out })
}

/// Regenerates every golden file.
pub fn corpus_bless(dir: &Path) -> Result<Vec<String>, CertifyError> {
    check_dir(dir)?;
    let mut fresh = Vec::new();
    for (name, _, result) in run_all() {
        fresh.push((name, result.map_err(|e| CertifyError::Config(format!("case {name} failed: {e}")))?));
    }
    let mut written = Vec::new();
    for (name, v) in fresh {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, canonical_string(&v)).map_err(|e| CertifyError::Io(io_error(&path, e)))?;
        written.push(name.to_string());
    }
    Ok(written)
}

fn first_line_diff(golden: &str, fresh: &str) -> String {
    for (i, (a, b)) in golden.lines().zip(fresh.lines()).enumerate() {
        if a != b {
            return format!("line {}: golden {:?}, fresh {:?}", i + 1, a.trim(), b.trim());
        }
    }
    format!("lengths differ: golden {} lines, fresh {} lines", golden.lines().count(), fresh.lines().count())
}

/// Structural comparison; floats within [`FLOAT_TOLERANCE`] relative.
pub fn compare_values(golden: &Value, fresh: &Value, path: &str, diffs: &mut Vec<String>) {
    match (golden, fresh) {
        (Value::Object(a), Value::Object(b)) => {
            let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
            for k in keys {
                match (a.get(k), b.get(k)) {
                    (Some(x), Some(y)) => compare_values(x, y, &format!("{path}.{k}"), diffs),
                    _ => diffs.push(format!("{path}.{k}: present on one side only")),
                }
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                diffs.push(format!("{path}: length {} vs {}", a.len(), b.len()));
                return;
            }
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                compare_values(x, y, &format!("{path}[{i}]"), diffs);
            }
        }
        (Value::Number(x), Value::Number(y)) if x.is_f64() || y.is_f64() => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            if (x - y).abs() > FLOAT_TOLERANCE * x.abs().max(y.abs()).max(1e-3) {
                diffs.push(format!("{path}: {x} vs {y}"));
            }
        }
        (a, b) if a != b => diffs.push(format!("{path}: {a} vs {b}")),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerant_comparison() {
        let mut d = Vec::new();
        compare_values(&json!({"a": [1.0, 2], "b": "x"}), &json!({"a": [1.0 + 1e-12, 2], "b": "x"}), "$", &mut d);
        assert!(d.is_empty());
        compare_values(&json!({"a": [1.0]}), &json!({"a": [1.1], "c": 0}), "$", &mut d);
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn missing_directory_is_a_configuration_error() {
        let err = corpus_check(Path::new("/nonexistent/corpus")).unwrap_err();
        assert!(matches!(err, CertifyError::Config(_)));
    }
}
