use std::path::PathBuf;

use dadim_core::certify::{corpus_check, run_pipeline, verify_chain, CertifyError, PipelineParams};
use serde_json::json;

fn corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn odometer_pipeline_is_green_and_reverifies() {
    let run = run_pipeline(&json!({"kind": "odometer", "base": [2]}), &PipelineParams::default()).unwrap();
    assert!(run.chain.green);
    assert_eq!(run.chain.stages.len(), 5);
    for w in run.chain.stages.windows(2) {
        assert_eq!(w[1].input_sha256.as_deref(), Some(w[0].sha256.as_str()));
    }
    let dir = tempfile::tempdir().unwrap();
    run.write(dir.path()).unwrap();
    verify_chain(dir.path()).unwrap();
}

#[test]
fn tampered_artifact_is_a_hash_mismatch() {
    let run = run_pipeline(&json!({"kind": "odometer", "base": [2]}), &PipelineParams::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run.write(dir.path()).unwrap();
    let file = dir.path().join("3-pou.json");
    let mut text = std::fs::read_to_string(&file).unwrap();
    text.push(' ');
    std::fs::write(&file, text).unwrap();
    match verify_chain(dir.path()) {
        Err(CertifyError::HashMismatch { stage, .. }) => assert_eq!(stage, 3),
        other => panic!("expected hash mismatch, got {other:?}"),
    }
}

#[test]
fn subshift_past_depth_limit_fails_at_the_first_stage() {
    let sys = json!({"kind": "subshift", "alphabet": ["a", "b"], "substitution": {"a": "ab", "b": "a"}, "depth_limit": 2});
    match run_pipeline(&sys, &PipelineParams { n: 3, ..PipelineParams::default() }) {
        Err(CertifyError::Stage { stage, .. }) => assert!(stage <= 1, "failed at stage {stage}"),
        other => panic!("expected a stage error, got {:?}", other.map(|r| r.chain.green)),
    }
}

#[test]
fn bundled_corpus_matches() {
    let summary = corpus_check(&corpus_path()).unwrap();
    for c in &summary.cases {
        assert!(c.ok, "{}: {:?}", c.name, c.diffs);
    }
}
