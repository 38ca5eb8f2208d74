use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn dadim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dadim")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &TempDir, name: &str, v: &Value) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.display().to_string()
}

fn s(p: &Path) -> String {
    p.display().to_string()
}

fn bundled_corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn help_documents_exit_codes() {
    let o = dadim(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for c in 2..=16 {
        assert!(text.contains(&format!("\n  {c} ")), "exit code {c} missing from help");
    }
    for cmd in [
        "construct", "verify", "asdim-construct", "asdim-verify", "bridge", "nerve", "blr-check", "pou-build",
        "pou-verify", "norm", "decompose", "pipeline", "corpus",
    ] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn usage_io_and_parse_errors() {
    assert_eq!(code(&dadim(&["frobnicate"])), 2);
    assert_eq!(code(&dadim(&["construct", "--system", "/nonexistent/system.json"])), 3);
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&dadim(&["construct", "--system", &s(&bad)])), 4);
    let unknown = write(&dir, "unknown.json", &json!({"kind": "torus"}));
    assert_eq!(code(&dadim(&["construct", "--system", &unknown])), 4);
}

#[test]
fn construct_then_verify() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "sys.json", &json!({"kind": "odometer", "base": [2]}));
    let wit = s(&dir.path().join("w.json"));
    assert_eq!(code(&dadim(&["construct", "--system", &sys, "--n", "1", "--out", &wit])), 0);
    let o = dadim(&["verify", "--system", &sys, "--witness", &wit]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout_json(&o)["uncovered"].as_array().unwrap().is_empty());

    // a wrong declared finite set is a witness error
    let mut w: Value = serde_json::from_str(&std::fs::read_to_string(&wit).unwrap()).unwrap();
    w["finite_sets"][0] = json!([0]);
    let tampered = write(&dir, "t.json", &w);
    assert_eq!(code(&dadim(&["verify", "--system", &sys, "--witness", &tampered])), 6);
}

#[test]
fn single_color_witness_is_rejected() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "sys.json", &json!({"kind": "odometer", "base": [2]}));
    let wit = write(&dir, "w.json", &json!({"E": [-1, 0, 1], "colors": [[""]], "finite_sets": [[]]}));
    let o = dadim(&["verify", "--system", &sys, "--witness", &wit]);
    assert_eq!(code(&o), 6, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn coarse_commands() {
    let dir = TempDir::new().unwrap();
    let space = write(&dir, "x.json", &json!({"interval": [0, 299]}));
    let wit = s(&dir.path().join("w.json"));
    assert_eq!(code(&dadim(&["asdim-construct", "--space", &space, "--r", "5", "--out", &wit])), 0);
    assert_eq!(code(&dadim(&["asdim-verify", "--space", &space, "--witness", &wit])), 0);
    let o = dadim(&["bridge", "--space", &space, "--witness", &wit]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["report"]["round_trip_exact"], json!(true));

    // one family holding everything in one class violates the diameter bound
    let bad = write(&dir, "bad.json", &json!({"scale_r": 5, "bound_s": 3, "families": [[(0..300).collect::<Vec<_>>()]]}));
    assert_eq!(code(&dadim(&["asdim-verify", "--space", &space, "--witness", &bad])), 9);
}

#[test]
fn nerve_and_blr() {
    let dir = TempDir::new().unwrap();
    let action = write(&dir, "act.json", &json!({"rotation": 12}));
    let arc = |start: usize| -> Vec<[usize; 2]> {
        (0..12)
            .flat_map(|x| (0..12).map(move |g| [x, g]))
            .filter(|&[x, g]| ((x + 12 - g) % 12 + 12 - start) % 12 < 10)
            .collect()
    };
    let cover = write(&dir, "cover.json", &json!({"sets": [arc(0), arc(6)]}));
    let nerve = s(&dir.path().join("nerve.json"));
    let o = dadim(&["nerve", "--action", &action, "--cover", &cover, "--e", "1", "--d", "1", "--n", "2", "--out", &nerve]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // the map is too far from equivariant to produce a witness
    let o = dadim(&["blr-check", "--action", &action, "--nerve", &nerve, "--e", "1"]);
    assert_eq!(code(&o), 10, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn pou_norm_and_decompose() {
    let dir = TempDir::new().unwrap();
    let groupoid = write(&dir, "g.json", &json!({"action": {"rotation": 12}}));
    // arrows (x+1, 1, x) have index 12 + x
    let k: Vec<usize> = (12..24).collect();
    let wit = write(&dir, "w.json", &json!({"K": k, "colors": [[0, 1, 2, 3, 4, 5], [6, 7, 8, 9, 10, 11]]}));
    let pou = s(&dir.path().join("pou.json"));
    let o = dadim(&["pou-build", "--groupoid", &groupoid, "--witness", &wit, "--n", "16", "--out", &pou]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = dadim(&["pou-verify", "--groupoid", &groupoid, "--pou", &pou]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout_json(&o)["normalization_defects"].as_array().unwrap().is_empty());
    // demanding tiny oscillation fails
    assert_eq!(code(&dadim(&["pou-verify", "--groupoid", &groupoid, "--pou", &pou, "--epsilon", "1/1000"])), 11);

    let elem = write(&dir, "f.json", &json!(k.iter().map(|&a| json!([a, 1, 0])).collect::<Vec<_>>()));
    let o = dadim(&["norm", "--groupoid", &groupoid, "--element", &elem]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!((v["norm"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["blocks"], json!([12]));
    let o = dadim(&["decompose", "--groupoid", &groupoid, "--pou", &pou, "--element", &elem]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["defect_within"], json!(true));

    let outside = write(&dir, "bad.json", &json!([[999, 1, 0]]));
    assert_eq!(code(&dadim(&["norm", "--groupoid", &groupoid, "--element", &outside])), 12);
}

#[test]
fn pipeline_chain_and_tampering() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "sys.json", &json!({"kind": "odometer", "base": [2]}));
    let out = dir.path().join("chain");
    let o = dadim(&["pipeline", "--system", &sys, "--out", &s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["green"], json!(true));
    assert_eq!(code(&dadim(&["pipeline", "--check", &s(&out)])), 0);

    let wit = out.join("1-witness.json");
    let mut w: Value = serde_json::from_str(&std::fs::read_to_string(&wit).unwrap()).unwrap();
    w["M"] = json!(17);
    std::fs::write(&wit, serde_json::to_string_pretty(&w).unwrap()).unwrap();
    let o = dadim(&["pipeline", "--check", &s(&out)]);
    assert_eq!(code(&o), 13);
    assert!(String::from_utf8_lossy(&o.stderr).contains("stage 1"));

    let deep = write(&dir, "deep.json", &json!({"kind": "subshift", "alphabet": ["a", "b"], "substitution": {"a": "ab", "b": "a"}, "depth_limit": 4}));
    let o = dadim(&["pipeline", "--system", &deep, "--out", &s(&dir.path().join("deep"))]);
    assert_eq!(code(&o), 5, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stage 1"));
}

#[test]
fn corpus_green_diff_and_missing() {
    let o = dadim(&["corpus", "--dir", &s(&bundled_corpus())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    let dir = TempDir::new().unwrap();
    for entry in std::fs::read_dir(bundled_corpus()).unwrap() {
        let p = entry.unwrap().path();
        std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    let golden = dir.path().join("odometer-n1.json");
    let text = std::fs::read_to_string(&golden).unwrap().replace("\"M\": 16", "\"M\": 15");
    std::fs::write(&golden, text).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dadim"))
        .arg("corpus")
        .env("DADIM_CORPUS", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 14);
    let v = stdout_json(&o);
    let bad: Vec<&str> =
        v["cases"].as_array().unwrap().iter().filter(|c| c["ok"] == json!(false)).map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(bad, vec!["odometer-n1"]);

    assert_eq!(code(&dadim(&["corpus", "--dir", "/nonexistent/corpus"])), 15);
}
