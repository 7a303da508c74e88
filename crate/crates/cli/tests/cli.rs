use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn workbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn trs_commute_reports_all_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(dir.path(), &["trs", "commute", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), serde_json::json!({"pairs_checked": 3, "all_zero": true}));
}

#[test]
fn manifest_digest_is_sha256_of_canonical_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(dir.path(), &["trs", "commute", "--n", "2", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let m = read(&dir.path().join("workbench.manifest.json"));
    for key in ["subcommand", "params", "seed", "version", "wall_time", "sha256"] {
        assert!(m.get(key).is_some(), "manifest lacks {key}");
    }
    assert_eq!(m["subcommand"], "trs commute");
    assert_eq!(m["seed"], 5);
    let canonical = serde_json::to_string(&json(&out)).unwrap();
    let digest: String = Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(m["sha256"], digest.as_str());
}

#[test]
fn exact_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = workbench(dir.path(), &["macdonald", "--lambda", "2,1", "--n", "3"]);
    let b = workbench(dir.path(), &["macdonald", "--lambda", "2,1", "--n", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_out_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let out = workbench(dir.path(), &["vertex", "--n", "2", "--cap", "3", "--lambda", "1,0", "--json-out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read(&path), json(&out));
    let m = read(&dir.path().join("run.json.manifest.json"));
    assert_eq!(m["subcommand"], "vertex");
    assert_eq!(m["params"]["lambda"], serde_json::json!([1, 0]));
}

#[test]
fn macdonald_single_box_is_the_power_sum() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&workbench(dir.path(), &["macdonald", "--lambda", "1", "--n", "2"]));
    assert_eq!(v["basis"], "monomial");
    let coeffs = v["coeffs"].as_object().unwrap();
    assert_eq!(coeffs.len(), 1);
    assert_eq!(coeffs["(1,0)"]["text"], "1");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(dir.path(), &["trs", "commute", "--n", "3", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = workbench(dir.path(), &["qoper", "verify", "--rank", "1", "--xi", "1,2", "--a", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = workbench(dir.path(), &["macdonald", "--lambda", "1,1,1", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn duality_with_explicit_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(
        dir.path(),
        &["trs", "duality", "--xi", "1.2,0.7+0.3i", "--a", "0.9,-1.1+0.2i", "--q", "0.5+0.1i", "--tol", "1e-10"],
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["found"], 2);
    assert_eq!(v["tol"], 1e-10);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn qoper_verify_on_sampled_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(dir.path(), &["qoper", "verify", "--rank", "2", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["solutions"], 6);
    for c in v["checks"].as_array().unwrap() {
        let tol = c["QQ_residuals"]["tol"].as_f64().unwrap();
        assert!(c["QQ_residuals"]["values"].as_array().unwrap().iter().all(|x| x.as_f64().unwrap() < tol));
        assert!(c["D_check"]["value"].as_f64().unwrap() < c["D_check"]["tol"].as_f64().unwrap());
    }
}

#[test]
fn dell_certificate_and_negative_control() {
    let dir = tempfile::tempdir().unwrap();
    let ok = workbench(dir.path(), &["dell", "certify", "--n", "3", "--p-order", "1", "--w-order", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert_eq!(v["max_verified_order"], serde_json::json!({"p": 1, "w": 1}));
    assert!(v["wall_time"].is_number());
    let bad = workbench(dir.path(), &["dell", "certify", "--n", "3", "--p-order", "1", "--w-order", "1", "--theta", "corrupted"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["pairs"][0]["zero"], false);
}

#[test]
fn dell_degenerate_and_vertex_eigencheck() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(dir.path(), &["dell", "degenerate", "--n", "2", "--p-order", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ers_to_trs"][0]["factor_text"], "1");
    let out = workbench(dir.path(), &["vertex", "eigencheck", "--n", "2", "--cap", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["vanishes"], true);
}

#[test]
fn non_terminating_truncation_is_a_check_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(dir.path(), &["vertex", "--n", "3", "--cap", "2", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["terminates"], false);
}
