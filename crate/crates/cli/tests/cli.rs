use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitmatch")).args(args).output().expect("spawn orbitmatch")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = run(&all);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn without_volatile(mut v: Value) -> Value {
    let m = v.as_object_mut().unwrap();
    m.remove("elapsed_ms");
    m.remove("cache");
    v
}

fn schema() -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&s).expect("schema compiles")
}

fn assert_valid(report: &Value) {
    let schema = schema();
    let msgs: Vec<String> = match schema.validate(report) {
        Ok(()) => Vec::new(),
        Err(errs) => errs.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "report violates schema: {msgs:?}");
}

fn pair(run: &Value, psi: u64, gamma: u64) -> &Value {
    run["pairs"].as_array().unwrap().iter().find(|p| p["psi"] == psi && p["gamma"] == gamma).expect("pair present")
}

#[test]
fn grade_reports_k_from_parity() {
    let o = run(&["grade", "--type", "gl", "--rank", "4", "--lambda", "1,1,0,0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("K = GL(2)×GL(2)"));
}

#[test]
fn grade_f4_has_no_family() {
    let v = json(&["grade", "--type", "f4", "--lambda", "0,1,0,0-halved"]);
    assert_eq!(v["status"]["status"], "NoFamilyExists");
}

#[test]
fn grade_gl2_has_one_dimensional_minus_one_space() {
    let v = json(&["grade", "--type", "gl", "--rank", "2", "--lambda", "1,0"]);
    assert_eq!(v["eigenspace_dims"]["-1"], 1);
}

#[test]
fn exit_code_three_for_bad_coweights() {
    assert_eq!(run(&["grade", "--type", "gl", "--lambda", "0,1"]).status.code(), Some(3));
    assert_eq!(run(&["grade", "--type", "gl", "--lambda", "1/2,0"]).status.code(), Some(3));
    assert_eq!(run(&["grade", "--type", "b", "--rank", "2", "--lambda", "-1,1"]).status.code(), Some(3));
}

#[test]
fn exit_code_two_for_parse_errors() {
    assert_eq!(run(&["grade", "--type", "gl", "--lambda", "1,x"]).status.code(), Some(2));
    assert_eq!(run(&["grade", "--type", "h", "--rank", "2", "--lambda", "0,1"]).status.code(), Some(2));
    assert_eq!(run(&["grade", "--type", "gl", "--rank", "3", "--lambda", "1,0"]).status.code(), Some(2));
    assert_eq!(run(&["grade", "--type", "gl"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--type", "gl", "--lambda", "1,0", "--ordering", "3"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--max-n", "7"]).status.code(), Some(2));
}

#[test]
fn verify_gl4_witness_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["verify", "--type", "gl", "--rank", "4", "--lambda", "1,1,0,0", "--mode", "k", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_valid(&v);
    assert_eq!(v["all_equal"], true);
    let run0 = &v["runs"][0];
    let ranks = v["orbit_ranks"].as_array().unwrap();
    let r0 = ranks.iter().position(|r| r == &serde_json::json!([0])).unwrap() as u64;
    let r1 = ranks.iter().position(|r| r == &serde_json::json!([1])).unwrap() as u64;
    let p = pair(run0, r0, r1);
    assert_eq!(p["padic"], "1+q");
    assert_eq!(p["real"], "1+q");
}

#[test]
fn verify_gl3_all_orderings() {
    let v = json(&["verify", "--type", "gl", "--rank", "3", "--lambda", "2,1,0", "--ordering", "all"]);
    assert_valid(&v);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert!(runs.iter().all(|r| r["all_equal"] == true));
}

#[test]
fn verify_gl2_is_trivial() {
    let v = json(&["verify", "--type", "gl", "--rank", "2", "--lambda", "1,0"]);
    assert_valid(&v);
    for p in v["runs"][0]["pairs"].as_array().unwrap() {
        assert_eq!(p["padic"], "1");
        assert_eq!(p["real"], "1");
    }
}

#[test]
fn verify_modes_and_two_step_validate() {
    for extra in [["--mode", "p"], ["--two-step", "--mode=k"]] {
        let mut args = vec!["verify", "--type", "gl", "--lambda", "2,1,1,0"];
        args.extend(extra);
        let v = json(&args);
        assert_valid(&v);
        assert_eq!(v["all_equal"], true);
    }
}

#[test]
fn verify_rejects_non_gl() {
    let o = run(&["verify", "--type", "b", "--rank", "2", "--lambda", "0,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--type", "gl", "--lambda", "1,1,0,0", "--ordering", "all", "--seed", "7"];
    assert_eq!(without_volatile(json(&args)), without_volatile(json(&args)));
}

#[test]
fn cold_and_warm_cache_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["verify", "--type", "gl", "--lambda", "2,1,1,0", "--cache-dir", d];
    let cold = json(&args);
    let warm = json(&args);
    assert!(cold["cache"]["misses"].as_u64().unwrap() > 0);
    assert_eq!(warm["cache"]["misses"], 0);
    assert!(warm["cache"]["hits"].as_u64().unwrap() > 0);
    assert_eq!(without_volatile(cold), without_volatile(warm));
}

#[test]
fn sweep_small_cases_pass() {
    let v = json(&["sweep", "--max-n", "2"]);
    assert_eq!(v["nontrivial"], 1);
    assert_eq!(v["failed"], 0);
    let v = json(&["sweep", "--max-n", "3"]);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["budget_exhausted"], false);
}

#[test]
fn sweep_budget_keeps_partial_results() {
    let v = json(&["sweep", "--max-n", "5", "--budget-seconds", "0"]);
    assert_eq!(v["budget_exhausted"], true);
    assert_eq!(v["failed"], 0);
}

#[test]
fn kl_single_polynomial() {
    let o = run(&["kl", "--x", "1324", "--w", "3412"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1+q");
    assert_eq!(run(&["kl", "--x", "2134", "--w", "3412", "--sizes", "2,2"]).status.code(), Some(2));
}

#[test]
fn kl_padic_table_csv() {
    let o = run(&["kl", "--type", "gl", "--lambda", "1,1,0,0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# convention: parabolic q=0\npsi_id,gamma_id,poly\n"));
    assert!(text.lines().any(|l| l.ends_with(",1+q")));
}

#[test]
fn klv_block_and_table() {
    let o = run(&["klv", "--p", "1", "--q", "1", "--block"]);
    assert!(o.status.success());
    let b: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(b.is_object());
    let t = json(&["klv", "--p", "2", "--q", "2", "--format", "json"]);
    assert!(t.is_object());
}

#[test]
fn orbits_and_match_for_grassmannian_grading() {
    let v = json(&["orbits", "--type", "gl", "--lambda", "1,1,0,0"]);
    assert_eq!(v["l_orbits"].as_array().unwrap().len(), 3);
    assert_eq!(v["targets"].as_array().unwrap().len(), 6);
    let m = json(&["match", "--type", "gl", "--lambda", "1,1,0,0", "--mode", "p"]);
    assert_eq!(m["injective"], true);
}
