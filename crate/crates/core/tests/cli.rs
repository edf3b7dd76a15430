use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn conecheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conecheck")).args(args).output().expect("binary runs")
}

fn temp_scenario(tag: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("conecheck-{}-{tag}.scenario", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn paper_scenario_verifies() {
    let out = conecheck(&["verify", scenario("paper.scenario").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("result: ok"));
}

#[test]
fn odd_theta_control_fails_with_witness() {
    let out = conecheck(&["verify", scenario("odd_theta.scenario").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("db_pair         false (witness h1, n = 1"), "{text}");
}

#[test]
fn json_report_is_deterministic() {
    let file = scenario("paper.scenario");
    let args = ["verify", file.to_str().unwrap(), "--format", "json"];
    let a = conecheck(&args);
    let b = conecheck(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verdict"]["db_pair"]["value"], true);
    assert_eq!(v["verdict"]["db_space"]["witness"]["n"], 1);
    assert_eq!(v["verdict"]["cartier_index"]["index"], 4);
}

#[test]
fn load_errors_are_positioned() {
    let bad =
        temp_scenario("relation", "scenario bad\ncurve C\n  genus 2\n  generator a degree 1\n  relation a\nend\n");
    let out = conecheck(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":5:12:") && err.contains("degree 0"), "{err}");

    let syntax = temp_scenario("syntax", "scenario bad\nlet x = (1 + \n");
    let out = conecheck(&["verify", syntax.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
    let _ = std::fs::remove_file(bad);
    let _ = std::fs::remove_file(syntax);
}

#[test]
fn eval_and_explain() {
    let file = scenario("paper.scenario");
    let out = conecheck(&["eval", file.to_str().unwrap(), "h0(B, 3*Theta)"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2");
    let out = conecheck(&["eval", file.to_str().unwrap(), "intersect(L, Theta)"]);
    assert_eq!(out.status.code(), Some(2));
    let out = conecheck(&["explain", file.to_str().unwrap(), "h1(S, 4*L)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).lines().count() > 2);
}

#[test]
fn fmt_is_idempotent() {
    let once = conecheck(&["fmt", scenario("paper.scenario").to_str().unwrap()]);
    assert_eq!(once.status.code(), Some(0));
    let path = temp_scenario("fmt", &String::from_utf8_lossy(&once.stdout));
    let twice = conecheck(&["fmt", path.to_str().unwrap()]);
    assert_eq!(once.stdout, twice.stdout);
    let verify = conecheck(&["verify", path.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));
    let _ = std::fs::remove_file(path);
}
