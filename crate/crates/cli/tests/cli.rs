use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gk_core::scenario::{strip_timing, Format, Scenario};

fn gk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gk")).args(args).output().expect("gk runs")
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn scenario(name: &str) -> String {
    root().join("scenarios").join(name).to_string_lossy().into_owned()
}

fn data(name: &str) -> String {
    root().join("tests/data").join(name).to_string_lossy().into_owned()
}

fn bundled() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(root().join("scenarios"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "gk"))
        .collect();
    v.sort();
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bundled_scenarios_run_cleanly() {
    let all = bundled();
    assert!(all.len() >= 7);
    for p in all {
        let o = gk(&["run", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", p.display(), stderr(&o));
        let v = gk(&["validate", p.to_str().unwrap()]);
        assert_eq!(v.status.code(), Some(0), "{}", p.display());
    }
}

#[test]
fn bundled_scenarios_round_trip() {
    for p in bundled() {
        let s = Scenario::load(&p).unwrap();
        let again = Scenario::parse(&s.to_text()).unwrap();
        assert_eq!(s, again, "{}", p.display());
    }
}

#[test]
fn reports_are_deterministic_up_to_timing() {
    for name in ["sl2-borel-weil.gk", "ce-torsion.gk"] {
        for (flag, fmt) in [("--format=text", Format::Text), ("--format=json", Format::Json)] {
            let a = stdout(&gk(&["run", &scenario(name), flag]));
            let b = stdout(&gk(&["run", &scenario(name), flag]));
            assert_eq!(strip_timing(&a, fmt), strip_timing(&b, fmt), "{name} {flag}");
        }
    }
}

#[test]
fn parse_error_exits_two() {
    let o = gk(&["run", &data("bad.gk")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("parse error"));
    assert_eq!(gk(&["validate", &data("bad.gk")]).status.code(), Some(2));
    assert_eq!(gk(&["run", &data("does-not-exist.gk")]).status.code(), Some(2));
}

#[test]
fn validation_errors_exit_three() {
    let o = gk(&["run", &data("jacobi.gk")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("Jacobi"));
    let o = gk(&["validate", &data("unknown-module.gk")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unknown module `nowhere`"));
    // A failing task still lets the report through.
    let o = gk(&["run", &data("unknown-module.gk")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("[0] validate_module: error"));
}

#[test]
fn downgraded_certificates_warn_but_succeed() {
    let o = gk(&["run", &scenario("su11-aq.gk")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    assert!(stdout(&o).contains("(informational)"));
}

#[test]
fn borel_weil_report() {
    let o = gk(&["run", &scenario("sl2-borel-weil.gk")]);
    let text = stdout(&o);
    assert!(text.contains("[2] induce: ok\n    rank 3 on the window\n"));
    assert!(text.contains("ThmC"));
    assert!(text.contains("Z->Z[1/2] ranks 3/3 divisors [1, 1, 1] iso\n"));
    assert!(text.contains("[6] induce: ok\n    rank 0 on the window\n"));
}

#[test]
fn torsion_report() {
    let text = stdout(&gk(&["run", &scenario("ce-torsion.gk")]));
    assert!(text.contains("H^2: free 0, torsion [2, 2]"));
    assert!(text.contains("Q: H^2: free 0, torsion []"));
    assert!(text.contains("Z[1/3]: H^2: free 0, torsion [2, 2]"));
}

#[test]
fn json_output_to_file() {
    let out = std::env::temp_dir().join(format!("gk-cli-test-{}.json", std::process::id()));
    let o = gk(&["run", &scenario("ce-torsion.gk"), "--format=json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    std::fs::remove_file(&out).ok();
    assert_eq!(v["scenario"], "ce-torsion");
    let tasks = v["tasks"].as_array().unwrap();
    assert_eq!(tasks.len(), 7);
    assert!(tasks.iter().all(|t| t["status"] == "ok"));
    assert_eq!(v["timing"].as_array().unwrap().len(), 7);
}

#[test]
fn empty_scenario() {
    let o = gk(&["run", &scenario("empty.gk"), "--format=json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tasks"].as_array().unwrap().len(), 0);
}
