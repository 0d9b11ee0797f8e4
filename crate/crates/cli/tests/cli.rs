//! End-to-end runs of the `nritt` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nritt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nritt")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const DIAG: &str = r#"{"dim":2,"re":[[0.5,0],[0,0.9]],"norm":"p2"}"#;

#[test]
fn classify_diagonal_is_admissible() {
    let dir = tempfile::tempdir().unwrap();
    let op = write(dir.path(), "op.json", DIAG);
    let out = nritt(&["classify", "--input", &op]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["admissible"], Value::Bool(true));
    assert_eq!(v["seed"].as_u64(), Some(0x5eed));
    assert_eq!(v["config_hash"].as_str().map(str::len), Some(64));
    assert!(v["version"].is_string());
}

#[test]
fn apply_with_interior_pole_is_unbounded() {
    let dir = tempfile::tempdir().unwrap();
    let op = write(dir.path(), "op.json", DIAG);
    let f = r#"{"type":"rational","num":[1],"den":[-0.7,1]}"#;
    let out = nritt(&["apply", "--input", &op, "--function", f]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "Unbounded");
}

#[test]
fn apply_matches_the_diagonal_values() {
    let dir = tempfile::tempdir().unwrap();
    let op = write(dir.path(), "op.json", DIAG);
    let f = write(dir.path(), "f.json", r#"{"type":"rational","num":[1],"den":[2,1]}"#);
    let out = nritt(&["apply", "--input", &op, "--function", &f]);
    assert_eq!(out.status.code(), Some(0));
    let re = &json(&out)["result"]["operator"]["re"];
    for (k, x) in [0.5, 0.9].into_iter().enumerate() {
        let got = re[k][k].as_f64().unwrap();
        assert!((got - 1.0 / (2.0 + x)).abs() < 1e-8, "{got}");
    }
}

#[test]
fn transfer_on_the_stock_example() {
    let out = nritt(&["transfer"]);
    assert_eq!(out.status.code(), Some(0));
    let dev = json(&out)["result"]["deviation"].as_f64().unwrap();
    assert!(dev < 1e-6, "{dev}");
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let op = write(dir.path(), "op.json", DIAG);
    let run = |name: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let out = nritt(&["rbound", "--input", &op, "--resolvent-family", "--trials", "3", "--seed", "9", "--out", p]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
    let f = r#"{"type":"poly","coeffs":[0,1,-1]}"#;
    let sweep = || nritt(&["sweep", "--input", &op, "--function", f, "--grid", "3"]).stdout;
    let first = sweep();
    assert_eq!(first, sweep());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().nth(1), Some("angle,bound,K_lower,nodes"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn multiplier_output_feeds_classification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mult.json");
    let p = path.to_str().unwrap();
    let out = nritt(&["multiplier", "gen", "--rule", "1-2^-n", "--dim", "6", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let out = nritt(&["classify", "--input", p]);
    assert_eq!(json(&out)["result"]["admissible"], Value::Bool(true));
}

#[test]
fn carleson_products() {
    let dir = tempfile::tempdir().unwrap();
    let pts = write(dir.path(), "p.json", "[1, 2]");
    let v = json(&nritt(&["carleson", "--points", &pts]));
    assert!((v["result"]["delta_min"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    let bad = write(dir.path(), "q.json", "[1, [-1, 0]]");
    let out = nritt(&["carleson", "--points", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "DomainError");
}

#[test]
fn io_and_parse_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nritt(&["classify", "--input", "/nonexistent/op.json"]).status.code(), Some(2));
    let garbage = write(dir.path(), "op.json", "{not json");
    let out = nritt(&["classify", "--input", &garbage]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "ParseError");
    assert_eq!(nritt(&["classify"]).status.code(), Some(2));
}
