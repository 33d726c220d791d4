use std::process::{Command, Output};

use serde_json::Value;

fn hyperwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = hyperwalk(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(args: &[&str]) -> i32 {
    hyperwalk(args).status.code().expect("exit code")
}

fn rows<'a>(doc: &'a Value, table: &str) -> &'a Vec<Value> {
    doc["tables"][table]["rows"].as_array().expect("table rows")
}

#[test]
fn exact_distance_law_at_two_steps() {
    let doc = json_of(&["exact-dist", "--q", "2", "--n", "2", "--exact"]);
    let probs: Vec<&str> = rows(&doc, "distance").iter().map(|r| r[1].as_str().unwrap()).collect();
    assert_eq!(probs, ["1/4", "0/1", "3/4"]);
    let doc = json_of(&["exact-dist", "--q", "2", "--n", "2"]);
    let probs: Vec<f64> = rows(&doc, "distance").iter().map(|r| r[1].as_f64().unwrap()).collect();
    assert_eq!(probs, [0.25, 0.0, 0.75]);
    assert_eq!(doc["tool"], "hyperwalk");
    assert_eq!(doc["config"]["command"][0], "exact-dist");
}

#[test]
fn analytic_rate_vanishes_at_the_drift() {
    let doc = json_of(&["analytic", "--q", "2", "--alpha", "0.5"]);
    assert_eq!(doc["summary"]["rate"].as_f64(), Some(0.0));
    let doc = json_of(&["analytic", "--q", "2", "--alpha", "1.5"]);
    assert_eq!(doc["summary"]["rate"], "inf");
}

#[test]
fn invalid_schottky_sets_still_exit_zero() {
    let doc = json_of(&["schottky", "verify", "--elements", "a", "A", "--constant", "1"]);
    assert_eq!(doc["summary"]["valid"], false);
    let doc = json_of(&["schottky", "verify", "--elements", "a", "A", "b", "B", "--constant", "1"]);
    assert_eq!(doc["summary"]["worst_failures"], 2);
    assert_eq!(doc["summary"]["certificate"]["mode"]["kind"], "tree-exact");
}

#[test]
fn exit_codes_follow_error_classes() {
    // Monte Carlo without a seed.
    assert_eq!(code(&["simulate", "--n", "10", "--samples", "10"]), 2);
    assert_eq!(code(&["tails", "walk-away", "--ns", "5", "--samples", "10"]), 2);
    // No subcommand, unknown backend, rank below two.
    assert_eq!(code(&["--q", "2"]), 2);
    assert_eq!(code(&["rate", "--ns", "3", "--backend", "free:q=x"]), 2);
    assert_eq!(code(&["exact-dist", "--n", "3", "--q", "1"]), 2);
    // Rational output beyond its cap.
    assert_eq!(code(&["exact-dist", "--n", "300", "--exact"]), 4);
    // Enumeration beyond its budget.
    assert_eq!(code(&["rate", "--source", "enum", "--ns", "20", "--alphas", "0.5"]), 4);
    // A tolerance comparison that cannot pass.
    assert_eq!(code(&["compare", "tau-vs-dist", "--n", "256", "--tol", "1e-12"]), 3);
    assert_eq!(code(&["compare", "tau-vs-dist", "--n", "2048"]), 0);
}

#[test]
fn seeded_runs_are_byte_reproducible() {
    let args = ["simulate", "--n", "30", "--samples", "3000", "--seed", "11"];
    let a = hyperwalk(&args);
    let b = hyperwalk(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut more = args.to_vec();
    more.extend(["--workers", "3"]);
    let parallel: Value = serde_json::from_slice(&hyperwalk(&more).stdout).unwrap();
    let serial: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(parallel["tables"], serial["tables"]);
    let other = hyperwalk(&["simulate", "--n", "30", "--samples", "3000", "--seed", "12"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn worker_count_does_not_change_results() {
    let base = ["harmonic", "--k", "2", "--samples", "5000", "--seed", "5", "--chunk-size", "500"];
    let one = json_of(&[&base[..], &["--workers", "1"]].concat());
    let four = json_of(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(one["tables"], four["tables"]);
    assert_eq!(one["summary"], four["summary"]);
}

#[test]
fn csv_carries_config_and_full_precision() {
    let out = hyperwalk(&["mgf", "--n", "10", "--lambdas", "0.1,0.2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# hyperwalk "));
    let config_line = lines.next().unwrap();
    let config: Value = serde_json::from_str(config_line.strip_prefix("# config ").unwrap()).unwrap();
    assert_eq!(config["n"], 10);
    assert!(text.contains("# table summary"));
    assert!(text.contains("# table mgf"));
    let row = text.lines().skip_while(|l| *l != "# table mgf").nth(2).unwrap();
    let value = row.split(',').nth(1).unwrap();
    let mantissa = value.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{value}");
}

#[test]
fn outputs_replay_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let status = hyperwalk(&[
        "tails",
        "gromov",
        "--n",
        "12",
        "--i",
        "6",
        "--samples",
        "2000",
        "--seed",
        "9",
        "--r",
        "1:1:4",
        "--out",
        first.to_str().unwrap(),
    ])
    .status;
    assert!(status.success());
    let second = dir.path().join("second.json");
    assert!(hyperwalk(&["--config", first.to_str().unwrap(), "--out", second.to_str().unwrap()])
        .status
        .success());
    let a: Value = serde_json::from_slice(&std::fs::read(&first).unwrap()).unwrap();
    let b: Value = serde_json::from_slice(&std::fs::read(&second).unwrap()).unwrap();
    assert_eq!(a["summary"], b["summary"]);
    assert_eq!(a["tables"], b["tables"]);
    assert_eq!(b["config"]["out"], second.to_str().unwrap());
}

#[test]
fn config_files_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"command": ["analytic"], "q": 3, "alphas": [0.2, 0.4]}"#).unwrap();
    let doc = json_of(&["--config", path.to_str().unwrap()]);
    assert_eq!(doc["config"]["q"], 3);
    assert_eq!(rows(&doc, "analytic").len(), 2);
    let doc = json_of(&["--config", path.to_str().unwrap(), "--q", "4"]);
    assert_eq!(doc["config"]["q"], 4);
    std::fs::write(&path, r#"{"command": ["analytic"], "bogus": 1}"#).unwrap();
    assert_eq!(code(&["--config", path.to_str().unwrap()]), 2);
}

#[test]
fn sl2_backend_parses_measures() {
    let doc = json_of(&[
        "simulate",
        "--backend",
        "sl2",
        "--measure",
        "point:2,0,0,0.5",
        "--n",
        "5",
        "--samples",
        "20",
        "--seed",
        "1",
    ]);
    let d = doc["summary"]["mean_d"].as_f64().unwrap();
    assert!((d - 10.0 * 2f64.ln()).abs() < 1e-6, "{d}");
    assert_eq!(code(&["simulate", "--backend", "sl2", "--n", "5", "--samples", "2", "--seed", "1"]), 2);
}

#[test]
fn schottky_tools_on_the_tree() {
    let doc = json_of(&["schottky", "boost", "--elements", "aa", "bb", "AA", "BB", "--word", "abAB"]);
    assert_eq!(doc["summary"]["index"], 0);
    let doc = json_of(&["schottky", "moving-tau", "--word", "abAab"]);
    let targets = rows(&doc, "targets");
    assert!(!targets.is_empty());
    for t in targets {
        assert!(t[3].as_f64().unwrap() <= 2.0);
    }
    let doc = json_of(&["rate", "--q", "3", "--ns", "10", "--alphas", "0.9"]);
    assert_eq!(doc["summary"]["drift"].as_f64(), Some(2.0 / 3.0));
    let doc = json_of(&["spectrum", "--elements", "a", "b", "--n-max", "5"]);
    assert_eq!(doc["summary"]["ell_best"].as_f64(), Some(1.0));
    assert_eq!(code(&["spectrum", "--backend", "sl2", "--elements", "1,0,0,1", "--n-max", "2"]), 2);
}
