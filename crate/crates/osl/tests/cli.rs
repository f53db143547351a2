//! End-to-end tests of the `osl` binary: exit codes, file round trips and
//! byte-level determinism of the CSV payloads.

use std::path::Path;
use std::process::{Command, Output};

fn osl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osl"))
        .args(args)
        .output()
        .expect("spawn osl")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p.to_str().unwrap().to_string()
}

const SEVEN_POINTS: &str = "0.0\n0.1\n0.2\n1.0\n1.1\n1.2\n0.55\n";

#[test]
fn cluster_seven_point_demo() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "seven.txt", SEVEN_POINTS);
    let out = osl(&["cluster", &input, "--m", "2"]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let radius: f64 = text
        .lines()
        .next()
        .and_then(|l| l.split("chosen_radius=").nth(1))
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no chosen radius in {text}"));
    assert!((radius - 0.35).abs() < 1e-9, "{radius}");
    let labels: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("index"))
        .collect();
    assert_eq!(labels.len(), 7);
    // at r̂ ≈ 0.35 the demo point 7 joins cluster 1
    assert_eq!(labels[0], "1,1");
    assert_eq!(labels[3], "4,2");
    assert_eq!(labels[6], "7,1");
}

#[test]
fn cluster_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "one.txt", "0.5\n");
    let out = osl(&["cluster", &input, "--m", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("chosen_radius=0"));
    assert!(text.lines().any(|l| l == "1,1"));
}

#[test]
fn cluster_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "seven.txt", SEVEN_POINTS);
    // m = 0: algorithmic precondition → 3
    let out = osl(&["cluster", &input, "--m", "0"]);
    assert_eq!(out.status.code(), Some(3));
    // parse failure → 2 with line-numbered message
    let bad = write(dir.path(), "bad.txt", "0.1,0.2\n0.3\n");
    let out = osl(&["cluster", &bad, "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains("line 2"), "{msg}");
    // too few distinct points for sl → 3
    let dup = write(dir.path(), "dup.txt", "1.0\n1.0\n1.0\n");
    let out = osl(&["cluster", &dup, "--m", "2", "--algo", "sl"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn generate_cluster_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("squares.csv");
    let out = osl(&[
        "generate",
        "--model",
        "squares",
        "--delta-case",
        "easy",
        "--n",
        "120",
        "--eps",
        "0.1",
        "--seed",
        "7",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().count(), 120);
    assert!(text.lines().all(|l| l.split(',').count() == 3));

    let out = osl(&["cluster", data.to_str().unwrap(), "--m", "3"]);
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn generate_is_deterministic() {
    let args = |p: &str| {
        vec![
            "generate".into(),
            "--model".into(),
            "sine".into(),
            "--delta-case".into(),
            "tricky".into(),
            "--n".into(),
            "80".into(),
            "--eps".into(),
            "0.2".into(),
            "--seed".into(),
            "11".into(),
            "--out".into(),
            p.to_string(),
        ]
    };
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    for p in [&p1, &p2] {
        let a: Vec<String> = args(p.to_str().unwrap());
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        assert!(osl(&a).status.success());
    }
    assert_eq!(
        std::fs::read(&p1).unwrap(),
        std::fs::read(&p2).unwrap(),
        "same seed must give identical bytes"
    );
}

#[test]
fn risk_csv_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("r1.csv");
    let out8 = dir.path().join("r8.csv");
    for (threads, path) in [("1", &out1), ("8", &out8)] {
        let cfg = format!(
            r#"{{
  "scenario": "squares", "delta_case": "easy",
  "algorithms": ["osl", "sl"], "m": 3,
  "n": [60], "epsilon": [0.0, 0.2],
  "b": 40, "seed": 5, "out": "{}"
}}"#,
            path.to_str().unwrap()
        );
        let cfg_path = write(dir.path(), &format!("cfg{threads}.json"), &cfg);
        let out = osl(&["risk", "--config", &cfg_path, "--threads", threads]);
        assert!(out.status.success(), "{out:?}");
    }
    let a = std::fs::read_to_string(&out1).unwrap();
    let b = std::fs::read_to_string(&out8).unwrap();
    assert_eq!(a, b, "risk CSV must not depend on the thread count");
    assert_eq!(a.lines().count(), 5); // header + 2 algorithms × 2 epsilons
    assert!(a.starts_with("scenario,algorithm,delta_case,dim,n,epsilon,b,failures,risk,std_error"));
}

#[test]
fn risk_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", "{\"scenario\": \"squares\"}");
    let out = osl(&["risk", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("absent.json");
    let out = osl(&["risk", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_round_trip_and_rerun_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("circles.csv");
    assert!(osl(&[
        "generate",
        "--model",
        "circles",
        "--delta-case",
        "easy",
        "--n",
        "160",
        "--eps",
        "0.1",
        "--seed",
        "3",
        "--out",
        data.to_str().unwrap(),
    ])
    .status
    .success());

    let run = || {
        let out = osl(&[
            "bench",
            data.to_str().unwrap(),
            "--m",
            "2",
            "--b",
            "10",
            "--fraction",
            "0.75",
            "--seed",
            "9",
        ]);
        assert!(out.status.success(), "{out:?}");
        String::from_utf8(out.stdout).unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(first, second, "rerun must be byte-identical");
    assert!(first.starts_with("algorithm,m,b,fraction,used,skipped,mean_ari,std_error"));
    assert_eq!(first.lines().count(), 3); // header + osl + sl
}

#[test]
fn bench_requires_labels() {
    let dir = tempfile::tempdir().unwrap();
    let unlabeled = write(dir.path(), "plain.txt", "0.1 0.7\n0.4 0.9\n0.8 0.2\n");
    let out = osl(&["bench", &unlabeled, "--m", "2", "--b", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let params = write(
        dir.path(),
        "params.json",
        r#"{
  "gamma_star": 0.3333333333333333, "gamma_sup": 0.3333333333333333,
  "epsilon": 0.05, "kappa0": 1.0, "kappa_sup": 1.0, "kappa_c": 1.0,
  "d": 2.0, "big_d": 2.0, "delta": 0.35, "n": 5000, "m": 3,
  "lambda": 1.0, "eta": 0.05
}"#,
    );
    let out = osl(&["bound", "--params", &params, "--grid", "0.01:0.3:100"]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["a,", "b,", "eta0,", "eta1,", "r_best,", "bound,"] {
        assert!(text.lines().any(|l| l.starts_with(key)), "{key} in {text}");
    }
    // grid outside (0, δ) → config error
    let out = osl(&["bound", "--params", &params, "--grid", "0.01:0.4:100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_validates_model() {
    let out = osl(&["generate", "--model", "unknown", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
}
