use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fingerlab"))
        .args(args)
        .env_remove("FINGERLAB_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let o = run(&all);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn eval_reports_exact_values() {
    let path = fixture("antichain46.json");
    let v = json(&["eval", "--strategy", path.to_str().unwrap()]);
    assert_eq!(v["tool"], "fingerlab");
    assert_eq!(v["command"], "eval");
    let rep = &v["result"]["report"];
    assert_eq!(rep["worst_case"], "1/2");
    assert_eq!(rep["average"], "1/3");
    assert_eq!(rep["one_sided"], true);
    let digest = v["inputs"].as_object().unwrap().values().next().unwrap();
    assert!(digest.as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn constructed_strategy_round_trips_through_eval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c5.json");
    let o = run(&[
        "construct",
        "complement",
        "--m",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&["eval", "--strategy", out.to_str().unwrap()]);
    assert_eq!(v["result"]["report"]["worst_case"], "5/6");
    assert_eq!(v["result"]["n"], 10);
}

#[test]
fn bounds_text_and_csv() {
    let o = run(&["bounds", "smp", "--n", "5", "--m", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("3/4 -- 3/4"));
    let o = run(&["bounds", "one-way", "--n", "17", "--m", "16"]);
    assert!(stdout(&o).starts_with("0 -- 1/4"));
    let o = run(&[
        "--format", "csv", "bounds", "one-way", "--n", "6", "--m", "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1/2"));
}

#[test]
fn tables_match_bundled_copies() {
    for id in ["I", "II", "SMP"] {
        let o = run(&["tables", id, "--cached"]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "table {id}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(run(&["bounds", "smp", "--n", "5"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let missing = run(&["eval", "--strategy", "/nonexistent/strategy.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/strategy.json"));
    let o = run(&[
        "--budget-nodes",
        "1000",
        "search",
        "cover-free",
        "--m",
        "10",
        "--k",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stdout.is_empty());
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"p": [["1/2", "1/3"]], "r": [[1], [1]]}"#).unwrap();
    let o = run(&["eval", "--strategy", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seeded_runs_are_reproducible_across_threads() {
    let args = |threads: &'static str| {
        vec![
            "--format",
            "json",
            "--seed",
            "7",
            "--threads",
            threads,
            "quantum",
            "pack",
            "--n",
            "5",
            "--m",
            "2",
            "--restarts",
            "6",
            "--iterations",
            "400",
        ]
    };
    let one = run(&args("1"));
    let four = run(&args("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, run(&args("1")).stdout);

    let cf = |threads: &'static str| {
        run(&[
            "--format",
            "json",
            "--threads",
            threads,
            "search",
            "cover-free",
            "--m",
            "7",
            "--k",
            "3",
            "--j",
            "2",
        ])
        .stdout
    };
    assert_eq!(cf("1"), cf("3"));
}

#[test]
fn quantum_pack_reaches_orthogonality() {
    let v = json(&[
        "--seed",
        "1",
        "quantum",
        "pack",
        "--n",
        "2",
        "--m",
        "2",
        "--restarts",
        "2",
        "--iterations",
        "200",
    ]);
    assert!(
        v["result"]["result"]["report"]["max_overlap"]
            .as_f64()
            .unwrap()
            < 1e-9
    );
}
