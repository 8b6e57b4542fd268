//! End-to-end runs of the `anomq` binary: file formats, subcommand wiring,
//! and exit codes (0 ok, 1 infeasible, 2 input error, 3 resource limit).

use std::path::Path;
use std::process::{Command, Output};

fn anomq(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anomq"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn simulate_then_query_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = anomq(
        &[
            "simulate",
            "--n", "150",
            "--shape", r#"{"shape":"ring","k":3}"#,
            "--noise", "5",
            "--seed", "11",
            "--out-dir", "data",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["edges.tsv", "pvalues.csv", "truth.json"] {
        assert!(dir.path().join("data").join(f).exists(), "{f} missing");
    }

    let out = anomq(
        &[
            "query",
            "--graph", "data/edges.tsv",
            "--pvalues", "data/pvalues.csv",
            "--query", r#"{"shape":"ring","k":3}"#,
            "--stat", "bj",
            "--out", "result.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("result.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["schema"], "anomq/v1");
    assert_eq!(json["feasible"], true);
    assert!(json["vertices"].as_array().unwrap().len() >= 3);
    assert!(!json["trace"].as_array().unwrap().is_empty());

    // The planted triangle is the expected answer on a clean enough seed.
    let truth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("data/truth.json")).unwrap())
            .unwrap();
    assert_eq!(truth["schema"], "anomq/v1");
    assert_eq!(truth["planted_vertices"].as_array().unwrap().len(), 3);
}

#[test]
fn query_from_attributes_calibrates() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.tsv"), "0\t1\n1\t2\n0\t2\n2\t3\n3\t4\n").unwrap();
    // Five time steps; vertices 0..3 spike in the last column.
    let mut csv = String::from("vertex,t_0,t_1,t_2,t_3,t_4\n");
    for v in 0..5 {
        let spike = if v < 3 { 9.0 } else { 1.0 };
        csv.push_str(&format!("{v},1.0,1.2,0.8,1.1,{spike}\n"));
    }
    std::fs::write(dir.path().join("attrs.csv"), csv).unwrap();
    let out = anomq(
        &[
            "query",
            "--graph", "g.tsv",
            "--attrs", "attrs.csv",
            "--query", r#"{"shape":"ring","k":3}"#,
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["vertices"], serde_json::json!([0, 1, 2]));
    assert_eq!(json["ged"], 0);
}

#[test]
fn infeasible_query_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.tsv"), "0\t1\n2\t3\n").unwrap();
    std::fs::write(
        dir.path().join("p.csv"),
        "vertex,pvalue\n0,0.01\n1,0.01\n2,0.5\n3,0.5\n",
    )
    .unwrap();
    let out = anomq(
        &[
            "query",
            "--graph", "g.tsv",
            "--pvalues", "p.csv",
            "--query", r#"{"shape":"ring","k":3}"#,
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["feasible"], false);
}

#[test]
fn missing_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = anomq(
        &[
            "query",
            "--graph", "nope.tsv",
            "--pvalues", "nope.csv",
            "--query", r#"{"shape":"ring","k":3}"#,
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(dir.path().join("g.tsv"), "0\t1\nbroken line\n").unwrap();
    std::fs::write(dir.path().join("p.csv"), "vertex,pvalue\n0,0.5\n1,0.5\n").unwrap();
    let out = anomq(
        &[
            "query",
            "--graph", "g.tsv",
            "--pvalues", "p.csv",
            "--query", r#"{"shape":"ring","k":3}"#,
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn oracle_over_limit_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut edges = String::new();
    for i in 0..19 {
        edges.push_str(&format!("{i}\t{}\n", i + 1));
    }
    std::fs::write(dir.path().join("g.tsv"), edges).unwrap();
    let mut pvals = String::from("vertex,pvalue\n");
    for i in 0..20 {
        pvals.push_str(&format!("{i},0.5\n"));
    }
    std::fs::write(dir.path().join("p.csv"), pvals).unwrap();
    let args = [
        "oracle",
        "--graph", "g.tsv",
        "--pvalues", "p.csv",
        "--query", r#"{"shape":"line","k":3}"#,
    ];
    let out = anomq(&args, dir.path());
    assert_eq!(out.status.code(), Some(3));

    // Raising the guard turns it into a normal run.
    let mut with_limit = args.to_vec();
    with_limit.extend(["--limit", "25"]);
    let out = anomq(&with_limit, dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["feasible"], true);
}

#[test]
fn eval_writes_deterministic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{
        "dataset": {"sim": {"n": 60, "topology": "king-grid",
                             "planted_shape": {"shape": "ring", "k": 3}}},
        "queries": [{"shape": "ring", "k": 3}, {"shape": "line", "k": 3}],
        "noise_levels": [5.0, 20.0],
        "trials": 2,
        "seed": 3,
        "measure_runtime": false
    }"#;
    std::fs::write(dir.path().join("exp.json"), spec).unwrap();
    let out = anomq(&["eval", "--spec", "exp.json", "--out", "r1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = anomq(&["eval", "--spec", "exp.json", "--out", "r2"], dir.path());
    assert!(out.status.success());
    for f in ["rows.csv", "aggregates.csv", "results.json"] {
        let a = std::fs::read(dir.path().join("r1").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("r2").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between runs");
    }
    let rows = std::fs::read_to_string(dir.path().join("r1/rows.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn eval_on_file_dataset_scores_against_truth() {
    let dir = tempfile::tempdir().unwrap();
    let out = anomq(
        &[
            "simulate",
            "--n", "150",
            "--shape", r#"{"shape":"star","k":3}"#,
            "--seed", "4",
            "--out-dir", "data",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let spec = r#"{
        "dataset": {"files": {"graph": "data/edges.tsv",
                               "pvalues": "data/pvalues.csv",
                               "truth": "data/truth.json"}},
        "queries": [{"shape": "star", "k": 3}],
        "noise_levels": [0.0],
        "trials": 1,
        "seed": 8,
        "measure_runtime": false
    }"#;
    std::fs::write(dir.path().join("exp.json"), spec).unwrap();
    let out = anomq(&["eval", "--spec", "exp.json", "--out", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = std::fs::read_to_string(dir.path().join("res/rows.csv")).unwrap();
    let data_line = rows.lines().nth(1).unwrap();
    let precision: f64 = data_line.split(',').nth(4).unwrap().parse().unwrap();
    assert_eq!(precision, 1.0, "noise-free planted star should be recovered: {rows}");
}

#[test]
fn bench_prints_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = anomq(
        &["bench", "--sizes", "100,400", "--repeats", "2", "--out", "bench.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("log-log slope"), "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bench.json")).unwrap())
            .unwrap();
    assert_eq!(json["schema"], "anomq/v1");
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
}
