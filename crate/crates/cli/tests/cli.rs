use std::path::PathBuf;
use std::process::{Command, Output};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn hornex(dir: &tempfile::TempDir, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hornex"))
        .args(args)
        .current_dir(dir.path())
        .env("HORNEX_DATA_DIR", data_dir())
        .output()
        .unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| hornex(&dir, args).status.code();

    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(
        code(&["learn", "--data", "zoo.csv", "--out", "h.jsonl", "--bogus"]),
        Some(1)
    );
    assert_eq!(
        code(&[
            "learn",
            "--data",
            "zoo.csv",
            "--out",
            "h.jsonl",
            "--epsilon",
            "0",
            "--delta",
            "0.1"
        ]),
        Some(1)
    );
    assert_eq!(
        code(&[
            "learn",
            "--data",
            "missing.csv",
            "--out",
            "h.jsonl",
            "--epsilon",
            "0.1",
            "--delta",
            "0.1"
        ]),
        Some(1)
    );
    assert!(!dir.path().join("h.jsonl").exists());

    let capped = [
        "learn",
        "--data",
        "zoo.csv",
        "--out",
        "h.jsonl",
        "--epsilon",
        "0.01",
        "--delta",
        "0.1",
    ];
    assert_eq!(
        code(&[&capped[..], &["--max-counterexamples", "3"]].concat()),
        Some(2)
    );
    assert_eq!(
        code(&[
            "exact-basis",
            "--data",
            "zoo.csv",
            "--out",
            "dg.jsonl",
            "--budget",
            "10"
        ]),
        Some(2)
    );
    assert!(!dir.path().join("dg.jsonl").exists());
    assert_eq!(
        code(&["bench", "--data", "zoo.csv", "--epsilon", "0.0001"]),
        Some(1)
    );
}

#[test]
fn learned_formula_round_trips_through_eval() {
    let dir = tempfile::tempdir().unwrap();
    let out = hornex(
        &dir,
        &[
            "learn",
            "--data",
            "zoo.csv",
            "--epsilon",
            "0.1",
            "--delta",
            "0.1",
            "--out",
            "h.jsonl",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["wall_time_ms"].is_null());
    let size = report["hypothesis_size"].as_u64().unwrap();
    let lines = std::fs::read_to_string(dir.path().join("h.jsonl"))
        .unwrap()
        .lines()
        .count() as u64;
    assert_eq!(size, lines);

    let out = hornex(
        &dir,
        &[
            "eval",
            "--data",
            "zoo.csv",
            "--basis",
            "h.jsonl",
            "--samples",
            "500",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let eval: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(eval["samples"], 500);
    assert_eq!(eval["basis_size"].as_u64(), Some(size));
    assert!(eval["eta"].is_null());
}

#[test]
fn random_like_zoo_keeps_its_shape_and_valid_hypotheses_hold() {
    let dir = tempfile::tempdir().unwrap();
    let out = hornex(
        &dir,
        &[
            "gen-random",
            "--like",
            "zoo.csv",
            "--seed",
            "3",
            "--out",
            "r.cxt",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("r.cxt")).unwrap();
    let header: Vec<&str> = text.lines().take(5).collect();
    assert_eq!(header[0], "B");
    assert_eq!((header[2], header[3]), ("101", "28"));

    let out = hornex(
        &dir,
        &[
            "learn",
            "--data",
            "r.cxt",
            "--epsilon",
            "0.1",
            "--delta",
            "0.1",
            "--valid-hypothesis",
            "--out",
            "h.jsonl",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = hornex(
        &dir,
        &[
            "eval",
            "--data",
            "r.cxt",
            "--basis",
            "h.jsonl",
            "--samples",
            "1000",
        ],
    );
    let eval: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(eval["fraction_valid"], 1.0);
}
