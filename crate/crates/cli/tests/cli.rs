//! The `sarhrl` binary as a user runs it.

use std::process::{Command, Output};

use serde_json::Value;

fn sarhrl(args: &[&str], cwd: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarhrl")).args(args).current_dir(cwd).output().unwrap()
}

fn repo(path: &str) -> String {
    format!("{}/../../{path}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn extract_prints_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = sarhrl(&["extract", "fire near the old warehouse"], dir.path());
    assert!(out.status.success());
    let records: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(records.as_array().unwrap().len(), 1);
    assert_eq!(records[0]["info_type"], "Z");
    assert_eq!(records[0]["polarity"], "avoid");
    assert_eq!(records[0]["cells"], serde_json::json!([[6, 5]]));
}

#[test]
fn eval_of_missing_tables_fails_with_cannot_open() {
    let dir = tempfile::tempdir().unwrap();
    let out = sarhrl(&["eval", "missing.bin", &repo("maps/default_map.json")], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot open"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sarhrl(&["--no-such-flag"], dir.path()).status.code(), Some(2));
    assert_eq!(sarhrl(&["train"], dir.path()).status.code(), Some(2));
    assert_eq!(sarhrl(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn train_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let out = sarhrl(&["train", &repo("configs/hrl_att.json"), "--runs", "2", "--episodes", "400"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run_dir = std::path::PathBuf::from(String::from_utf8_lossy(&out.stdout).lines().next().unwrap());
    let run_dir = dir.path().join(run_dir);
    assert!(run_dir.starts_with(dir.path().join("out/hrl_att")));
    for f in ["curve.csv", "manifest.json", "tables.bin", "runs.csv"] {
        assert!(run_dir.join(f).is_file(), "{f} missing");
    }
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(run_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["runs"], 2);
    assert_eq!(manifest["config"]["params"]["episodes"], 400);

    let tables = run_dir.join("tables.bin");
    let out = sarhrl(&["eval", tables.to_str().unwrap(), &repo("maps/default_map.json"), "--json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let eval: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(eval["variant"], "hrl_att");
    assert!(eval["steps"].as_u64().unwrap() > 0);
}

#[test]
fn bad_config_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"variant":"hrl","reward_mode":"sparse","runs":0}"#).unwrap();
    let out = sarhrl(&["train", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("runs must be positive"));
    assert!(!dir.path().join("out").exists(), "nothing is written for a rejected config");
}
