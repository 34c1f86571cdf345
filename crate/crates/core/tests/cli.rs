use std::process::Command;

use growthlab::cli;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["growthlab"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = vec!["--format", "json"];
    a.extend_from_slice(args);
    let (code, out, err) = run(&a);
    assert!(code != cli::EXIT_INPUT, "{args:?}: {err}");
    (code, serde_json::from_str(&out).unwrap())
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_growthlab"))
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
    assert_eq!(run(&["ball", "--help"]).0, 0);
}

#[test]
fn input_errors_exit_three() {
    for args in [
        &["ball", "--group", "builtin:nope"][..],
        &["ball"],
        &["ball", "--radius", "x", "--group", "builtin:zd:1"],
        &["--C", "1", "constants", "epsilon", "--d", "1"],
        &["--precision", "0", "constants", "epsilon", "--d", "1"],
        &["gap", "--C0", "10"],
        &["frobnicate"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, cli::EXIT_INPUT, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn ball_csv_rows() {
    let (code, out, _) = run(&["--format", "csv", "ball", "--group", "builtin:heisenberg", "--radius", "8"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0], "0,1");
    assert_eq!(rows[8], "8,1793");
}

#[test]
fn json_envelope() {
    let (code, v) = json(&["ball", "--group", "builtin:zd:2", "--radius", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "ball");
    assert_eq!(v["exit_code"], 0);
    assert_eq!(v["config"]["precision"], 128);
    assert!(v["result"].is_object());
}

#[test]
fn coxeter_limit_form() {
    let (_, out, _) = run(&["coxeter", "--family", "Btilde4", "--limit"]);
    assert!(out.contains("128/35"), "{out}");
    let (code, v) = json(&["coxeter", "--family", "Gtilde2", "--limit"]);
    assert_eq!(code, 0);
    assert!(v["result"].to_string().contains("6/5"), "{v}");
}

#[test]
fn group_file_input() {
    let path = std::env::temp_dir().join(format!("growthlab-cli-test-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"type":"IntegerMatrixGroup","dimension":3,"generators":[[[1,1,0],[0,1,0],[0,0,1]],[[1,0,0],[0,1,1],[0,0,1]]]}"#).unwrap();
    let (code, out, err) = run(&["--format", "csv", "ball", "--group-file", path.to_str().unwrap(), "--radius", "4"]);
    std::fs::write(&path, "not json").unwrap();
    let (bad, _, _) = run(&["ball", "--group-file", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().last(), Some("4,135"));
    assert_eq!(bad, cli::EXIT_INPUT);
}

#[test]
fn verify_growth_reports() {
    let (code, v) = json(&["verify-growth", "--group", "builtin:heisenberg", "--radius", "6"]);
    assert_eq!(code, 0);
    assert!(!v["result"].to_string().contains("Violated"));
    let (code, _) = json(&["verify-growth", "--group", "builtin:cyclic:4", "--radius", "4"]);
    assert_eq!(code, 0);
}

#[test]
fn constants_subcommands() {
    for args in [
        &["constants", "minkowski", "--k", "3"][..],
        &["constants", "nilp", "--d", "2", "--n", "4"],
        &["constants", "epsilon", "--d", "3"],
        &["constants", "iso", "--d", "2", "--a", "25"],
        &["constants", "loop-erased", "--delta", "4"],
    ] {
        let (code, v) = json(args);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(v["schema_version"], 1);
    }
    let (_, out, _) = run(&["constants", "minkowski", "--k", "3"]);
    assert!(out.contains("720"), "{out}");
}

#[test]
fn words_and_heat() {
    let (code, _) = json(&["words", "--k", "3", "--word", "x1 x2 X1 X2", "--group", "builtin:heisenberg"]);
    assert_eq!(code, 0);
    let (code, v) = json(&["heat", "--group", "builtin:zd:1", "--steps", "4"]);
    assert_eq!(code, 0);
    assert!(v["result"].to_string().contains("35/128"), "{v}");
}

#[test]
fn binary_exit_codes() {
    let s = binary().args(["gap"]).status().unwrap();
    assert_eq!(s.code(), Some(cli::EXIT_UNDECIDED));
    let s = binary().args(["constants", "epsilon", "--d", "1"]).env(cli::PRECISION_ENV, "lots").output().unwrap();
    assert_eq!(s.status.code(), Some(cli::EXIT_INPUT));
    let s = binary().args(["--format", "json", "constants", "epsilon", "--d", "1"]).env(cli::PRECISION_ENV, "512").output().unwrap();
    assert_eq!(s.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&s.stdout).unwrap();
    assert_eq!(v["config"]["precision"], 512);
    let s = binary().args(["--format", "json", "--precision", "256", "constants", "epsilon", "--d", "1"]).env(cli::PRECISION_ENV, "512").output().unwrap();
    let v: Value = serde_json::from_slice(&s.stdout).unwrap();
    assert_eq!(v["config"]["precision"], 256);
}
