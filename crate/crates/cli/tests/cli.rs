//! End-to-end tests of the `transguard` binary.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_transguard"))
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn transguard");
    // The write may hit a broken pipe when the binary rejects its arguments
    // before reading stdin; that is a legitimate outcome, not a test failure.
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    child.wait_with_output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const JAVA_WITH_MAIN: &str = "class GFG { static int f_gold ( int arr [ ] , int n ) { int s = 0 ; for ( int i = 0 ; i < n ; i ++ ) { s = s + arr [ i ] ; } return s ; } public static void main ( String [ ] args ) { System . out . println ( 0 ) ; } }";

#[test]
fn preprocess_extracts_focal_and_rewrites_arrays() {
    let out = run_with_stdin(&["preprocess", "-", "--direction", "j2p"], JAVA_WITH_MAIN);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(!text.contains("main"), "context not removed:\n{text}");
    assert!(
        text.contains("List < Integer > arr"),
        "array param kept:\n{text}"
    );
    assert!(
        text.contains("arr . get ( i )"),
        "array access kept:\n{text}"
    );
}

#[test]
fn preprocess_respects_rule_selection() {
    let out = run_with_stdin(
        &["preprocess", "-", "--direction", "j2p", "--rules", "r1"],
        JAVA_WITH_MAIN,
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.contains("main"));
    assert!(
        text.contains("int arr [ ]"),
        "r3a ran though unselected:\n{text}"
    );
}

#[test]
fn missing_direction_is_usage_error() {
    let out = run_with_stdin(&["preprocess", "-"], "def f_gold ( ) :\n\tpass\n");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_direction_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "config.json",
        r#"{"direction":"p2j","rules":"r1"}"#,
    );
    // Config alone drives a p2j preprocess of a Python file.
    let src = write(
        dir.path(),
        "in.py",
        "def f_gold ( a ) :\n\treturn a\nprint ( f_gold ( 1 ) )\n",
    );
    let out = bin()
        .args([
            "preprocess",
            src.to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(
        !stdout(&out).contains("print"),
        "context kept: {}",
        stdout(&out)
    );
    // An explicit flag overrides the file value: read as Java (j2p), the
    // Python text contains no recognizable focal method, so nothing is
    // extracted and the rule reports a skip.
    let out = bin()
        .args([
            "preprocess",
            src.to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
            "--direction",
            "j2p",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("print"),
        "flag did not win: {}",
        stdout(&out)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
}

#[test]
fn postprocess_prunes_appended_clause() {
    let dir = tempfile::tempdir().unwrap();
    let src = write(
        dir.path(),
        "src.py",
        "def f_gold ( x ) :\n\tc = 0\n\twhile x != 0 :\n\t\tc = c + 1\n\t\tx = x / 10\n\treturn c\n",
    );
    let dst = write(
        dir.path(),
        "dst.java",
        "static int f_gold ( int x ) { int c = 0 ; while ( ( x != 0 ) && ( x % 10 == 0 ) ) { c = c + 1 ; x = x / 10 ; } return c ; }",
    );
    let records = dir.path().join("records.json");
    let out = bin()
        .args([
            "postprocess",
            dst.to_str().unwrap(),
            "--source",
            src.to_str().unwrap(),
            "--direction",
            "p2j",
            "--records",
            records.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("while ( x != 0 )"), "clause kept: {text}");
    assert!(!text.contains("x % 10"), "junk clause kept: {text}");
    let records: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(records).unwrap()).unwrap();
    assert!(records
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["applied"] == true));
}

#[test]
fn pipeline_on_empty_file_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.py", "");
    let out = bin()
        .args([
            "pipeline",
            empty.to_str().unwrap(),
            "--direction",
            "p2j",
            "--mock",
            "identity",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn pipeline_translator_failure_exits_3() {
    let out = run_with_stdin(
        &[
            "pipeline",
            "-",
            "--direction",
            "j2p",
            "--translator-cmd",
            "false",
        ],
        "static int f_gold ( int a ) { return a ; }",
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn pipeline_json_keeps_stdout_machine_readable() {
    let out = run_with_stdin(
        &[
            "pipeline",
            "-",
            "--direction",
            "j2p",
            "--mock",
            "identity",
            "--json",
        ],
        JAVA_WITH_MAIN,
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("pure JSON stdout");
    assert!(result["postprocessed"].is_string());
    assert!(result["records"].as_array().is_some_and(|r| !r.is_empty()));
}

#[test]
fn detect_collapse_reports_import_spam() {
    let dir = tempfile::tempdir().unwrap();
    let spam = write(
        dir.path(),
        "out.py",
        "import numpy\nimport numpy\nimport numpy\nimport numpy , numpy , stream , numpy\n",
    );
    let out = bin()
        .args([
            "detect-collapse",
            spam.to_str().unwrap(),
            "--lang",
            "python",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "ImportSpam");
}

#[test]
fn detect_collapse_clean_method() {
    let out = run_with_stdin(
        &["detect-collapse", "-", "--lang", "python"],
        "def f_gold ( a , b ) :\n\treturn a + b\n",
    );
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "clean");
}

#[test]
fn eval_produces_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("java")).unwrap();
    std::fs::create_dir(dir.path().join("python")).unwrap();
    write(
        &dir.path().join("java"),
        "case_0.java",
        "static int f_gold ( int a , int b ) { return a + b ; }",
    );
    write(
        &dir.path().join("python"),
        "case_1.py",
        "def f_gold ( a ) :\n\treturn a\n",
    );
    let out = bin()
        .args([
            "eval",
            dir.path().to_str().unwrap(),
            "--direction",
            "j2p",
            "--mock",
            "identity",
            "--report",
            "json",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["total"], 1);
    assert_eq!(report["rows"].as_array().unwrap().len(), 6);
}
