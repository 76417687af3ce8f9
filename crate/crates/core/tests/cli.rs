use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use congruent::regression::{EXTRA_GENERATORS, FIXTURE_GENERATORS};

fn congruent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_congruent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn classify_table() {
    let out = congruent(&["--format", "table", "classify", "157"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "n,congruent,count_32,count_8\n157,true,0,0\n");
    let out = congruent(&["classify", "113"]);
    assert!(stdout(&out).contains("non-congruent"));
}

#[test]
fn usage_and_validation_codes() {
    assert_eq!(congruent(&["classify"]).status.code(), Some(1));
    assert_eq!(congruent(&["classify", "12"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"t\": 6, \"rank\": 1, \"gens\": [[\"-3\", \"10\"]]}\n").unwrap();
    let out = congruent(&["scan", "--gens", path(&bad), "--box", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn scan_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let gens = dir.path().join("gens.jsonl");
    fs::write(&gens, format!("{FIXTURE_GENERATORS}{EXTRA_GENERATORS}")).unwrap();
    let reports = dir.path().join("reports");
    fs::create_dir(&reports).unwrap();
    let report = reports.join("scan.json");
    let out = congruent(&["--out", path(&report), "--threads", "2", "scan", "--gens", path(&gens), "--box", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let table = congruent(&["--format", "table", "scan", "--gens", path(&gens), "--box", "3"]);
    let rows = stdout(&table);
    let e210 = rows.lines().find(|l| l.starts_with("210,")).expect("row for 210");
    assert_eq!(e210.split(',').nth(4), Some("8"));

    let out = congruent(&["plot-data", "--reports", path(&reports)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,ln_h,rank"));
    assert!(text.contains("\n6,1.609437912,1\n"));
    let ln_157: f64 = text
        .lines()
        .find(|l| l.starts_with("157,"))
        .and_then(|l| l.split(',').nth(1))
        .and_then(|v| v.parse().ok())
        .expect("row for 157");
    assert!(ln_157 > 100.0);

    let out = congruent(&["plot-data", "--scale", "loglog", "--reports", path(&report)]);
    assert!(stdout(&out).starts_with("ln_t,ln_h,rank\n"));
}

#[test]
fn output_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let gens = dir.path().join("gens.jsonl");
    fs::write(&gens, FIXTURE_GENERATORS).unwrap();
    let run = |threads: &str| stdout(&congruent(&["--threads", threads, "scan", "--gens", path(&gens), "--box", "4"]));
    assert_eq!(run("1"), run("3"));
}

#[test]
fn verify_subcommand_runs() {
    let out = congruent(&["verify-paper"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("9 checks, 0 failed"), "{text}");
}
