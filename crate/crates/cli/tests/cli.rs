use std::process::Command;

use concentrate_cli::{run_with, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("concentrate").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

/// Header and data rows of a CSV record, skipping `#` metadata lines.
fn table(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let body: String = csv_text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header = reader.headers().unwrap().iter().map(str::to_string).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect();
    (header, rows)
}

fn field(csv_text: &str, row: usize, column: &str) -> String {
    let (header, rows) = table(csv_text);
    let j = header.iter().position(|h| h == column).unwrap_or_else(|| panic!("no column {column}"));
    rows[row][j].clone()
}

fn number(csv_text: &str, row: usize, column: &str) -> f64 {
    field(csv_text, row, column).parse().unwrap()
}

#[test]
fn info_example() {
    let r = run(&["info", "--spectrum", "0.75,0.25"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(field(&r.stdout, 0, "dim"), "2");
    assert!((number(&r.stdout, 0, "entropy") - 0.811_278_124_459_132_9).abs() < 1e-15);
    assert!((number(&r.stdout, 0, "min_entropy") - 0.415_037_499_278_843_8).abs() < 1e-15);
    assert!((number(&r.stdout, 0, "uniform_divergence") - 0.207_518_749_639_421_9).abs() < 1e-15);
    assert_eq!(field(&r.stdout, 0, "deterministic_yield"), "1");
}

#[test]
fn finite_example() {
    let r = run(&["finite", "--spectrum", "0.5,0.3,0.2", "--size", "3"]);
    assert_eq!(r.code, EXIT_OK);
    assert!((number(&r.stdout, 0, "success_prob") - 0.6).abs() < 1e-12);
    assert!((number(&r.stdout, 0, "threshold") - 0.2).abs() < 1e-12);
    assert_eq!(field(&r.stdout, 0, "cut_index"), "3");
    let all = run(&["finite", "--spectrum", "0.5,0.3,0.2"]);
    assert_eq!(table(&all.stdout).1.len(), 3);
}

#[test]
fn yield_example() {
    let r = run(&["yield", "--spectrum", "0.75,0.25", "--r", "1.0", "--kind", "direct"]);
    assert_eq!(r.code, EXIT_OK);
    assert!((number(&r.stdout, 0, "yield") - 0.415_037).abs() < 1e-6);
    assert_eq!(field(&r.stdout, 0, "regime"), "saturated");
    let all = run(&["yield", "--spectrum", "0.75,0.25", "--r", "0.1"]);
    let kinds: Vec<String> = (0..4).map(|i| field(&all.stdout, i, "kind")).collect();
    assert_eq!(kinds, ["direct", "converse", "fidelity_direct", "fidelity_converse"]);
}

#[test]
fn csv_and_json_agree() {
    let args = ["sweep", "--spectrum", "0.6,0.3,0.1", "--r-grid", "0.02:1.2:30"];
    let csv_run = run(&args);
    let json_run = run(&[&args[..], &["--format", "json"]].concat());
    assert_eq!((csv_run.code, json_run.code), (EXIT_OK, EXIT_OK));
    let json: Value = serde_json::from_str(&json_run.stdout).unwrap();
    let (header, rows) = table(&csv_run.stdout);
    assert_eq!(rows.len(), 30);
    for (i, row) in rows.iter().enumerate() {
        for (column, cell) in header.iter().zip(row) {
            let v = &json["rows"][i][column];
            match v {
                Value::Number(n) => assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{column}"),
                Value::String(s) => assert_eq!(cell, s),
                Value::Null => assert!(cell.is_empty()),
                Value::Bool(b) => assert_eq!(cell, &b.to_string()),
                other => panic!("unexpected {other}"),
            }
        }
    }
    assert_eq!(json["meta"]["spectrum"], "0.6,0.3,0.1");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["info"]).code, EXIT_USAGE);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    std::fs::write(&path, "0.5\n0.5\n").unwrap();
    let both = run(&["info", "--spectrum", "1", "--spectrum-file", path.to_str().unwrap()]);
    assert_eq!(both.code, EXIT_USAGE);
    assert!(!both.stderr.is_empty());
    assert_eq!(run(&["converge", "--spectrum", "0.75,0.25", "--rate", "0.6", "--n-list", "5..1..1"]).code, EXIT_USAGE);
    assert_eq!(run(&["sweep", "--spectrum", "0.75,0.25", "--r-grid", "0.5:0.1:3"]).code, EXIT_USAGE);
    assert_eq!(run(&["yield", "--spectrum", "0.75,0.25", "--r", "0.1", "--kind", "sideways"]).code, EXIT_USAGE);
    assert_eq!(run(&["converge", "--spectrum", "0.75,0.25", "--rate", "0.6", "--kind", "fidelity-direct"]).code, EXIT_USAGE);
    assert_eq!(run(&["--help"]).code, EXIT_OK);
}

#[test]
fn domain_errors_exit_one() {
    let r = run(&["converge", "--spectrum", "0.75,0.25", "--rate", "0.3", "--json-errors"]);
    assert_eq!(r.code, EXIT_DOMAIN);
    let v: Value = serde_json::from_str(r.stdout.trim()).unwrap();
    assert_eq!(v["error"]["kind"], "RateOutOfRange");
    assert_eq!(v["error"]["exit_code"], 1);

    let r = run(&["info", "--spectrum", "0.5,0.4"]);
    assert_eq!(r.code, EXIT_DOMAIN);
    assert!(r.stderr.contains("sums to"));
    assert_eq!(run(&["info", "--spectrum", "0.5,0.4", "--renormalize"]).code, EXIT_OK);
    assert_eq!(run(&["finite", "--spectrum", "0.5,0.5", "--size", "3"]).code, EXIT_DOMAIN);
    assert_eq!(run(&["info", "--spectrum", "0.5,-0.1,0.6"]).code, EXIT_DOMAIN);
}

#[test]
fn spectrum_file_with_comments() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    std::fs::write(&path, "# skewed qubit\n3\n1  # minor\n").unwrap();
    let path = path.to_str().unwrap();
    assert_eq!(run(&["info", "--spectrum-file", path]).code, EXIT_DOMAIN);
    let r = run(&["info", "--spectrum-file", path, "--renormalize"]);
    assert_eq!(r.code, EXIT_OK);
    assert!((number(&r.stdout, 0, "min_entropy") - 0.415_037_499_278_843_8).abs() < 1e-15);
}

#[test]
fn converge_writes_the_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let r = run(&["converge", "--spectrum", "0.75,0.25", "--rate", "0.6", "--n-list", "50..200..50", "--out", out.to_str().unwrap()]);
    assert!(r.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# seed=20021120"));
    assert!(text.contains("# rng=ChaCha8Rng"));
    assert_eq!(table(&text).1.len(), 4);
    // The last residual at n = 200 is above the default tolerance.
    assert_eq!(r.code, EXIT_DOMAIN);
    let loose = run(&["converge", "--spectrum", "0.75,0.25", "--rate", "0.6", "--n-list", "50..200..50", "--tolerance", "0.1"]);
    assert_eq!(loose.code, EXIT_OK);
}

#[test]
fn nonadd_and_fidelity_records() {
    let r = run(&["nonadd", "--spectrum", "0.75,0.25", "--r", "0.2"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(field(&r.stdout, 0, "strictly_superadditive"), "true");
    let r = run(&["nonadd", "--spectrum", "0.75,0.25", "--sigma", "0.5,0.3,0.2", "--r-grid", "0.05:0.5:4"]);
    assert_eq!(table(&r.stdout).1.len(), 4);
    assert_eq!(run(&["nonadd", "--spectrum", "0.75,0.25"]).code, EXIT_USAGE);

    let r = run(&["fidelity", "--spectrum", "0.3,0.25,0.25,0.2"]);
    assert_eq!(r.code, EXIT_OK);
    let (_, rows) = table(&r.stdout);
    assert!(rows.iter().all(|row| row.last().unwrap() == "true"));
}

#[test]
fn check_with_corrupted_tolerance_fails() {
    let r = run(&["check", "--seed", "4", "--tolerance", "-1"]);
    assert_eq!(r.code, EXIT_DOMAIN);
    let (header, rows) = table(&r.stdout);
    let pass = header.iter().position(|h| h == "pass").unwrap();
    assert!(rows.iter().any(|row| row[pass] == "false"));
}

#[test]
fn thread_cap_is_validated() {
    let bin = env!("CARGO_BIN_EXE_concentrate");
    let bad = Command::new(bin).args(["info", "--spectrum", "1"]).env("CONCENTRATE_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    let one = Command::new(bin)
        .args(["sweep", "--spectrum", "0.75,0.25", "--r-grid", "0.1:1:10"])
        .env("CONCENTRATE_THREADS", "1")
        .output()
        .unwrap();
    let auto = Command::new(bin).args(["sweep", "--spectrum", "0.75,0.25", "--r-grid", "0.1:1:10"]).output().unwrap();
    assert_eq!(one.status.code(), Some(EXIT_OK));
    assert_eq!(one.stdout, auto.stdout);
}
