use std::process::{Command, Output};

use serde_json::Value;

fn codrisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codrisk"))
        .args(args)
        .output()
        .expect("run codrisk")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = codrisk(&all);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv(args: &[&str]) -> Vec<Vec<String>> {
    let mut all = vec!["--format", "csv"];
    all.extend_from_slice(args);
    let out = codrisk(&all);
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn threshold_matches_known_value() {
    let v = json(&["threshold", "--g", "power:0.3", "--x", "gamma:0.5,1"]);
    assert!((v["u_g"].as_f64().unwrap() - 0.9714).abs() < 2e-3);
}

#[test]
fn csv_has_header_and_round_trips_floats() {
    let rows = csv(&["dmeasure", "--g", "es:0.5", "--x", "exp:1"]);
    assert_eq!(rows.len(), 2);
    let col = rows[0].iter().position(|h| h == "value").unwrap();
    let v: f64 = rows[1][col].parse().unwrap();
    // mean of the upper half of exp(1)
    assert!((v - (1.0 + 2f64.ln())).abs() < 1e-8);
    let again = json(&["dmeasure", "--g", "es:0.5", "--x", "exp:1"]);
    assert_eq!(again["value"].as_f64().unwrap(), v);
}

#[test]
fn cod_with_threshold_override() {
    let by_g = json(&[
        "cod",
        "--model",
        "gumbel:2,normal:0,1,normal:0,1",
        "--g",
        "es:0.9",
        "--h",
        "power:2",
    ]);
    let u = by_g["u_g"].as_f64().unwrap().to_string();
    let by_u = json(&[
        "cod",
        "--model",
        "gumbel:2,normal:0,1,normal:0,1",
        "--u",
        &u,
        "--h",
        "power:2",
    ]);
    assert!((by_g["value"].as_f64().unwrap() - by_u["value"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn delta_vanishes_under_independence() {
    let v = json(&[
        "delta",
        "--model",
        "indep,normal:0,1,gamma:2,1",
        "--u",
        "0.9",
        "--h",
        "es:0.7",
    ]);
    assert!(v["value"].as_f64().unwrap().abs() < 1e-7);
}

#[test]
fn delta2_same_threshold_is_zero() {
    let v = json(&[
        "delta2",
        "--model",
        "fgm:-0.5,normal:0,1,exp:1",
        "--u",
        "0.8",
        "--u-tilde",
        "0.8",
        "--h",
        "power:2",
    ]);
    assert!(v["value"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn classic_comonotonic_covar() {
    let v = json(&[
        "classic",
        "--model",
        "comono,normal:0,1,exp:1",
        "--alpha",
        "0.9",
        "--beta",
        "0.5",
    ]);
    let want = -(1.0f64 - 0.95).ln();
    assert!((v["covar"].as_f64().unwrap() - want).abs() < 1e-6);
}

#[test]
fn order_verdicts_set_exit_code() {
    let ok = codrisk(&[
        "check-order",
        "--x",
        "normal:0,1",
        "--y",
        "normal:0,2",
        "--order",
        "icx",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let no = codrisk(&[
        "check-order",
        "--x",
        "normal:0,1",
        "--y",
        "normal:0,2",
        "--order",
        "st",
    ]);
    assert_eq!(no.status.code(), Some(2));
}

#[test]
fn dependence_checks() {
    let v = json(&["check-dep", "--copula", "gumbel:2", "--notion", "PDS"]);
    assert_eq!(v["holds"], Value::Bool(true));
    let out = codrisk(&["check-dep", "--copula", "fgm:-0.5", "--notion", "PQD"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn psi_curve_and_verdict() {
    let rows = csv(&[
        "psi",
        "--copula",
        "gumbel:2",
        "--u",
        "0.9",
        "--h",
        "dual:power:1.1",
        "--curve",
        "--grid",
        "20",
    ]);
    assert_eq!(rows.len(), 22);
    let out = codrisk(&[
        "psi",
        "--copula",
        "gumbel:2",
        "--u",
        "0.9",
        "--h",
        "dual:power:1.1",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn figure_csv_rows() {
    let out = codrisk(&["--grid", "10", "figure", "2b"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("figure,series,x,y"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 10);
    assert!(rows.iter().all(|r| r.starts_with("2b,")));
}

#[test]
fn figure_writes_gnuplot_script() {
    let dir = std::env::temp_dir().join(format!("codrisk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let data = dir.join("f.csv");
    let script = dir.join("f.gp");
    let out = codrisk(&[
        "--grid",
        "8",
        "--out",
        data.to_str().unwrap(),
        "figure",
        "1a",
        "--gnuplot",
        script.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&data)
        .unwrap()
        .starts_with("figure,series,x,y"));
    assert!(std::fs::read_to_string(&script).unwrap().contains("plot "));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn oracle_is_reproducible_per_seed() {
    let args = [
        "oracle",
        "--model",
        "fgm:-0.5,normal:0,1,exp:1",
        "--u",
        "0.9",
        "--h",
        "es:0.5",
        "--n",
        "20000",
    ];
    let a = json(&args);
    let b = json(&args);
    assert_eq!(a, b);
    let mut other = vec!["--seed", "7"];
    other.extend_from_slice(&args);
    let c = json(&other);
    assert_ne!(a["mean"], c["mean"]);
    assert_eq!(c["seed"], 7);
}

#[test]
fn exit_codes_for_bad_input() {
    let parse = codrisk(&[
        "cod",
        "--model",
        "gumbel:2,normal:0,1",
        "--u",
        "0.5",
        "--h",
        "power:2",
    ]);
    assert_eq!(parse.status.code(), Some(4));
    let missing = codrisk(&[
        "cod",
        "--model",
        "gumbel:2,normal:0,1,normal:0,1",
        "--h",
        "power:2",
    ]);
    assert_eq!(missing.status.code(), Some(4));
    let figure = codrisk(&["figure", "9z"]);
    assert_eq!(figure.status.code(), Some(4));
    let degenerate = codrisk(&[
        "cod",
        "--model",
        "gumbel:2,normal:0,1,normal:0,1",
        "--u",
        "1",
        "--h",
        "power:2",
    ]);
    assert_eq!(degenerate.status.code(), Some(3));
    assert_eq!(codrisk(&["--help"]).status.code(), Some(0));
}
