//! End-to-end tests of the command-line surface: formats, exit codes,
//! determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strebel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn critical_constants_json_and_determinism() {
    let first = stdout(&["critical"]);
    assert!(first.starts_with("{\"u_c\":2.5843996"));
    assert!(first.contains("\"m_c\":1.9025660"));
    assert!(first.contains("\"C\":18.6907"));
    let second = stdout(&["critical"]);
    assert_eq!(first, second, "identical configs must be byte-identical");
}

#[test]
fn volumes_table_low_rows() {
    let out = stdout(&["volumes", "--n-max", "2"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,value_numerator,value_denominator,float_value,log_exact,log_asymptotic,ratio"
    );
    let rows: Vec<&str> = lines.collect();
    assert!(rows[0].starts_with("0,1,2,0.5,"));
    assert!(rows[1].starts_with("1,1,2,0.5,"));
    assert!(rows[2].starts_with("2,45,64,0.703125,"));
}

#[test]
fn stratum_volume_rational_output() {
    let out = stdout(&["stratum", "--perimeters", "1,1,1,2"]);
    assert!(out.contains("\"volume\":\"7/8\""));
    assert!(out.contains("\"degree\":2"));

    let uniform = stdout(&["stratum", "--perimeters", "1,1,1,1,1"]);
    assert!(uniform.contains("\"volume\":\"45/64\""));
}

#[test]
fn one_point_exact_and_regimes() {
    let out = stdout(&["one-point", "--N", "1", "--ratio", "1"]);
    assert!(out.contains("\"exact\":\"1/2\""));
    assert!(out.contains("\"coefficients\":[\"3/8\",\"1/8\"]"));
    assert!(out.contains("\"regime1_log\":"));
}

#[test]
fn h_values() {
    let out = stdout(&["h", "--mu", "0.5"]);
    assert!(out.contains("\"H\":"));
    assert!(out.contains("\"d3H_dmu3\":"));
}

#[test]
fn curve_json_and_csv() {
    let out = stdout(&[
        "curve", "--m", "0.9", "--order", "8", "--emit", "-", "--steps", "4", "--z-max", "1",
    ]);
    assert!(out.contains("\"m\":0.9"));
    assert!(out.contains("\"times\":["));
    assert!(out.contains("z,x,y\n"));
    assert!(out.lines().count() >= 6);
}

#[test]
fn blowup_json() {
    let out = stdout(&["blowup", "--eps", "1e-6"]);
    assert!(out.contains("\"x_tilde\":["));
    assert!(out.contains("\"py_measured\":"));
}

#[test]
fn zhat_value_and_series() {
    let out = stdout(&["zhat", "--n", "3", "--ratios", "1,1,1", "--m", "0.5"]);
    assert!(out.contains("\"value\":"));
    let series = stdout(&[
        "zhat",
        "--n",
        "3",
        "--ratios",
        "1,1,1",
        "--m",
        "0",
        "--series-order",
        "4",
    ]);
    assert!(series.starts_with("k,coefficient_numerator,coefficient_denominator"));
    // m^3 coefficient: the six-unit-face volume over 3! = (83/64)/6
    assert!(series.lines().any(|l| l == "3,83,384"));
}

#[test]
fn fit_kpz_json_summary() {
    let out = stdout(&[
        "fit-kpz",
        "--n",
        "3",
        "--window",
        "1e-5,1e-3",
        "--points",
        "7",
        "--format",
        "json",
    ]);
    assert!(out.contains("\"slope\":-"));
}

#[test]
fn check_suite_runs_clean() {
    let out = stdout(&["check", "--suite", "intersections"]);
    assert!(out.contains("ok   intersections"));
    assert!(out.contains("0 failed"));
}

#[test]
fn usage_error_exits_2() {
    let out = run(&["volumes"]); // missing --n-max
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_error_exits_3() {
    let out = run(&["curve", "--m", "99"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain"));
}

#[test]
fn unknown_suite_exits_3() {
    let out = run(&["check", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(3));
}
