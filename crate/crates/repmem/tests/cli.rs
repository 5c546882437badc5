//! End-to-end checks of the `repmem` binary: output values, formats, exit
//! codes, and run-to-run determinism.

use std::process::{Command, Output};

fn repmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repmem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn analytic_idle_semiconductor_value() {
    let out = repmem(&[
        "analytic", "--formula", "idle", "--t1", "inf", "--t2star", "1", "--t", "0.1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.starts_with("0.968279139"),
        "unexpected idle fidelity output: {text}"
    );
}

#[test]
fn breakeven_prints_published_line() {
    let out = repmem(&[
        "breakeven", "--decomp", "cscz", "--t1", "inf", "--t2star", "1", "--t", "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.starts_with("p2 < 0.019 - 1.3*p1"),
        "unexpected break-even output: {text}"
    );
    assert!(text.contains("c0 = 0.0185"));
}

#[test]
fn simulate_matches_analytic_phase() {
    let sim = repmem(&[
        "simulate", "--code", "phase", "--decomp", "ideal", "--n", "3", "--cycles", "1",
        "--reset", "--t1", "10", "--t2star", "1", "--ttot", "0.5", "--p1", "0", "--p2", "0",
    ]);
    let formula = repmem(&[
        "analytic", "--formula", "phase", "--t1", "10", "--t2star", "1", "--t", "0.5",
    ]);
    assert!(sim.status.success() && formula.status.success());
    let a: f64 = stdout(&sim).trim().parse().unwrap();
    let b: f64 = stdout(&formula).trim().parse().unwrap();
    assert!((a - b).abs() < 1e-10, "simulate {a} vs analytic {b}");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = [
        "scan", "fig3", "--t1-points", "5", "--t-points", "4", "--nmax", "5",
    ];
    let first = repmem(&args);
    let second = repmem(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).starts_with("t1_over_t2star,t_over_t2star,n_opt,f_best,f_idle\n"));
}

#[test]
fn fig4_csv_and_json_formats() {
    let csv = repmem(&[
        "scan", "fig4", "--ttot", "0.1", "--t1-points", "2", "--p2-points", "2",
        "--nmax-cycles", "2",
    ]);
    assert!(csv.status.success());
    assert!(stdout(&csv).starts_with("t1_over_t2star,p2,n_cycles_opt,f_best,f_idle\n"));
    let json = repmem(&[
        "scan", "fig4", "--ttot", "0.1", "--t1-points", "2", "--p2-points", "2",
        "--nmax-cycles", "2", "--format", "json",
    ]);
    assert!(json.status.success());
    let parsed: serde_json::Value = serde_json::from_str(stdout(&json).trim()).unwrap();
    assert!(parsed["axes"]["t1_over_t2star"].is_array());
    assert_eq!(parsed["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn presets_listing_contains_published_rows() {
    let out = repmem(&["presets"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("ibm_jakarta"));
    assert!(text.contains("si_3qubit"));
    assert_eq!(text.lines().count(), 12); // header + 11 rows
}

#[test]
fn exit_codes_follow_contract() {
    // Unknown subcommand: usage error (1).
    let out = repmem(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    // Unknown flag: usage error (1).
    let out = repmem(&["analytic", "--formula", "idle", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(1));
    // Validation error: even code size (2).
    let out = repmem(&[
        "simulate", "--code", "phase", "--n", "4", "--cycles", "1", "--t1", "1",
        "--t2star", "1", "--ttot", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Validation error: negative time (2).
    let out = repmem(&[
        "analytic", "--formula", "idle", "--t1=-3", "--t2star", "1", "--t", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Missing required flag for the formula: validation error (2).
    let out = repmem(&[
        "analytic", "--formula", "phase-n", "--t1", "1", "--t2star", "1", "--t", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Help exits cleanly.
    let out = repmem(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("repmem-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("idle.txt");
    let out = repmem(&[
        "analytic", "--formula", "idle", "--t1", "inf", "--t2star", "1", "--t", "1",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let content = std::fs::read_to_string(&path).unwrap();
    assert!(content.starts_with("0.789293147"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn analytic_coefficient_formulas() {
    let out = repmem(&[
        "analytic", "--formula", "f2", "--decomp", "cscz", "--t1", "inf", "--t2star", "1",
        "--t", "0",
    ]);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - 184.0 / 45.0).abs() < 1e-11); // 12 significant digits printed
    let out = repmem(&[
        "analytic", "--formula", "f1", "--decomp", "cscz", "--t1", "inf", "--t2star", "1",
        "--t", "0",
    ]);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - 40.0 / 9.0).abs() < 1e-11);
    // phase-error example: 1 - 0.01 * 184/45.
    let out = repmem(&[
        "analytic", "--formula", "phase-error", "--decomp", "cscz", "--t1", "inf",
        "--t2star", "1", "--t", "0", "--p1", "0", "--p2", "0.01",
    ]);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - (1.0 - 0.01 * 184.0 / 45.0)).abs() < 1e-11);
}

#[test]
fn breakeven_reports_unreachable_region() {
    let out = repmem(&[
        "breakeven", "--decomp", "cscz", "--t1", "1", "--t2star", "1", "--t", "0.5",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("unreachable"));
}
