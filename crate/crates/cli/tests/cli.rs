//! End-to-end tests of the `oujump` binary: flag validation, exit codes,
//! file formats, determinism and schema conformance of the JSON reports.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

mod schema;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oujump"));
    // pin the report timestamp so reruns are byte-identical
    cmd.env("SOURCE_DATE_EPOCH", "1700000000");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

#[test]
#[rustfmt::skip]
fn simulate_writes_csv_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let jumps = dir.path().join("jumps.csv");
    let args_common = [
        "simulate", "--theta", "1", "--sigma", "1", "--lambda", "2", "--n", "50", "--delta",
        "0.1", "--x0", "0.5", "--seed", "7",
    ];
    let mut a_args: Vec<&str> = args_common.to_vec();
    let out_a_s = out_a.to_str().unwrap();
    let jumps_s = jumps.to_str().unwrap();
    a_args.extend(["--out", out_a_s, "--jumps-out", jumps_s]);
    let out = run(&a_args);
    assert!(out.status.success(), "{}", stderr_str(&out));

    let text = std::fs::read_to_string(&out_a).unwrap();
    assert!(text.starts_with("t,x\n"));
    assert_eq!(text.lines().count(), 52, "header plus n+1 rows");
    let jumps_text = std::fs::read_to_string(&jumps).unwrap();
    assert!(jumps_text.starts_with("k,s\n"));

    let out_b_s = out_b.to_str().unwrap();
    let mut b_args: Vec<&str> = args_common.to_vec();
    b_args.extend(["--out", out_b_s, "--jumps-out", jumps_s]);
    let out = run(&b_args);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&out_a).unwrap(), std::fs::read(&out_b).unwrap());
}

#[test]
#[rustfmt::skip]
fn simulate_rejects_invalid_theta_naming_the_flag() {
    let out = run(&[
        "simulate", "--theta", "-1", "--sigma", "1", "--lambda", "1", "--n", "10", "--delta",
        "0.1", "--x0", "0", "--seed", "1", "--out", "/tmp/unused.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("theta"), "{}", stderr_str(&out));
}

#[test]
#[rustfmt::skip]
fn simulate_unwritable_output_is_io_error() {
    let out = run(&[
        "simulate", "--theta", "1", "--sigma", "1", "--lambda", "1", "--n", "10", "--delta",
        "0.1", "--x0", "0", "--seed", "1", "--out", "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
#[rustfmt::skip]
fn density_output_matches_library_and_schema() {
    let out = run(&[
        "density", "--theta", "1", "--sigma", "1", "--lambda", "1", "--delta", "0.1", "--x",
        "0", "--y", "0.3", "--grad", "--posterior",
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    let doc: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    schema::validate_file(&schema_dir(), "density_output.schema.json", &doc);

    let params = oujump::ModelParams::new(1.0, 1.0, 1.0).unwrap();
    let mix = oujump::Mixture::new(params, 0.1, oujump::MixtureConfig::default()).unwrap();
    let (logp, grad) = mix.log_density_grad(0.0, 0.3);
    assert_eq!(doc["logp"].as_f64().unwrap(), logp);
    assert_eq!(doc["p"].as_f64().unwrap(), logp.exp());
    for i in 0..3 {
        assert_eq!(doc["grad"][i].as_f64().unwrap(), grad[i]);
    }
    let posterior: Vec<f64> = doc["posterior"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let total: f64 = posterior.iter().sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
#[rustfmt::skip]
fn density_at_no_jump_mean_dominated_by_q0_term() {
    // p >= e^{-lambda delta} * q0(mean) at the no-jump mean
    let out = run(&[
        "density", "--theta", "1", "--sigma", "1", "--lambda", "1", "--delta", "0.1", "--x",
        "0", "--y", "-0.09516258196404043",
    ]);
    let doc: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let p = doc["p"].as_f64().unwrap();
    assert!(p >= (-0.1f64).exp() * 1.3251437678112738 * (1.0 - 1e-12));
}

#[test]
#[rustfmt::skip]
fn fit_round_trip_recovers_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let path_csv = dir.path().join("path.csv");
    let report_json = dir.path().join("fit.json");
    let out = run(&[
        "simulate", "--theta", "1", "--sigma", "0.5", "--lambda", "2", "--n", "5000", "--delta",
        "0.05", "--x0", "0", "--seed", "1234", "--out", path_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));

    let out = run(&[
        "fit", "--input", path_csv.to_str().unwrap(), "--delta", "0.05", "--out",
        report_json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(&report_json).unwrap()).unwrap();
    schema::validate_file(&schema_dir(), "fit_report.schema.json", &doc);
    assert_eq!(doc["converged"].as_bool(), Some(true));
    let est = &doc["estimate"];
    let stderr = &doc["stderr"];
    for (i, (name, truth)) in [("theta", 1.0), ("sigma", 0.5), ("lambda", 2.0)]
        .iter()
        .enumerate()
    {
        let e = est[*name].as_f64().unwrap();
        let se = stderr[i].as_f64().unwrap();
        assert!(
            (e - truth).abs() < 3.0 * se,
            "{name}: {e} vs {truth} +- {se}"
        );
    }
}

#[test]
#[rustfmt::skip]
fn fit_flag_validation() {
    // non-positive init component
    let out = run(&["fit", "--input", "/tmp/x.csv", "--delta", "0.1", "--init", "-1,1,1"]);
    assert_eq!(out.status.code(), Some(1));

    // missing --delta prints usage
    let out = run(&["fit", "--input", "/tmp/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_str(&out);
    assert!(err.contains("--delta") && err.contains("usage"), "{err}");
}

#[test]
#[rustfmt::skip]
fn fit_malformed_csv_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "t,x\n0.0,1.0\n0.1,oops\n").unwrap();
    let out = run(&["fit", "--input", bad.to_str().unwrap(), "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("line 3"), "{}", stderr_str(&out));
}

#[test]
#[rustfmt::skip]
fn lan_zero_direction_flags_degenerate_sample() {
    let out = run(&[
        "lan", "--theta0", "1", "--sigma0", "1", "--lambda0", "1", "-u", "0", "-v", "0", "-w",
        "0", "--n", "50", "--delta", "0.1", "--reps", "100", "--seed", "3",
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    let doc: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc["degenerate"].as_bool(), Some(true));
    assert!(doc["ks_statistic"].is_null());
    assert!(stderr_str(&out).contains("degenerate"));
}

#[test]
#[rustfmt::skip]
fn lan_delta_rule_is_echoed_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = [
        "lan", "--theta0", "1", "--sigma0", "1", "--lambda0", "1", "-u", "1", "-v", "1", "-w",
        "1", "--n", "100", "--delta-rule", "n^-0.6", "--reps", "100", "--seed", "42",
    ];
    let mut a_args = args.to_vec();
    a_args.extend(["--out", a.to_str().unwrap()]);
    assert!(run(&a_args).status.success());
    let mut b_args = args.to_vec();
    b_args.extend(["--out", b.to_str().unwrap()]);
    assert!(run(&b_args).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    schema::validate_file(&schema_dir(), "lan_report.schema.json", &doc);
    let expected = 100f64.powf(-0.6);
    assert_eq!(doc["resolved_delta"].as_f64(), Some(expected));
    assert_eq!(doc["delta_rule"].as_str(), Some("n^-0.6"));
    // fractional exponents are accepted too
    let out = run(&[
        "lan", "--theta0", "1", "--sigma0", "1", "--lambda0", "1", "-u", "1", "-v", "1", "-w",
        "1", "--n", "100", "--delta-rule", "n^-3/5", "--reps", "100", "--seed", "42",
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc["resolved_delta"].as_f64(), Some(expected));
}

#[test]
#[rustfmt::skip]
fn lan_rejects_bad_delta_rule() {
    let out = run(&[
        "lan", "--theta0", "1", "--sigma0", "1", "--lambda0", "1", "-u", "1", "-v", "1", "-w",
        "1", "--n", "100", "--delta-rule", "m^-0.6", "--reps", "100", "--seed", "42",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
#[rustfmt::skip]
fn ergodic_report_validates_and_square_prediction_matches() {
    let out = run(&[
        "ergodic", "--theta0", "1", "--sigma0", "1", "--lambda0", "1", "--g", "square", "--n",
        "40000", "--delta", "0.01", "--seed", "7",
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    let doc: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    schema::validate_file(&schema_dir(), "ergodic_report.schema.json", &doc);
    assert_eq!(doc["predicted"].as_f64(), Some(1.0));
    assert_eq!(doc["g"].as_str(), Some("square"));

    let out = run(&[
        "ergodic", "--theta0", "1", "--sigma0", "1", "--lambda0", "1", "--g", "sinh", "--n",
        "100", "--delta", "0.01", "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
#[rustfmt::skip]
fn efficiency_report_validates() {
    let out = run(&[
        "efficiency", "--theta0", "1", "--sigma0", "1", "--lambda0", "1", "--n", "300",
        "--delta-rule", "n^-0.6", "--reps", "100", "--seed", "11",
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    let doc: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    schema::validate_file(&schema_dir(), "efficiency_report.schema.json", &doc);
    let used = doc["metadata"]["reps_used"].as_u64().unwrap();
    let failed = doc["metadata"]["failures"].as_u64().unwrap();
    assert_eq!(used + failed, 100);
}

#[test]
#[rustfmt::skip]
fn fit_non_convergence_is_not_a_process_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path_csv = dir.path().join("path.csv");
    assert!(run(&[
        "simulate", "--theta", "1", "--sigma", "1", "--lambda", "1", "--n", "200", "--delta",
        "0.05", "--x0", "0", "--seed", "5", "--out", path_csv.to_str().unwrap(),
    ])
    .status
    .success());
    // an unreachable tolerance leaves converged=false but still exits 0
    let out = run(&[
        "fit", "--input", path_csv.to_str().unwrap(), "--delta", "0.05", "--tol", "1e-300",
        "--max-iter", "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_str(&out));
    let doc: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc["converged"].as_bool(), Some(false));
}

#[test]
#[rustfmt::skip]
fn efficiency_mass_failures_exit_internal() {
    // an unreachable tolerance makes every replication non-convergent,
    // which exceeds the 5% exclusion budget
    let out = run(&[
        "efficiency", "--theta0", "1", "--sigma0", "1", "--lambda0", "1", "--n", "50",
        "--delta", "0.1", "--reps", "100", "--seed", "3", "--tol", "1e-300", "--max-iter", "2",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr_str(&out));
    assert!(stderr_str(&out).contains("replications"), "{}", stderr_str(&out));
}

#[test]
#[rustfmt::skip]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "# experiment defaults\ntheta = 1.0\nsigma = 1.0\nlambda = 1.0\nn = 20\ndelta = 0.1\nx0 = 0.0\nseed = 5\n",
    )
    .unwrap();
    let out_path = dir.path().join("from-config.csv");
    let out = run(&[
        "simulate", "--config", conf.to_str().unwrap(), "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    assert_eq!(
        std::fs::read_to_string(&out_path).unwrap().lines().count(),
        22
    );

    // flag overrides config value
    let out_path2 = dir.path().join("override.csv");
    let out = run(&[
        "simulate", "--config", conf.to_str().unwrap(), "--n", "5", "--out",
        out_path2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(&out_path2).unwrap().lines().count(),
        7
    );
}
