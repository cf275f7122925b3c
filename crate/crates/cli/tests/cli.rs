//! Behavioral tests for the `purify-sim` binary: exit codes, CSV schemas,
//! config-file precedence and byte-level determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purify-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purify-sim"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn ideal_curve_schema_and_values() {
    let out = run(&["ideal-curve", "--f-min", "0.5", "--f-max", "1.0", "--steps", "51"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "f,f_prime");
    assert_eq!(lines.len(), 52); // header + steps rows
    assert!(!text.contains('\r'));
    // first row is the fixed point, the f = 0.75 row maps to 0.9
    assert_eq!(lines[1], "0.500000000000,0.500000000000");
    let row_075 = lines.iter().find(|l| l.starts_with("0.750000000000,")).unwrap();
    assert_eq!(*row_075, "0.750000000000,0.900000000000");
}

#[test]
fn ideal_curve_rejects_bad_range() {
    let out = run(&["ideal-curve", "--f-min", "0.9", "--f-max", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let out = run(&["ideal-curve", "--steps", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["ideal-curve", "--f-max", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cascade_reproduces_closed_form_row() {
    let out = run(&["cascade", "--rounds", "2", "--eta", "0", "--loss-placement", "after", "--f0", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    assert_eq!(fields[0], "2");
    let p2: f64 = fields[3].parse().unwrap();
    assert!((p2 - 1.0 / 64.0).abs() < 1e-15);
    // no loss: p2_norm column stays exactly one
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').nth(5).unwrap(), "1.00000000000");
    }
}

#[test]
fn cascade_headline_number() {
    let out = run(&["cascade", "--rounds", "3", "--eta", "0.01", "--loss-placement", "before", "--f0", "1"]);
    assert!(out.status.success());
    let last_line = stdout(&out).lines().last().unwrap().to_string();
    let p2_norm: f64 = last_line.split(',').nth(5).unwrap().parse().unwrap();
    assert!((p2_norm - 0.765).abs() < 0.02, "p2_norm = {p2_norm}");
}

#[test]
fn cascade_total_loss_is_degenerate() {
    let out = run(&["cascade", "--rounds", "1", "--eta", "1", "--loss-placement", "before"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mass"));
}

#[test]
fn cascade_rejects_invalid_config() {
    let out = run(&["cascade", "--rounds", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["cascade", "--eta", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["cascade", "--loss-placement", "during"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["cascade", "--f0", "-0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bandwidth_schema_and_monotonicity() {
    let out = run(&["bandwidth", "--omega-min", "0.1", "--omega-max", "5", "--steps", "50"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "omega,eta");
    assert_eq!(lines.len(), 51);
    let mut prev = f64::INFINITY;
    for line in &lines[1..] {
        let eta: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(eta < prev);
        prev = eta;
    }
    let out = run(&["bandwidth", "--omega-min", "0", "--omega-max", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mode_mismatch_zero_bound_equals_ideal_map() {
    let out = run(&[
        "mode-mismatch",
        "--f-min", "0.6", "--f-max", "0.9", "--steps", "4",
        "--tau-bounds", "0",
        "--samples", "8",
        "--seed", "3",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (f, min_f_prime) = (fields[1], fields[2]);
        let ideal = f * f / (f * f + (1.0 - f) * (1.0 - f));
        assert!((min_f_prime - ideal).abs() < 1e-9);
    }
}

#[test]
fn mode_mismatch_is_deterministic_and_thread_count_independent() {
    let args = [
        "mode-mismatch",
        "--f-min", "0.55", "--f-max", "0.95", "--steps", "5",
        "--tau-bounds", "0.2,0.6",
        "--samples", "100",
        "--seed", "42",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let serial = run_with_env(&args, "RAYON_NUM_THREADS", "1");
    assert!(serial.status.success());
    assert_eq!(a.stdout, serial.stdout);
}

#[test]
fn mode_mismatch_rejects_conflicting_sampling_flags() {
    let out = run(&["mode-mismatch", "--samples", "10", "--grid", "5"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["mode-mismatch", "--policy", "both"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["mode-mismatch", "--tau-bounds", "-0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    std::fs::write(
        &config_path,
        r#"{"f_min": 0.6, "f_max": 0.8, "steps": 3, "rounds": 2, "eta": 0.0, "loss_placement": "after"}"#,
    )
    .unwrap();
    let config = config_path.to_str().unwrap();

    let out = run(&["ideal-curve", "--config", config]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(1).unwrap().starts_with("0.600000000000,"));

    // explicit flag beats the file value
    let out = run(&["ideal-curve", "--config", config, "--steps", "2"]);
    assert_eq!(stdout(&out).lines().count(), 3);

    let out = run(&["cascade", "--config", config]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.json");
    std::fs::write(&config_path, r#"{"steps": 3, "step_count": 4}"#).unwrap();
    let out = run(&["ideal-curve", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step_count"));

    let out = run(&["ideal-curve", "--config", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_identical_bytes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let args = ["bandwidth", "--omega-min", "0.5", "--omega-max", "2.0", "--steps", "4"];
    let piped = run(&args);
    let mut with_out: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    with_out.push("--out".into());
    with_out.push(path.to_str().unwrap().into());
    let refs: Vec<&str> = with_out.iter().map(|s| s.as_str()).collect();
    let out = run(&refs);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), piped.stdout);
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
