use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meanbounds")).args(args).env_remove("MEANBOUNDS_TOL_REL").output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn mean_prints_value() {
    let out = run(&["mean", "--x", "1,4", "--q", "0.5,0.5", "--r", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], 2.25);
}

#[test]
fn negative_orders_parse() {
    let out = run(&["mean", "--x", "1,4", "--q", "0.5,0.5", "--r", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], 1.6);
}

#[test]
fn r0_threshold() {
    let out = run(&["threshold", "--which", "r0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r0 = v["value"].as_f64().unwrap();
    assert!(r0 > 0.65 && r0 < 0.67);
    assert!(v["residual"].as_f64().unwrap().abs() <= 1e-12);
}

#[test]
fn check_exit_codes() {
    let holds = run(&[
        "check", "--ineq", "diananda-upper", "--triple", "1,0.5,0", "--alpha", "1", "--x", "1,4,9", "--q",
        "0.333333,0.333333,0.333334",
    ]);
    assert_eq!(holds.status.code(), Some(0));
    assert_eq!(json(&holds)["status"], "Holds");

    let violated = run(&["check", "--ineq", "mg-sigma-upper", "--r", "3", "--x", "0.04,1", "--q", "0.999,0.001", "--force"]);
    assert_eq!(violated.status.code(), Some(1), "{}", String::from_utf8_lossy(&violated.stdout));

    let outside = run(&["check", "--ineq", "reciprocal-order-upper", "--r", "1.5", "--x", "1,2", "--q", "0.5,0.5"]);
    assert_eq!(outside.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&outside.stderr).contains("r >= 2"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["check", "--ineq", "no-such-bound"]).status.code(), Some(2));
    assert_eq!(run(&["mean", "--x", "1,4", "--q", "0.5,0.4", "--r", "1"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn hunt_reports_violation() {
    let out = run(&["hunt", "--ineq", "mg-sigma-upper", "--r", "2.5", "--budget", "100000", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "ViolationFound");
    assert!(v["best_config"]["x"].is_array());
}

#[test]
fn aux_commands() {
    let at = run(&["aux", "--id", "E_xr", "--at", "0.75,1"]);
    assert_eq!(at.status.code(), Some(0));
    assert_eq!(json(&at)["value"], 0.0625);
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    std::fs::write(&grid, r#"{"x": {"lo": 0.3, "hi": 1, "count": 50}, "r": {"lo": 1, "hi": 2, "count": 5}}"#).unwrap();
    let out = run(&["aux", "--id", "E_xr", "--grid", grid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "ViolationFound");
}

#[test]
fn sweep_ar_profile_csv() {
    let out = run(&["sweep", "--quantity", "ar-profile", "--r", "1.5", "--lo", "0", "--hi", "1", "--count", "101", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["t", "a_r"]);
    let rows: Vec<(f64, f64)> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 101);
    // endpoint rows use the limits |r−2|/r and |ln(2^{r−1}/r)| / ((r−1) ln 2)
    assert_eq!(rows[0], (0.0, meanbounds::thresholds::a_r_at_zero(1.5)));
    assert_eq!(rows[100], (1.0, meanbounds::thresholds::a_r_at_one(1.5)));
    // CSV values parse back to the exact same doubles as the JSON report
    let j = json(&run(&["sweep", "--quantity", "ar-profile", "--r", "1.5", "--lo", "0", "--hi", "1", "--count", "101"]));
    for (row, (t, a)) in j["rows"].as_array().unwrap().iter().zip(&rows) {
        assert_eq!(row["t"].as_f64().unwrap(), *t);
        assert_eq!(row["a_r"].as_f64().unwrap(), *a);
    }
}

#[test]
fn sweep_alpha_lower_and_base_residual() {
    let out = json(&run(&["sweep", "--quantity", "alpha-lower", "--lo", "2.1", "--hi", "6", "--count", "40"]));
    let rows = out["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 40);
    for w in rows.windows(2) {
        let (r0, r1) = (w[0]["r"].as_f64().unwrap(), w[1]["r"].as_f64().unwrap());
        let same_piece = |a: f64, b: f64| (a < 3.0) == (b < 3.0) && (a < 4.0) == (b < 4.0);
        if same_piece(r0, r1) {
            let jump = (w[0]["alpha"].as_f64().unwrap() - w[1]["alpha"].as_f64().unwrap()).abs();
            assert!(jump < 0.05, "jump {jump} between r = {r0} and {r1}");
        }
    }
    let base = json(&run(&["sweep", "--quantity", "base-residual", "--lo", "0", "--hi", "0.5", "--count", "50", "--open-lo"]));
    for row in base["rows"].as_array().unwrap() {
        assert!(row["upper_residual"].as_f64().unwrap() >= -1e-15);
        assert!(row["lower_residual"].as_f64().unwrap() >= -1e-15);
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "mean", "x": [1, 4], "q": [0.5, 0.5], "r": 0.5, "format": "csv"}"#).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("2.25"));
    let report = dir.path().join("out.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "--format", "json", "--output", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["value"], 2.25);
}

#[test]
fn input_file_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cfg.json");
    std::fs::write(&input, r#"{"x": [4, 1], "q": [0.5, 0.5]}"#).unwrap();
    let out = run(&["mean", "--input", input.to_str().unwrap(), "--r", "0"]);
    assert_eq!(json(&out)["value"], 2.0);
}

#[test]
fn tolerance_from_environment() {
    // residual/scale is about 0.04 here, so a relative tolerance of 0.5 reads it as equality
    let args = ["check", "--ineq", "mg-sigma-upper", "--r", "2", "--x", "1,2", "--q", "0.5,0.5"];
    let strict = run(&args);
    let loose = Command::new(env!("CARGO_BIN_EXE_meanbounds")).args(args).env("MEANBOUNDS_TOL_REL", "0.5").output().unwrap();
    assert_eq!(json(&strict)["status"], "Holds");
    assert_eq!(json(&loose)["status"], "Equality");
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["hunt", "--ineq", "diananda-base-lower", "--budget", "5000", "--seed", "11"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let other = ["hunt", "--ineq", "diananda-base-lower", "--budget", "5000", "--seed", "12"];
    assert_ne!(run(&args).stdout, run(&other).stdout);
}
