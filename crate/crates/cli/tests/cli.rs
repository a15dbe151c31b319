use std::process::{Command, Output};

use serde_json::Value;

fn sixstate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sixstate"))
        .args(args)
        .env_remove("QKD_SEED")
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    sixstate(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> Value {
    let out = sixstate(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["ir", "solve"]), 0);
    assert_eq!(code(&["verify", "--disturbance", "0.2"]), 0);

    for bad in [
        &["frobnicate"][..],
        &["curves", "--d-max", "0.7"],
        &["curves", "--d-min", "0.3", "--d-max", "0.2"],
        &["curves", "--steps", "1"],
        &["simulate", "--rounds", "0"],
        &["simulate", "--attack", "collective"],
        &["simulate", "--attack", "collective", "--theta", "0.1", "--disturbance", "0.1"],
        &["simulate", "--attack", "intercept-resend", "--alpha", "0.1"],
        &["simulate", "--attack", "collective", "--disturbance", "0.6"],
        &["simulate", "--attack", "collective", "--theta", "2.0"],
        &["verify"],
        &["verify", "--fidelity", "0.3"],
        &["verify", "--theta", "1", "--tolerance", "-1"],
        &["e91", "--attack", "collective"],
        &["e91", "--attack", "none", "--disturbance", "0.1"],
        &["e91", "--attack", "ir-bob", "--dist", "dirac-z"],
        &["ir", "scan", "--alpha-steps", "1"],
        &["--threads", "0", "ir", "solve"],
        &["curves", "--out", "/nonexistent-dir/curves.csv"],
    ] {
        assert_eq!(code(bad), 1, "{bad:?}");
    }

    // a zero tolerance cannot be met by floating-point residuals
    let out = sixstate(&["verify", "--theta", "1", "--tolerance", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invariant violation"));
}

#[test]
fn seed_falls_back_to_the_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_sixstate"));
        cmd.args(["simulate", "--attack", "intercept-resend", "--rounds", "20000", "--json"]);
        cmd.env_remove("QKD_SEED");
        if let Some(s) = env {
            cmd.env("QKD_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    let from_env = run(Some("17"), None);
    assert_eq!(from_env["manifest"]["seed"], 17);
    assert_eq!(from_env, run(None, Some("17")));
    assert_eq!(run(Some("3"), Some("17")), from_env);
    assert_eq!(run(None, None)["manifest"]["seed"], 0);
}

#[test]
fn reruns_are_byte_identical() {
    let commands: [&[&str]; 5] = [
        &["curves", "--steps", "51", "--seed", "4"],
        &["ir", "scan", "--alpha-steps", "60", "--beta-steps", "60"],
        &["simulate", "--attack", "collective", "--disturbance", "0.1", "--rounds", "70000", "--seed", "5"],
        &["simulate", "--scheme", "bb84", "--attack", "intercept-resend", "--rounds", "70000", "--json"],
        &["e91", "--attack", "ir-both", "--dist", "product-uniform", "--rounds", "70000", "--seed", "6"],
    ];
    for args in commands {
        let first = sixstate(args);
        assert!(first.status.success(), "{args:?}");
        assert_eq!(first.stdout, sixstate(args).stdout, "{args:?}");
        let mut threaded = vec!["--threads", "4"];
        threaded.extend_from_slice(args);
        assert_eq!(first.stdout, sixstate(&threaded).stdout, "{args:?} with 4 threads");
        let mut single = vec!["--threads", "1"];
        single.extend_from_slice(args);
        assert_eq!(first.stdout, sixstate(&single).stdout, "{args:?} with 1 thread");
    }
}

#[test]
fn timestamp_is_opt_in_and_pinnable() {
    let plain = json(&["e91", "--rounds", "10"]);
    assert_eq!(plain["manifest"]["timestamp"], Value::Null);
    let out = Command::new(env!("CARGO_BIN_EXE_sixstate"))
        .args(["--timestamp", "e91", "--rounds", "10"])
        .env("SOURCE_DATE_EPOCH", "0")
        .output()
        .unwrap();
    let stamped: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stamped["manifest"]["timestamp"], "1970-01-01T00:00:00Z");
}

#[test]
fn curves_csv_layout_and_endpoints() {
    let out = sixstate(&["curves"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[..5].iter().filter(|l| l.starts_with("# ")).count(), 5);
    assert!(lines[0].starts_with("# command: curves"));
    assert_eq!(lines[5], "d,pe_six,pe_bb84,ie_six,ie_bb84,qab");
    let rows: Vec<Vec<f64>> = lines[6..].iter().map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 101);
    assert_eq!(lines[6], "0,0.5,0.5,0,0,1");
    assert_eq!(lines[106], "0.5,1,1,1,1,0.5");
    for r in &rows {
        assert!(r[1] <= r[2] && r[3] <= r[4], "{r:?}");
        assert!((r[5] - (1.0 - r[0])).abs() < 1e-12);
    }
    // twelve significant digits
    let rows30 = &rows[60];
    assert_eq!(rows30[0], 0.3);
    assert_eq!(rows30[1], 0.937228132327);
}

#[test]
fn curves_write_to_a_file() {
    let path = std::env::temp_dir().join(format!("sixstate-curves-{}.csv", std::process::id()));
    let out = sixstate(&["curves", "--steps", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.ends_with("0.5,1,1,1,1,0.5\n"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn ir_solve_lists_the_symmetric_strategies() {
    let v = json(&["ir", "solve"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let p_opt = (3.0 + 3f64.sqrt()) / 6.0;
    for r in rows {
        assert!((r["q"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
        if r["optimal"].as_bool().unwrap() {
            assert!((r["p"].as_f64().unwrap() - p_opt).abs() < 1e-12);
        }
    }
}

#[test]
fn simulate_examples() {
    let v = json(&["simulate", "--rounds", "200000", "--json"]);
    assert_eq!(v["stats"]["errors_in_sifted"], 0);
    assert_eq!(v["manifest"]["params"]["rounds"], 200000);

    let v = json(&["simulate", "--attack", "collective", "--disturbance", "0.1666666666666667", "--json"]);
    let q = &v["stats"]["q_ab"];
    let (value, se) = (q["value"].as_f64().unwrap(), q["standard_error"].as_f64().unwrap());
    assert!((value - 5.0 / 6.0).abs() < 4.0 * se);
    let eve = &v["stats"]["eve_accuracy"];
    assert!((eve["value"].as_f64().unwrap() - 5.0 / 6.0).abs() < 4.0 * eve["standard_error"].as_f64().unwrap());

    let text = String::from_utf8(sixstate(&["simulate", "--scheme", "bb84", "--rounds", "1000"]).stdout).unwrap();
    assert!(text.contains("scheme        bb84"));
    assert!(text.contains("eve accuracy  n/a"));
}

#[test]
fn verify_reports_every_family() {
    let v = json(&["verify", "--theta", "0.7", "--json"]);
    assert_eq!(v["pass"], true);
    assert!(v["report"]["families"].as_array().unwrap().len() >= 10);
}

#[test]
fn e91_examples() {
    let v = json(&["e91", "--rounds", "100000"]);
    assert!((v["exact"]["s"].as_f64().unwrap() - 3.0).abs() < 1e-12);

    let v = json(&["e91", "--attack", "ir-bob", "--bob-density", "uniform", "--rounds", "200000"]);
    assert_eq!(v["exact"]["s"], 1.0);
    let mc = &v["monte_carlo"];
    assert!((mc["s"].as_f64().unwrap() - 1.0).abs() < 4.0 * mc["s_standard_error"].as_f64().unwrap());

    let v = json(&["e91", "--attack", "collective", "--disturbance", "0.1", "--rounds", "100000"]);
    assert!((v["exact"]["s"].as_f64().unwrap() - 2.4).abs() < 1e-12);
    assert_eq!(v["exact"]["exceeds_hidden_variable_bound"], true);
    assert_eq!(v["closed_form_s"].as_f64().unwrap(), 3.0 * (1.0 - 2.0 * 0.1));
}
