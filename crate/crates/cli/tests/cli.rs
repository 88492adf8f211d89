use std::path::PathBuf;
use std::process::{Command, Output};

use lpq::closedform::{closed_form_table, qft_pr};
use lpq::{Algorithm, OracleSpec};
use serde_json::Value;

fn lpq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpq"))
        .args(args)
        .env_remove("LPQ_SOFT_N_LIMIT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lpq-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Value of `key` in the `# key=value ...` comment lines.
fn meta(text: &str, key: &str) -> Option<String> {
    text.lines()
        .filter(|l| l.starts_with("# "))
        .flat_map(|l| l[2..].split(' '))
        .find_map(|pair| pair.strip_prefix(&format!("{key}=")).map(str::to_string))
}

const SIXTEEN: [&str; 8] = ["--n", "16", "--m", "3", "--p", "4", "--s", "1"];

fn with_instance<'a>(command: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut args = vec![command];
    args.extend(SIXTEEN);
    args.extend(extra);
    args
}

#[test]
fn spectrum_matches_simulation() {
    let out = lpq(&with_instance("spectrum", &["--alg", "amplified"]));
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("# schema=1"));
    let rows: Vec<&str> = text.lines().filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit())).collect();
    assert_eq!(rows.len(), 16);
    let deviation: f64 = meta(&text, "max_deviation").unwrap().parse().unwrap();
    assert!(deviation < 1e-9);
}

#[test]
fn qft_zero_row() {
    let out = lpq(&with_instance("spectrum", &["--alg", "qft"]));
    let row = stdout(&out).lines().find(|l| l.starts_with("0,")).unwrap().to_string();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[1], "zero");
    assert_eq!(fields[2].parse::<f64>().unwrap(), 0.390625);
}

#[test]
fn invalid_instances_exit_with_two() {
    let out = lpq(&["spectrum", "--n", "16", "--m", "3", "--p", "5", "--s", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("P^2 = 25 > N = 16"));
    assert_eq!(code(&lpq(&["spectrum", "--n", "16"])), 2);
    assert_eq!(code(&lpq(&[])), 2);
    assert_eq!(code(&lpq(&["spectrum", "--bogus"])), 2);
    // relaxed mode accepts what strict mode rejects
    assert_eq!(code(&lpq(&["spectrum", "--n", "16", "--m", "3", "--p", "5", "--s", "1", "--no-strict"])), 0);
}

#[test]
fn emitted_probabilities_round_trip() {
    let out = lpq(&with_instance("spectrum", &["--alg", "qhs", "--format", "json"]));
    let report = json(&out);
    let spec = OracleSpec::strict(16, 3, 4, 1).unwrap();
    let table = closed_form_table(Algorithm::Qhs, &spec);
    for row in report["rows"].as_array().unwrap() {
        let y = row["y"].as_u64().unwrap();
        let printed = row["closed_form"].as_f64().unwrap();
        assert!((printed - table.pr(y)).abs() <= 1e-15);
        assert_eq!(printed, table.pr(y));
    }
    assert_eq!(report["rows"][0]["closed_form"].as_f64(), Some(0.6953125));
}

#[test]
fn compare_reports_bounds() {
    let out = lpq(&["compare", "--n", "16", "--m", "4", "--p", "4", "--s", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let gaps: Vec<f64> = report["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["gap"].as_f64().unwrap())
        .collect();
    assert!((gaps[0] - 1.0).abs() < 1e-9 && (gaps[1] - 2.0).abs() < 1e-9);
    for b in report["bounds"].as_array().unwrap() {
        assert_eq!(b["pointwise"], "pass");
        assert_eq!(b["success_set"]["verdict"], "pass");
    }
    let row = &report["rows"][1];
    assert_eq!(row["case"], "null");
    assert_eq!(row["excluded"], true);
    assert!(row["ratio_qft"].is_null());
}

#[test]
fn compare_verdicts_pass_on_strict_instances() {
    for (n, m, p, s) in [(64, 5, 7, 3), (100, 10, 9, 0), (256, 30, 8, 17)] {
        let args = [n, m, p, s].map(|v: u64| v.to_string());
        let out = lpq(&[
            "compare", "--n", &args[0], "--m", &args[1], "--p", &args[2], "--s", &args[3],
        ]);
        let text = stdout(&out);
        assert!(!text.contains("=fail"), "{text}");
    }
}

#[test]
fn recover_examples() {
    let out = lpq(&["recover", "--n", "16", "--y", "4", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["accepted"], 4);
    assert_eq!(report["convergents"], serde_json::json!([[0, 1], [1, 4]]));

    assert_eq!(code(&lpq(&["recover", "--n", "16", "--y", "0"])), 3);

    let out = lpq(&with_instance("recover", &["--y", "5", "--verify", "--format", "json"]));
    assert_eq!(code(&out), 4);
    let report = json(&out);
    assert_eq!(report["accepted"], 3);
    assert_eq!(report["verification"]["verified"], false);

    let out = lpq(&with_instance("recover", &["--y", "12", "--verify"]));
    assert_eq!(code(&out), 0);
    assert_eq!(code(&lpq(&["recover", "--n", "16", "--y", "16"])), 2);
}

#[test]
fn find_offset_examples() {
    for method in ["counting", "decreasing"] {
        let out = lpq(&[
            "find-offset", "--n", "4096", "--m", "16", "--p", "60", "--s", "77", "--method", method, "--seed", "4",
            "--format", "json",
        ]);
        let report = json(&out);
        if method == "decreasing" || report["counting"]["correct"] == true {
            assert_eq!(code(&out), 0);
            assert_eq!(report["offset"], 77);
        } else {
            assert_eq!(code(&out), 4);
        }
    }
    let wrong = lpq(&with_instance("find-offset", &["--period", "3"]));
    assert_eq!(code(&wrong), 4);

    let single = lpq(&["find-offset", "--n", "64", "--m", "1", "--p", "5", "--s", "17", "--format", "json"]);
    assert_eq!(code(&single), 0);
    let report = json(&single);
    assert_eq!(report["offset"], 17);
    assert_eq!(report["iterations"], 0);
}

#[test]
fn trials_rows() {
    let out = lpq(&["trials", "--n", "1024", "--m", "4", "--p", "31", "--s", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let k = report["iterations"].as_f64().unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows[0]["algorithm"], "amplified");
    assert_eq!(rows[0]["per_run_cost"].as_f64().unwrap(), k + 1.0);
    for row in &rows[1..] {
        assert_eq!(row["lower_bound_verdict"], "pass");
        assert_eq!(row["per_run_cost"].as_f64().unwrap(), 1.0);
    }
    // P = 1 admits no successful measurement
    assert_eq!(code(&lpq(&["trials", "--n", "64", "--m", "4", "--p", "1", "--s", "0"])), 2);
}

#[test]
fn sweep_writes_one_file_per_n() {
    let dir = scratch_dir("sweep");
    let out = lpq(&[
        "sweep", "--m", "4", "--p", "4", "--s", "1", "--log2-n-min", "8", "--log2-n-max", "11", "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(meta(&text, "qft_ratio_band").as_deref(), Some("pass"));
    assert_eq!(meta(&text, "qft_bound_ratio_band").as_deref(), Some("pass"));
    for n in [256, 512, 1024, 2048] {
        let file = std::fs::read_to_string(dir.join(format!("sweep-n{n}.csv"))).unwrap();
        assert!(file.starts_with("# schema=1\n"));
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = scratch_dir("determinism");
    let config = dir.join("run.json");
    std::fs::write(&config, r#"{"n": 256, "m": 8, "p": 13, "s": 3, "runs": 300, "seed": 9}"#).unwrap();
    let a = lpq(&["trials", "--config", config.to_str().unwrap()]);
    let b = lpq(&["trials", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let reseeded = lpq(&["trials", "--config", config.to_str().unwrap(), "--seed", "10"]);
    assert_ne!(a.stdout, reseeded.stdout);

    let out_file = dir.join("spectrum.json");
    for _ in 0..2 {
        let out = lpq(&with_instance("spectrum", &["--format", "json", "--out", out_file.to_str().unwrap()]));
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
    }
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
    assert_eq!(written["instance"]["n"], 16);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn config_values_are_overridden_by_flags() {
    let dir = scratch_dir("config");
    let config = dir.join("run.json");
    std::fs::write(&config, r#"{"n": 16, "m": 3, "p": 4, "s": 1, "alg": "qhs", "format": "json"}"#).unwrap();
    let out = lpq(&["spectrum", "--config", config.to_str().unwrap(), "--alg", "qft"]);
    let report = json(&out);
    assert_eq!(report["algorithm"], "qft");
    let spec = OracleSpec::strict(16, 3, 4, 1).unwrap();
    assert_eq!(report["rows"][0]["closed_form"].as_f64(), Some(qft_pr(0, &spec)));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn iteration_override_is_honoured() {
    let out = lpq(&with_instance("spectrum", &["--iterations-override", "3"]));
    let text = stdout(&out);
    assert_eq!(meta(&text, "k").as_deref(), Some("3"));
    let deviation: f64 = meta(&text, "max_deviation").unwrap().parse().unwrap();
    assert!(deviation < 1e-9);
}

#[test]
fn soft_limit_warns_without_failing() {
    let out = Command::new(env!("CARGO_BIN_EXE_lpq"))
        .args(with_instance("spectrum", &[]))
        .env("LPQ_SOFT_N_LIMIT", "8")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("soft limit 8"));
    assert!(lpq(&with_instance("spectrum", &[])).stderr.is_empty());
}
