//! End-to-end tests of the `skdensity` binary: exit-code contract, output
//! artifacts and config round trips.

mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_skdensity")
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(label: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("skdensity_cli_{}_{label}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary should run")
}

#[test]
fn reconstruct_writes_csv_and_diagnostics() {
    let out = scratch("reconstruct");
    let config = configs_dir().join("std_normal.json");
    let output = run(&[
        "reconstruct",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");

    let csv = fs::read_to_string(out.join("std_normal_density.csv")).unwrap();
    assert!(csv.starts_with("x1,density\n"));
    assert_eq!(csv.lines().count(), 104); // header plus one row per point

    let diag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("std_normal_diagnostics.json")).unwrap())
            .unwrap();
    assert_eq!(diag["box"][0], 30);
    assert_eq!(diag["mesh"][0], 0.25);
    assert!(diag["max_imag"].as_f64().unwrap() <= 1e-10);
    assert!(diag["config"]["mesh"]["spacings"].is_array());
    fs::remove_dir_all(&out).ok();
}

#[test]
fn diagnostics_config_reproduces_run() {
    let out1 = scratch("roundtrip_a");
    let out2 = scratch("roundtrip_b");
    let config = configs_dir().join("std_normal.json");
    let output = run(&[
        "reconstruct",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out1.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));

    // extract the embedded config and run from it
    let diag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out1.join("std_normal_diagnostics.json")).unwrap())
            .unwrap();
    let extracted = out2.join("extracted.json");
    fs::write(&extracted, serde_json::to_vec(&diag["config"]).unwrap()).unwrap();
    let output = run(&[
        "reconstruct",
        "--config",
        extracted.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");

    let first = fs::read(out1.join("std_normal_density.csv")).unwrap();
    let second = fs::read(out2.join("std_normal_density.csv")).unwrap();
    assert_eq!(first, second, "config round trip must reproduce the CSV");
    fs::remove_dir_all(&out1).ok();
    fs::remove_dir_all(&out2).ok();
}

#[test]
fn malformed_json_exits_one() {
    let out = scratch("malformed");
    let bad = out.join("bad.json");
    fs::write(&bad, "{ this is not json").unwrap();
    let output = run(&["reconstruct", "--config", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("malformed JSON"), "{stderr}");
    fs::remove_dir_all(&out).ok();
}

#[test]
fn unknown_field_exits_one() {
    let out = scratch("unknown_field");
    let text = fs::read_to_string(configs_dir().join("std_normal.json")).unwrap();
    let bad = out.join("extra.json");
    fs::write(&bad, text.replacen("\"mesh\"", "\"surprise\": 1, \"mesh\"", 1)).unwrap();
    let output = run(&["reconstruct", "--config", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown field"));
    fs::remove_dir_all(&out).ok();
}

#[test]
fn failing_symbol_check_exits_two() {
    let out = scratch("fail_symbol");
    let config = configs_dir().join("fail_symbol.json");
    let output = run(&[
        "reconstruct",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("symbol nonvanishing check failed"),
        "{stderr}"
    );
    fs::remove_dir_all(&out).ok();
}

#[test]
fn price_without_pricing_block_exits_one() {
    let config = configs_dir().join("std_normal.json");
    let output = run(&["price", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("pricing"));
}

#[test]
fn price_black_scholes_benchmark() {
    let out = scratch("price_bs");
    let config = configs_dir().join("bs_call.json");
    let output = run(&[
        "price",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("bs_call_result.json")).unwrap())
            .unwrap();
    let price = result["price"].as_f64().unwrap();
    let reference = common::black_scholes_call(100.0, 100.0, 0.05, 0.2, 1.0);
    assert!(
        (price - reference).abs() <= 0.02,
        "price {price} vs closed form {reference}"
    );
    let mass = result["mass_check"].as_f64().unwrap();
    assert!((mass - 1.0).abs() <= 1e-3);
    fs::remove_dir_all(&out).ok();
}

#[test]
fn zero_rate_price_equals_expected_payoff() {
    let out = scratch("price_r0");
    let text = fs::read_to_string(configs_dir().join("bs_call.json")).unwrap();
    let mut config: serde_json::Value = serde_json::from_str(&text).unwrap();
    config["pricing"]["r"] = serde_json::json!(0.0);
    let path = out.join("r0.json");
    fs::write(&path, serde_json::to_vec(&config).unwrap()).unwrap();
    let output = run(&[
        "price",
        "--config",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("bs_call_result.json")).unwrap())
            .unwrap();
    assert_eq!(result["price"], result["expected_payoff"]);
    fs::remove_dir_all(&out).ok();
}

#[test]
fn validate_torus_suite_passes() {
    let out = scratch("validate_torus");
    let output = run(&["validate", "--suite", "torus", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("PASS torus::golomb_cardinality_m8"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("validate_report.json")).unwrap())
            .unwrap();
    assert_eq!(report[0]["suite"], "torus");
    assert_eq!(report[0]["passed"], true);
    fs::remove_dir_all(&out).ok();
}

#[test]
fn validate_cardinal_suite_exports_alpha_csv() {
    let out = scratch("validate_cardinal");
    let output = run(&["validate", "--suite", "cardinal", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let alpha = fs::read_to_string(out.join("alpha.csv")).unwrap();
    assert!(alpha.starts_with("s1,alpha\n"));
    assert_eq!(alpha.lines().count(), 1 + 65); // header plus 2 * 32 + 1 rows
    fs::remove_dir_all(&out).ok();
}

#[test]
fn unknown_suite_exits_one() {
    let output = run(&["validate", "--suite", "nonsense"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown validation suite"));
}

#[test]
fn unknown_flag_exits_one() {
    let output = run(&["reconstruct", "--bogus-flag"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn clamp_negative_flag_is_recorded() {
    let out = scratch("clamp");
    let config = configs_dir().join("cauchy.json");
    let output = run(&[
        "reconstruct",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--clamp-negative",
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let diag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("cauchy_diagnostics.json")).unwrap())
            .unwrap();
    assert_eq!(diag["clamped"], true);
    let csv = fs::read_to_string(out.join("cauchy_density.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(value >= 0.0);
    }
    fs::remove_dir_all(&out).ok();
}
