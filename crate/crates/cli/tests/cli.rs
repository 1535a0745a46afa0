//! End-to-end tests of the `landauer` binary: the committed golden
//! distribution, bound verification (including the corrupted-bound negative
//! control), config-file handling, and schema validation of every JSON
//! document the tool emits. Output determinism lives in
//! `tests/acceptance.rs`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_landauer"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("landauer-cli-{tag}-{}", std::process::id()));
    if dir.exists() {
        std::fs::remove_dir_all(&dir).unwrap();
    }
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_ok(args: &[&str]) -> Output {
    let output = binary().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "command {args:?} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {path:?}: {e}"))
}

#[test]
fn distribution_matches_the_committed_golden_oracle_file() {
    let dir = temp_dir("golden");
    run_ok(&[
        "distribution",
        "--beta",
        "1.0",
        "--step-energy",
        "0.5",
        "--num-steps",
        "8",
        "--swap-prob",
        "0.5",
        "--therm-steps",
        "2",
        "--output",
        dir.to_str().unwrap(),
    ]);

    let parse_csv = |text: &str| -> Vec<(f64, f64)> {
        text.lines()
            .skip(1)
            .map(|line| {
                let mut fields = line.split(',');
                let value: f64 = fields.next().unwrap().parse().unwrap();
                let prob: f64 = fields.next().unwrap().parse().unwrap();
                (value, prob)
            })
            .collect()
    };
    let golden = parse_csv(&read(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/distribution.csv"),
    ));
    let emitted = parse_csv(&read(&dir.join("distribution.csv")));
    assert_eq!(golden.len(), emitted.len());
    let mut total_variation = 0.0;
    for ((gv, gp), (ev, ep)) in golden.iter().zip(&emitted) {
        assert_eq!(gv, ev);
        total_variation += 0.5 * (gp - ep).abs();
    }
    assert!(
        total_variation < 1e-12,
        "total variation {total_variation:.3e} against the golden file"
    );
}

#[test]
fn single_stage_distribution_is_the_fair_coin() {
    let dir = temp_dir("coin");
    run_ok(&[
        "distribution",
        "--num-steps",
        "1",
        "--step-energy",
        "0.7",
        "--output",
        dir.to_str().unwrap(),
    ]);
    let csv = read(&dir.join("distribution.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "0.0000000000000000e0,5.0000000000000000e-1");
    assert_eq!(lines[2], "6.9999999999999996e-1,5.0000000000000000e-1");
}

#[test]
fn verify_passes_and_corrupted_bounds_fail_by_name() {
    let dir = temp_dir("verify");
    let output = run_ok(&["verify", "--output", dir.to_str().unwrap()]);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("verify: PASS"), "{stdout}");
    assert!(dir.join("report.json").exists());

    let corrupted = binary()
        .args(["verify", "--corrupt-bound", "concentration"])
        .output()
        .unwrap();
    assert!(!corrupted.status.success());
    let stdout = String::from_utf8(corrupted.stdout).unwrap();
    assert!(stdout.contains("FAIL"), "{stdout}");
    assert!(stdout.contains("concentration"), "{stdout}");
    // Only the corrupted bound may fail.
    for line in stdout.lines().filter(|l| l.starts_with("FAIL")) {
        assert!(line.contains("concentration"), "unexpected failure: {line}");
    }
}

#[test]
fn grid_points_without_swapping_are_flagged_unbounded_not_failed() {
    let dir = temp_dir("unbounded");
    run_ok(&["verify", "--output", dir.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_str(&read(&dir.join("report.json"))).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    let checks = report["checks"].as_array().unwrap();
    // The quick grid includes swap_prob = 0 and therm_steps = 0 points whose
    // sensitivity-dependent bounds are meaningless; they must be flagged.
    let unbounded: Vec<&serde_json::Value> = checks
        .iter()
        .filter(|c| c["status"] == "unbounded")
        .collect();
    assert!(!unbounded.is_empty());
    for check in &unbounded {
        let bound = check["bound"].as_str().unwrap();
        assert!(
            bound == "concentration" || bound == "single-shot-work",
            "unexpected unbounded check {bound}"
        );
        assert!(check["margin"].is_null());
    }
    assert!(checks.iter().all(|c| c["status"] != "fail"));
}

#[test]
fn config_file_values_are_used_and_flags_override_them() {
    let dir = temp_dir("config");
    let config_path = dir.join("run.conf");
    std::fs::write(
        &config_path,
        "beta = 2.0\nnum_steps = 4\nstep_energy = 0.25\nswap_prob = 0.9\ntherm_steps = 1\n",
    )
    .unwrap();
    let out_a = dir.join("a");
    run_ok(&[
        "distribution",
        "--config",
        config_path.to_str().unwrap(),
        "--output",
        out_a.to_str().unwrap(),
    ]);
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out_a.join("summary.json"))).unwrap();
    assert_eq!(summary["config"]["beta"], 2.0);
    assert_eq!(summary["config"]["num_steps"], 4);

    // The flag wins over the file.
    let out_b = dir.join("b");
    run_ok(&[
        "distribution",
        "--config",
        config_path.to_str().unwrap(),
        "--beta",
        "3.5",
        "--output",
        out_b.to_str().unwrap(),
    ]);
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out_b.join("summary.json"))).unwrap();
    assert_eq!(summary["config"]["beta"], 3.5);
}

#[test]
fn invalid_configs_fail_fast_with_the_field_name() {
    let output = binary()
        .args(["distribution", "--beta=-1.0"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("beta"), "{stderr}");
}

#[test]
fn engine_with_equal_baths_nets_roughly_nothing() {
    let dir = temp_dir("equal-baths");
    run_ok(&[
        "engine",
        "--t-cold",
        "1.5",
        "--t-hot",
        "1.5",
        "--e-max",
        "3.0",
        "--num-steps",
        "400",
        "--swap-prob",
        "1.0",
        "--therm-steps",
        "1",
        "--output",
        dir.to_str().unwrap(),
    ]);
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.join("summary.json"))).unwrap();
    let net = summary["net_work"].as_f64().unwrap();
    let step = 3.0 / 400.0;
    assert!(net.abs() <= step, "net {net} vs step {step}");
    assert_eq!(summary["engine_regime"], serde_json::Value::Bool(false));
    // Threshold time is a pass-through of the analytic expression and only
    // defined in the engine regime.
    assert!(summary["threshold_time"].is_null());
}

#[test]
fn engine_threshold_field_matches_the_analytic_value() {
    let dir = temp_dir("threshold");
    run_ok(&[
        "engine",
        "--t-cold",
        "1.0",
        "--t-hot",
        "2.0",
        "--e-max",
        "4.0",
        "--num-steps",
        "100",
        "--swap-prob",
        "0.4",
        "--therm-steps",
        "2",
        "--output",
        dir.to_str().unwrap(),
    ]);
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.join("summary.json"))).unwrap();
    let threshold = summary["threshold_time"].as_f64().unwrap();
    let quasi_net = summary["quasistatic_net_work"].as_f64().unwrap();
    let expected = (1.0f64 - 4.0 / quasi_net).ln() / -(1.0f64 - 0.4).ln();
    assert!((threshold - expected).abs() < 1e-12);
}

#[test]
fn engine_sweep_power_peaks_at_finite_time_and_efficiency_grows() {
    let dir = temp_dir("sweep");
    run_ok(&[
        "sweep",
        "--kind",
        "engine",
        "--param",
        "therm-steps",
        "--values",
        "1:20",
        "--t-cold",
        "1.0",
        "--t-hot",
        "2.0",
        "--e-max",
        "4.0",
        "--num-steps",
        "100",
        "--swap-prob",
        "0.05",
        "--output",
        dir.to_str().unwrap(),
    ]);
    let csv = read(&dir.join("sweep.csv"));
    let mut produced_power = Vec::new();
    let mut eta_lower = Vec::new();
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        produced_power.push(-fields[3].parse::<f64>().unwrap());
        eta_lower.push(fields[6].parse::<f64>().unwrap());
    }
    assert_eq!(produced_power.len(), 20);
    let peak = produced_power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert!(peak > 0 && peak < 19, "power peak at index {peak}");
    for pair in eta_lower.windows(2) {
        assert!(
            pair[1] >= pair[0] - 1e-12,
            "eta_lower not monotone: {pair:?}"
        );
    }
}

#[test]
fn coherence_demo_reports_zero_penalty_without_rotation() {
    let dir = temp_dir("coherence");
    let output = run_ok(&[
        "coherence-demo",
        "--steps",
        "8",
        "--output",
        dir.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("corrected"));
    let csv = read(&dir.join("coherence.csv"));
    let first_row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let penalty: f64 = first_row[5].parse().unwrap();
    assert!(penalty.abs() < 1e-12);
    // The measurement-model column must reproduce the sudden work.
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let sudden: f64 = fields[2].parse().unwrap();
        let model: f64 = fields[4].parse().unwrap();
        assert!((sudden - model).abs() < 1e-12);
    }
}

// ---------------------------------------------------------------------------
// Schema validation: a minimal JSON-Schema subset validator (type, required,
// properties, items, enum) applied to every emitted JSON document.
// ---------------------------------------------------------------------------

fn type_matches(value: &serde_json::Value, type_name: &str) -> bool {
    match type_name {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "number" => value.is_number(),
        "integer" => value.is_i64() || value.is_u64(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        _ => false,
    }
}

fn validate(value: &serde_json::Value, schema: &serde_json::Value, path: &str) -> Vec<String> {
    let mut errors = Vec::new();
    if let Some(types) = schema.get("type") {
        let allowed: Vec<String> = match types {
            serde_json::Value::String(t) => vec![t.clone()],
            serde_json::Value::Array(list) => list
                .iter()
                .map(|t| t.as_str().unwrap().to_string())
                .collect(),
            _ => vec![],
        };
        if !allowed.iter().any(|t| type_matches(value, t)) {
            errors.push(format!("{path}: expected {allowed:?}"));
            return errors;
        }
    }
    if let Some(options) = schema.get("enum") {
        if !options.as_array().unwrap().contains(value) {
            errors.push(format!("{path}: {value} not in {options}"));
        }
    }
    if value.is_object() {
        if let Some(required) = schema.get("required") {
            for key in required.as_array().unwrap() {
                let key = key.as_str().unwrap();
                if value.get(key).is_none() {
                    errors.push(format!("{path}: missing required key `{key}`"));
                }
            }
        }
        if let Some(properties) = schema.get("properties") {
            for (key, sub_schema) in properties.as_object().unwrap() {
                if let Some(sub_value) = value.get(key) {
                    errors.extend(validate(sub_value, sub_schema, &format!("{path}.{key}")));
                }
            }
        }
    }
    if let (Some(items), Some(list)) = (schema.get("items"), value.as_array()) {
        for (index, item) in list.iter().enumerate() {
            errors.extend(validate(item, items, &format!("{path}[{index}]")));
        }
    }
    errors
}

fn assert_valid(instance_path: &Path, schema_name: &str) {
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(schema_name);
    let schema: serde_json::Value = serde_json::from_str(&read(&schema_path)).unwrap();
    let instance: serde_json::Value = serde_json::from_str(&read(instance_path)).unwrap();
    let errors = validate(&instance, &schema, "$");
    assert!(
        errors.is_empty(),
        "{instance_path:?} violates {schema_name}:\n{}",
        errors.join("\n")
    );
}

#[test]
fn emitted_json_validates_against_the_shipped_schemas() {
    let dir = temp_dir("schemas");

    let dist_dir = dir.join("dist");
    run_ok(&[
        "distribution",
        "--num-steps",
        "6",
        "--samples",
        "1000",
        "--seed",
        "3",
        "--output",
        dist_dir.to_str().unwrap(),
    ]);
    assert_valid(
        &dist_dir.join("summary.json"),
        "distribution_summary.schema.json",
    );

    // Zero effective swapping exercises the null (unbounded) branches.
    let frozen_dir = dir.join("frozen");
    run_ok(&[
        "distribution",
        "--num-steps",
        "6",
        "--therm-steps",
        "0",
        "--output",
        frozen_dir.to_str().unwrap(),
    ]);
    assert_valid(
        &frozen_dir.join("summary.json"),
        "distribution_summary.schema.json",
    );

    let engine_dir = dir.join("engine");
    run_ok(&[
        "engine",
        "--num-steps",
        "50",
        "--output",
        engine_dir.to_str().unwrap(),
    ]);
    assert_valid(
        &engine_dir.join("summary.json"),
        "engine_summary.schema.json",
    );

    let verify_dir = dir.join("verify");
    run_ok(&["verify", "--output", verify_dir.to_str().unwrap()]);
    assert_valid(&verify_dir.join("report.json"), "verify_report.schema.json");

    let sweep_dir = dir.join("sweep-engine");
    run_ok(&[
        "sweep",
        "--kind",
        "engine",
        "--values",
        "1:4",
        "--num-steps",
        "50",
        "--format",
        "json",
        "--output",
        sweep_dir.to_str().unwrap(),
    ]);
    assert_valid(&sweep_dir.join("sweep.json"), "sweep_engine.schema.json");

    let reset_dir = dir.join("sweep-reset");
    run_ok(&[
        "sweep",
        "--kind",
        "reset",
        "--param",
        "swap-prob",
        "--values",
        "0.2,0.5,1.0",
        "--n-bits",
        "4",
        "--eps",
        "0.01",
        "--format",
        "json",
        "--output",
        reset_dir.to_str().unwrap(),
    ]);
    assert_valid(&reset_dir.join("sweep.json"), "sweep_reset.schema.json");
}
