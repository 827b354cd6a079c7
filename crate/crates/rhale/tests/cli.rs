//! End-to-end CLI contract tests: exit codes, emitted files, format
//! filtering, schema validity, and SVG well-formedness.

mod common;

use std::path::Path;
use std::process::Command;

fn rhale_cmd(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rhale"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    serde_json::from_str(&text).unwrap()
}

#[test]
fn synth_writes_three_files_and_valid_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let out = rhale_cmd(
        &["synth", "--example", "running", "--n", "120", "--seed", "7"],
        dir.path(),
    );
    assert!(out.status.success());
    let data = std::fs::read_to_string(dir.path().join("data.csv")).unwrap();
    assert!(data.starts_with("x1,x2,x3,y\n"));
    assert_eq!(data.lines().count(), 121);
    assert!(!data.contains('\r'), "line endings must be bare newlines");
    let grads = std::fs::read_to_string(dir.path().join("gradients.csv")).unwrap();
    assert_eq!(grads.lines().count(), 121);
    common::assert_valid_document(&read_json(&dir.path().join("ground_truth.json")));
}

#[test]
fn synth_format_filter_limits_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = rhale_cmd(
        &[
            "synth", "--example", "concept", "--n", "50", "--seed", "1", "--format", "json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(dir.path().join("ground_truth.json").exists());
    assert!(!dir.path().join("data.csv").exists());
    assert!(!dir.path().join("gradients.csv").exists());
}

#[test]
fn explain_emits_valid_effect_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = rhale_cmd(
        &[
            "explain", "--example", "running", "--feature", "0", "--n", "400", "--seed", "2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("effect.json"));
    common::assert_valid_document(&doc);
    assert_eq!(doc["kind"], "effect");
    let n_bins = doc["bins"].as_array().unwrap().len();
    assert!(n_bins >= 2 && n_bins <= 50, "auto binning picked {n_bins} bins");
    let svg = std::fs::read_to_string(dir.path().join("effect.svg")).unwrap();
    common::assert_well_formed_svg(&svg);
}

#[test]
fn explain_fixed_binning_yields_exact_bin_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = rhale_cmd(
        &[
            "explain", "--example", "piecewise", "--binning", "fixed:50", "--n", "1500",
            "--seed", "4",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("effect.json"));
    assert_eq!(doc["bins"].as_array().unwrap().len(), 50);
    assert_eq!(doc["binning"], "fixed:50");
    let limits = doc["partition"].as_array().unwrap();
    assert_eq!(limits.len(), 51);
    let lo = limits[0].as_f64().unwrap();
    let hi = limits[50].as_f64().unwrap();
    for (i, v) in limits.iter().enumerate() {
        let expected = lo + (hi - lo) * i as f64 / 50.0;
        assert!((v.as_f64().unwrap() - expected).abs() < 1e-9);
    }
}

#[test]
fn explain_partition_file_is_used_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let limits_path = dir.path().join("limits.json");
    std::fs::write(&limits_path, "[0.0, 0.5, 1.0]").unwrap();
    let spec = format!("file:{}", limits_path.display());
    let out = rhale_cmd(
        &[
            "explain", "--example", "nonlinear", "--binning", &spec, "--n", "300", "--seed",
            "6",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("effect.json"));
    let limits: Vec<f64> = doc["partition"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(limits, vec![0.0, 0.5, 1.0]);
}

#[test]
fn explain_baseline_produces_valid_pdp_ice() {
    let dir = tempfile::tempdir().unwrap();
    let out = rhale_cmd(
        &[
            "explain", "--example", "running", "--baseline", "pdp-ice", "--n", "150", "--seed",
            "9",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("pdp_ice.json"));
    common::assert_valid_document(&doc);
    assert_eq!(doc["ice"].as_array().unwrap().len(), 150);
    assert_eq!(doc["grid"].as_array().unwrap().len(), 101);
    let svg = std::fs::read_to_string(dir.path().join("pdp_ice.svg")).unwrap();
    common::assert_well_formed_svg(&svg);
}

#[test]
fn explain_consumes_synthesized_csv_pair() {
    let dir = tempfile::tempdir().unwrap();
    let synth_dir = dir.path().join("synth");
    assert!(rhale_cmd(
        &["synth", "--example", "simulation-b", "--n", "250", "--seed", "3"],
        &synth_dir,
    )
    .status
    .success());
    let data = synth_dir.join("data.csv").display().to_string();
    let grads = synth_dir.join("gradients.csv").display().to_string();
    let explain_dir = dir.path().join("explain");
    let out = rhale_cmd(
        &[
            "explain", "--data", &data, "--gradients", &grads, "--feature", "x2",
        ],
        &explain_dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&explain_dir.join("effect.json"));
    common::assert_valid_document(&doc);
    assert_eq!(doc["feature_index"], 1);
    assert_eq!(doc["feature_name"], "x2");
}

#[test]
fn bench_row_count_contract_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = rhale_cmd(
        &[
            "bench", "--example", "piecewise", "--trials", "3", "--n", "120", "--seed", "2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("bench.json"));
    common::assert_valid_document(&doc);
    let k_swept = doc["k_swept"].as_array().unwrap().len();
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    // One row per trial and method (auto plus each swept K), plus a header.
    assert_eq!(csv.lines().count(), 3 * (k_swept + 1) + 1);
    assert!(!csv.contains('\r'));
    for stem in ["bench_l_mu", "bench_l_sigma", "bench_l_rho"] {
        let svg = std::fs::read_to_string(dir.path().join(format!("{stem}.svg"))).unwrap();
        common::assert_well_formed_svg(&svg);
        assert!(svg.contains("auto"), "{stem} is missing the reference line");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown example: invalid input.
    let out = rhale_cmd(&["synth", "--example", "mystery"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // Unknown flag: usage error from the parser.
    let out = rhale_cmd(&["synth", "--example", "running", "--frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // Missing gradients file: I/O error.
    let out = rhale_cmd(
        &["explain", "--data", "/no/such.csv", "--gradients", "/no/such2.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    // Impossible support requirement: infeasible.
    let out = rhale_cmd(
        &[
            "bench", "--example", "piecewise", "--trials", "1", "--n", "50", "--n-ppb", "200",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("infeasible"), "stderr was: {stderr}");
}

#[test]
fn csv_values_round_trip_at_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    assert!(rhale_cmd(
        &["synth", "--example", "running", "--n", "60", "--seed", "13"],
        dir.path(),
    )
    .status
    .success());
    let text = std::fs::read_to_string(dir.path().join("data.csv")).unwrap();
    let mut lines = text.lines();
    lines.next();
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    for field in first {
        let v: f64 = field.parse().unwrap();
        // Shortest round-trip formatting: parsing back reproduces the bits.
        assert_eq!(format!("{v}"), field);
    }
}
