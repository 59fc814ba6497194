use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypertree-lab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn envelope_and_input_errors_exit_with_two() {
    let out = lab(&["sample", "--d", "2", "--n", "60", "--samples", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the envelope"));
    assert_eq!(code(&lab(&["enumerate", "--d", "2", "--n", "7"])), 2);
    assert_eq!(code(&lab(&["verify", "--d", "1", "--n", "4"])), 2);
    assert_eq!(code(&lab(&["sample", "--d", "2", "--n", "3"])), 2);
    assert_eq!(code(&lab(&["estimate", "--d", "2", "--n", "8", "--samples", "2"])), 2);
}

#[test]
fn verify_skips_beyond_the_envelope() {
    let out = lab(&["verify", "--d", "2", "--n", "7", "--samples", "2000", "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped: n=7"));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["small_cases"]["cases"].as_array().unwrap().len(), 3);
    assert_eq!(doc["goodness_of_fit"].as_array().unwrap().len(), 3);
}

#[test]
fn d1_anchor_behind_override() {
    let out = lab(&["verify", "--d", "1", "--n", "6", "--allow-d1"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let counts: Vec<u64> = doc["small_cases"]["cases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["hypertrees"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, vec![3, 16, 125, 1296]);
}

#[test]
fn sample_writes_frozen_csv_schema_and_estimate_reads_the_log() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = lab(&["sample", "--d", "2", "--n", "7,9", "--samples", "3", "--seed", "4", "--out", out_dir, "--spectra"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "d,n,sample_index,seed,torsion_order,log_torsion_normalized,gram_det_digits,spectral_route_value,wall_ms"
    );
    assert_eq!(csv.lines().count(), 7);
    let log = std::fs::read_to_string(dir.path().join("samples.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(log.lines().next().unwrap()).unwrap();
    for key in ["n", "d", "seed", "faces", "torsion", "gram_det"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert!(Path::new(&dir.path().join("spectra/n7_s0.csv")).exists());

    let est = lab(&["estimate", "--input", out_dir]);
    assert_eq!(code(&est), 0, "{}", String::from_utf8_lossy(&est.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&est.stdout).unwrap();
    assert_eq!(doc["per_n"].as_array().unwrap().len(), 2);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"d": 2, "n_values": [6, 7], "samples_per_n": 2, "master_seed": 9}"#).unwrap();
    let out = lab(&["sample", "--config", cfg.to_str().unwrap(), "--n", "8", "--radius", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["n_values"], serde_json::json!([8]));
    assert_eq!(doc["config"]["master_seed"], 9);
    assert!(doc["diagnostics"][0]["census_classes"].as_u64().unwrap() > 0);
}

#[test]
fn enumerate_and_census_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = lab(&["enumerate", "--d", "2", "--n", "5", "--out", out_dir]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("enumeration_n5_d2.json")).unwrap()).unwrap();
    assert_eq!(doc["summary"]["total_weight"], "125");
    assert_eq!(doc["hypertrees"].as_array().unwrap().len(), 125);

    let out = lab(&["census", "--d", "2", "--n", "8,10", "--samples", "3", "--radius", "2", "--out", out_dir]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("census_n8_r2.csv")).unwrap();
    assert!(csv.starts_with("code,frequency\n"));
}
