use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn fratio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fratio"))
        .args(args)
        .env_remove("FRATIO_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = fratio(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn write_temp(dir: &Path, name: &str, content: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

#[test]
fn analyze_constant_series() {
    let v = json_ok(&[
        "analyze",
        fixture("constant_100.csv").to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(v["report"]["measures"]["fr"], 1.0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["report"]["preprocessing"]["detrend"], "none");
    assert!(v.get("generated_at_unix").is_none());
}

#[test]
fn analyze_subgroup_fixture() {
    let v = json_ok(&[
        "analyze",
        fixture("subgroup_15.csv").to_str().unwrap(),
        "--large-spectrum",
        "0.5",
    ]);
    let fr = v["report"]["measures"]["fr"].as_f64().unwrap();
    assert!((fr - 3f64.sqrt()).abs() < 1e-8);
    assert_eq!(
        v["report"]["large_spectrum"]["frequencies"],
        serde_json::json!([0, 5, 10])
    );
    assert!(v["generated_at_unix"].is_u64());
}

#[test]
fn outputs_are_reproducible() {
    let path = fixture("sparse_256.csv");
    let args = [
        "approx",
        path.to_str().unwrap(),
        "--seed",
        "5",
        "--no-timestamp",
    ];
    assert_eq!(fratio(&args).stdout, fratio(&args).stdout);
}

#[test]
fn approx_truncate_keeps_nothing_on_flat_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("value\n1\n");
    text.push_str(&"0\n".repeat(31));
    let delta = write_temp(dir.path(), "delta.csv", &text);
    let out = fratio(&[
        "approx",
        delta.to_str().unwrap(),
        "--mode",
        "truncate",
        "--eta",
        "2",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 32);
    for r in rows {
        assert_eq!(r[2], "0");
        assert_eq!(r[1], r[3]);
    }
}

#[test]
fn approx_l2_meets_accuracy_with_stated_degree() {
    let path = fixture("sparse_256.csv");
    let analyze = json_ok(&["analyze", path.to_str().unwrap()]);
    let fr = analyze["report"]["measures"]["fr"].as_f64().unwrap();
    let eta = 0.2;
    let v = json_ok(&[
        "approx",
        path.to_str().unwrap(),
        "--mode",
        "l2",
        "--eta",
        "0.2",
        "--encode",
    ]);
    let r = &v["report"];
    assert!(r["error_ratio"].as_f64().unwrap() < eta);
    let threshold = (fr * fr - 1.0) / (eta * eta);
    assert_eq!(r["k"].as_u64().unwrap(), threshold.floor() as u64 + 1);
    let enc = &r["encoding"];
    assert!(enc["distortion"].as_f64().unwrap() <= enc["budget"].as_f64().unwrap());
}

#[test]
fn impute_without_gaps_returns_input() {
    let out = fratio(&[
        "impute",
        fixture("sparse_256.csv").to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let original = csv_rows(&std::fs::read_to_string(fixture("sparse_256.csv")).unwrap());
    for (r, o) in rows.iter().zip(&original) {
        let a: f64 = r[1].parse().unwrap();
        let b: f64 = o[1].parse().unwrap();
        assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0));
        assert_eq!(r[3], "1");
    }
}

#[test]
fn impute_recovers_half_missing_sparse_series() {
    let out = fratio(&[
        "impute",
        fixture("sparse_256_gaps.csv").to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let truth = csv_rows(&std::fs::read_to_string(fixture("sparse_256.csv")).unwrap());
    let (mut err, mut norm) = (0.0, 0.0);
    for (r, t) in rows.iter().zip(&truth) {
        let x: f64 = r[1].parse().unwrap();
        let y: f64 = t[1].parse().unwrap();
        err += (x - y).powi(2) + r[2].parse::<f64>().unwrap().powi(2);
        norm += y * y;
    }
    assert!((err / norm).sqrt() <= 1e-4);
    assert_eq!(rows.iter().filter(|r| r[3] == "0").count(), 128);
}

#[test]
fn impute_reports_both_bounds_when_noisy() {
    let v = json_ok(&[
        "impute",
        fixture("sparse_256_gaps.csv").to_str().unwrap(),
        "--eta",
        "0.01",
        "--reference-l2",
        "12",
    ]);
    let b = &v["report"]["bounds"];
    assert!(b["leakage_free"].as_f64().unwrap() > 0.0);
    assert!((b["oracle"].as_f64().unwrap() - 11.47 * 0.01 * 12.0).abs() < 1e-6);
}

#[test]
fn impute_all_missing_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(dir.path(), "gaps.csv", "value\nNaN\n\n");
    assert_eq!(
        fratio(&["impute", p.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn exit_codes() {
    assert_eq!(
        fratio(&["analyze", "/nonexistent.csv"]).status.code(),
        Some(2)
    );
    assert_eq!(fratio(&["analyze", "--bogus"]).status.code(), Some(1));
    let c = fixture("constant_100.csv");
    assert_eq!(
        fratio(&["approx", c.to_str().unwrap(), "--eta", "1.5"])
            .status
            .code(),
        Some(1)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(dir.path(), "bad.csv", "value\n1\n2\nx\n");
    let out = fratio(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn constants_grid_files_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let args = [
        "constants",
        "--n",
        "64,128",
        "--q",
        "3,4",
        "--trials",
        "100",
        "--seed",
        "3",
        "--no-timestamp",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ];
    assert!(fratio(&args).status.success());
    let first = std::fs::read(out_dir.join("constants.json")).unwrap();
    assert!(fratio(&args).status.success());
    assert_eq!(
        first,
        std::fs::read(out_dir.join("constants.json")).unwrap()
    );
    let heat = csv_rows(&std::fs::read_to_string(out_dir.join("constants_cq_exp.csv")).unwrap());
    assert_eq!(heat.len(), 2);
    assert!(heat.iter().all(|r| r.len() == 3));
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["report"]["ct_below_cq_exp"], true);
    assert_eq!(v["config"]["trials"], 100);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fratio"))
        .args(["analyze", fixture("subgroup_15.csv").to_str().unwrap()])
        .env("FRATIO_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("analyze.json").exists());
    assert!(dir.path().join("analyze_report.csv").exists());
}

#[test]
fn noise_smoke_runs() {
    let v = json_ok(&["noise", "perturb", "--sigma", "0.01"]);
    assert_eq!(v["report"]["holds"], true);
    let v = json_ok(&["noise", "gaussian", "--amplitude", "20", "--trials", "100"]);
    assert_eq!(v["report"]["regime_ok"], true);
    assert!(
        v["report"]["violation_rate"].as_f64().unwrap()
            <= v["report"]["allowed_rate"].as_f64().unwrap()
    );
    let v = json_ok(&[
        "noise",
        "fr-average",
        "--amplitude",
        "20",
        "--sigma",
        "0.5",
        "--trials",
        "100",
    ]);
    assert_eq!(v["report"]["median_monotone"], true);
    let v = json_ok(&["noise", "average", "--trials", "50", "--copies", "4"]);
    assert_eq!(v["report"]["points"].as_array().unwrap().len(), 1);
}

#[test]
fn sweep_emits_phase_table() {
    let out = fratio(&[
        "sweep",
        "--n",
        "64",
        "--sparsity",
        "2",
        "--q",
        "8,32",
        "--trials",
        "4",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("q,trials,successes,success_rate"));
    assert_eq!(csv_rows(&text).len(), 2);
}

#[test]
fn restrict_smoke_run() {
    let v = json_ok(&["restrict", "--n", "1024", "--trials", "50"]);
    assert_eq!(v["report"]["trials"], 50);
    assert!(v["report"]["fr_within_allowance"].is_boolean());
}
