use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use peppf::engine::PeppfTable;

fn peppf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peppf"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn converge_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"m": 2, "n_max": 2, "samples": 2000}"#,
    );
    let out = peppf(
        &["converge", "--config", &cfg, "--seed", "5", "--out", "o"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("o/convergence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("n,tv,coupling_bound_estimate,coupling_bound_stderr")
    );
    let tv: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(tv.len(), 3);
    assert!((tv[0] - 0.08).abs() < 1e-12 && tv[1].abs() < 1e-12 && tv[2].abs() < 1e-12);
    assert!(String::from_utf8_lossy(&out.stdout).contains("table route"));
}

#[test]
fn missing_seed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = peppf(&["sample-x"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn malformed_and_unknown_fields_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.json", "{ not json");
    assert_eq!(
        peppf(&["shift", "--config", &bad], dir.path())
            .status
            .code(),
        Some(2)
    );
    let unknown = write_config(dir.path(), "u.json", r#"{"command": "shift", "levle": 4}"#);
    assert_eq!(
        peppf(&["--config", &unknown], dir.path()).status.code(),
        Some(2)
    );
    let no_command = peppf(&[], dir.path());
    assert_eq!(no_command.status.code(), Some(2));
}

#[test]
fn threshold_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"m": 3, "n_max": 1, "samples": 500, "threshold": 1e-9,
            "frequencies": {"fixed": {"atoms": [0.5, 0.3, 0.2]}}}"#,
    );
    let out = peppf(&["converge", "--config", &cfg, "--seed", "1"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn table_round_trip_and_corrupted_import() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"level": 6, "frequencies": {"fixed": {"atoms": [0.3, 0.2], "dust": 0.5}}}"#,
    );
    let out = peppf(&["eval-peppf", "--config", &cfg, "--out", "a"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let table_path = dir.path().join("a/table.json");
    let table = PeppfTable::read(&table_path).unwrap();
    assert_eq!(table.len(), 63);
    table.validate().unwrap();

    let reimport = write_config(
        dir.path(),
        "r.json",
        &format!(r#"{{"table": {:?}}}"#, table_path.to_string_lossy()),
    );
    let out = peppf(
        &["eval-peppf", "--config", &reimport, "--out", "b"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        fs::read(&table_path).unwrap(),
        fs::read(dir.path().join("b/table.json")).unwrap()
    );

    // break the addition rule at one composition
    let mut doc: serde_json::Value =
        serde_json::from_slice(&fs::read(&table_path).unwrap()).unwrap();
    let v = doc["values"]["2-1"].as_f64().unwrap();
    doc["values"]["2-1"] = serde_json::json!(v + 0.01);
    let broken = dir.path().join("broken.json");
    fs::write(&broken, serde_json::to_string(&doc).unwrap()).unwrap();
    let cfg = write_config(
        dir.path(),
        "x.json",
        &format!(r#"{{"table": {:?}}}"#, broken.to_string_lossy()),
    );
    let out = peppf(&["eval-peppf", "--config", &cfg, "--out", "c"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("2-1") || err.contains("1-1"), "{err}");
}

#[test]
fn shift_sequence_and_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"level": 5, "n_max": 3}"#);
    let out = peppf(&["shift", "--config", &cfg, "--out", "s"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    for n in 0..=3 {
        let t = PeppfTable::read(&dir.path().join(format!("s/shift_{n}.json"))).unwrap();
        assert_eq!(t.max_level(), 5 - n);
    }
    let out = peppf(&["check-symmetric", "--out", "y"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("y/symmetry.json")).unwrap()).unwrap();
    assert_eq!(report["symmetric"], false);
    assert!((report["max_asymmetry"].as_f64().unwrap() - 0.08).abs() < 1e-12);
}

#[test]
fn chain_kernel_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"frequencies": {"fixed": {"atoms": [0.5, 0.3, 0.2]}}}"#,
    );
    let out = peppf(
        &["chain-kernel", "--config", &cfg, "--out", "k"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("k/kernel.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    for row in csv.lines().skip(1) {
        let sum: f64 = row
            .split(',')
            .skip(1)
            .map(|v| v.parse::<f64>().unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("k/chain.json")).unwrap()).unwrap();
    assert_eq!(report["states"].as_array().unwrap().len(), 6);
    assert!(report["reversal_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn print_config_lists_every_default() {
    let dir = tempfile::tempdir().unwrap();
    let out = peppf(&["--print-config"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let cfg: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in [
        "frequencies",
        "m",
        "n_max",
        "samples",
        "seed",
        "step_cap",
        "table_cap",
        "out",
    ] {
        assert!(cfg.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn sampling_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"m": 4, "samples": 3000,
            "frequencies": {"stick_breaking": {"a": 1.0, "b": 2.0, "depth": 80}}}"#,
    );
    for out in ["r1", "r2"] {
        let o = peppf(
            &[
                "simulate-crp",
                "--config",
                &cfg,
                "--seed",
                "9",
                "--threads",
                "2",
                "--out",
                out,
            ],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["crp_draws.csv", "crp_summary.json"] {
        assert_eq!(
            fs::read(dir.path().join("r1").join(name)).unwrap(),
            fs::read(dir.path().join("r2").join(name)).unwrap()
        );
    }
}
