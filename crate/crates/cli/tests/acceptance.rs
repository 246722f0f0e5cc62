//! CLI acceptance: determinism of seeded runs and the bundled audit
//! configs' headline numbers.
//!
//! Run with `cargo test -p pqcm-cli --test acceptance -- --nocapture`.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pqcm"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Criterion — repeating any CLI run with the same seed reproduces
/// byte-identical numerical JSON output (and CSV); a different seed does
/// not.
#[test]
fn determinism_byte_identical_reruns() {
    let cfg = configs().join("audit-qubit-fourier.json");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let status = bin()
            .args(["audit", "--config", cfg.to_str().unwrap(), "--out"])
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let report_a = read(&dirs[0].path().join("audit-report.json"));
    let report_b = read(&dirs[1].path().join("audit-report.json"));
    assert_eq!(report_a, report_b, "audit reports differ between reruns");
    let trials_a = read(&dirs[0].path().join("audit-trials.csv"));
    let trials_b = read(&dirs[1].path().join("audit-trials.csv"));
    assert_eq!(trials_a, trials_b, "trial CSVs differ between reruns");

    // A different seed must change the numerical payload.
    let reseeded = tempfile::tempdir().unwrap();
    let alt_cfg = reseeded.path().join("alt.json");
    let mut cfg_json: Value =
        serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    cfg_json["seed"] = Value::from(8u64);
    std::fs::write(&alt_cfg, serde_json::to_string(&cfg_json).unwrap()).unwrap();
    let status = bin()
        .args(["audit", "--config", alt_cfg.to_str().unwrap(), "--out"])
        .arg(reseeded.path())
        .status()
        .unwrap();
    assert!(status.success());
    let report_c = read(&reseeded.path().join("audit-report.json"));
    assert_ne!(report_a, report_c, "different seed reproduced identical payload");

    // Seeded one-shot commands are byte-stable on stdout as well.
    for args in [
        vec![
            "usd",
            "--input",
            configs().join("states-overlap-05.json").to_str().unwrap(),
            "--seed",
            "42",
        ],
        vec![
            "rsp",
            "--alpha",
            "0.7071067811865476,0.7071067811865476",
            "--phases",
            "0,2.2",
            "--trials",
            "20",
            "--seed",
            "42",
        ],
    ] {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let out_a = bin().args(&args).arg("--out").arg(dir_a.path()).output().unwrap();
        let out_b = bin().args(&args).arg("--out").arg(dir_b.path()).output().unwrap();
        assert!(out_a.status.success());
        assert_eq!(out_a.stdout, out_b.stdout, "{args:?} stdout differs");
    }
    println!("[PASS] determinism: byte-identical reports, CSVs, and stdout for repeated seeds");
}

/// The bundled qubit Fourier-triple config reproduces the headline audit
/// numbers through the CLI.
#[test]
fn bundled_qubit_config_headline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("audit-qubit-fourier.json");
    let out = bin()
        .args(["audit", "--config", cfg.to_str().unwrap(), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("violation = true"), "summary: {summary}");

    let report: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("audit-report.json")).unwrap(),
    )
    .unwrap();
    let conditional = report["conditional_info_bits"].as_f64().unwrap();
    assert!(
        (conditional - 3.0f64.log2()).abs() < 0.01,
        "conditional = {conditional}"
    );
    assert_eq!(report["violation"], Value::Bool(true));
    assert_eq!(report["decode_error_count"].as_u64(), Some(0));
    assert_eq!(report["classical_cost_bits"].as_f64(), Some(1.0));
    println!(
        "[PASS] bundled qubit config: conditional {conditional:.6} bits ≈ log2 3, violation = true"
    );
}

/// The no-cloner variant of the bundled config shows no violation.
#[test]
fn bundled_no_cloner_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("audit-qubit-fourier-none.json");
    let out = bin()
        .args(["audit", "--config", cfg.to_str().unwrap(), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("audit-report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["violation"], Value::Bool(false));
    let unconditional = report["unconditional_info_bits"].as_f64().unwrap();
    assert!(unconditional <= 1.0 + 0.01, "unconditional = {unconditional}");
    println!(
        "[PASS] bundled no-cloner config: unconditional {unconditional:.6} bits ≤ 1, violation = false"
    );
}
