//! End-to-end checks of the command-line interface: outputs land where
//! requested, exit codes distinguish validation from numerical failures,
//! and a synthesized spectrum survives the CSV round trip into `fit`.

use std::fs;
use std::process::Command;

use slowlight::constants::Constants;
use slowlight::fit::{synthesize_spectrum, FixedRates, Noise};
use slowlight::spectrum::ModelKind;
use slowlight::MediumParams;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slowlight"))
}

#[test]
fn simulate_builtin_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--out-dir", dir.path().to_str().unwrap(), "simulate", "fig2b"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for ext in ["csv", "svg", "manifest.json"] {
        let p = dir.path().join(format!("fig2b.{ext}"));
        assert!(p.exists(), "missing {}", p.display());
    }
    let csv = fs::read_to_string(dir.path().join("fig2b.csv")).unwrap();
    assert!(csv.lines().count() > 100);
}

#[test]
fn unknown_scenario_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--out-dir", dir.path().to_str().unwrap(), "simulate", "nope"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig2b"));
}

#[test]
fn validate_config_accepts_good_rejects_bad() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(&good, slowlight::scenario::builtin_scenario("fig3c").unwrap()).unwrap();
    let out = bin().arg("validate-config").arg(&good).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"version": 1, "id": "x", "scenario": {"kind": "bogus"}}"#).unwrap();
    let out = bin().arg("validate-config").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn truth_table_prints_four_rows() {
    let out = bin()
        .args(["truth-table", "fig4e", "--trials", "200"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("probe_on,switch_on,mean_detected,std_detected")
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn fit_command_recovers_synthetic_parameters() {
    let g13 = Constants::rb_d1().gamma_e / 2.0;
    let truth = MediumParams {
        od: 5.0,
        gamma13: g13,
        gamma12: 0.05 * g13,
        gamma24: g13,
        rabi_c_sq: (3.0 * g13).powi(2),
        rabi_s_sq: 0.0,
    };
    let rates = FixedRates {
        gamma13: g13,
        gamma24: g13,
    };
    let ge = 2.0 * g13;
    let dets: Vec<f64> = (-40..=40).map(|i| 0.25 * i as f64 * ge).collect();
    let spec =
        synthesize_spectrum(&truth, &rates, 1e-6, &dets, ModelKind::Eit, Noise::None, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("spectrum.csv");
    spec.save_csv(&csv).unwrap();

    let out = bin()
        .arg("fit")
        .arg(&csv)
        .args(["--model", "eit", "--t-p", "1e-6"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("od"), "missing od in report:\n{text}");
    let od_line = text.lines().find(|l| l.starts_with("od = ")).unwrap();
    let od: f64 = od_line.trim_start_matches("od = ").parse().unwrap();
    assert!((od - truth.od).abs() / truth.od < 1e-3, "{od_line}");
}
