use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_biphoton"))
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

/// Bundled config with a narrower scan so each run stays quick.
fn narrowed(dir: &TempDir, name: &str, half_fs: f64, extra: &str) -> PathBuf {
    let text = std::fs::read_to_string(bundled(name)).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["scan"]["tau_start_fs"] = (-half_fs).into();
    v["scan"]["tau_stop_fs"] = half_fs.into();
    if !extra.is_empty() {
        let patch: Value = serde_json::from_str(extra).unwrap();
        for (k, val) in patch.as_object().unwrap() {
            v[k] = val.clone();
        }
    }
    let path = dir.path().join(format!("{half_fs}_{name}"));
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn simulate(config: &Path, out: &Path, engine: &str) -> std::process::Output {
    bin()
        .args(["simulate", "--config"])
        .arg(config)
        .args(["--engine", engine, "--out"])
        .arg(out)
        .output()
        .unwrap()
}

fn analyze(csv: &Path) -> (i32, Value, String) {
    let o = bin().args(["analyze", "--in"]).arg(csv).output().unwrap();
    let stdout = String::from_utf8(o.stdout).unwrap();
    let v = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (
        o.status.code().unwrap(),
        v,
        String::from_utf8(o.stderr).unwrap(),
    )
}

#[test]
fn default_mzi_round_trip() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("mzi.csv");
    let o = simulate(&bundled("default_mzi.json"), &csv, "closed");
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("tau_fs,singles_port1,singles_port2,coincidence,engine\n"));
    assert_eq!(text.lines().count(), 2002);
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line
            .split(',')
            .take(4)
            .map(|c| c.parse().unwrap())
            .collect();
        assert!((cols[1] + cols[2] - 2.0).abs() <= 1e-8, "{line}");
    }
    let (code, r, _) = analyze(&csv);
    assert_eq!(code, 0);
    assert!(r["v1"].as_f64().unwrap() >= 0.99);
    let p = r["fringe_period_singles"].as_f64().unwrap();
    assert!((p / 2.702e-15 - 1.0).abs() <= 0.01, "{p}");
}

#[test]
fn default_mzim_round_trip() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("mzim.csv");
    assert_eq!(
        simulate(&bundled("default_mzim.json"), &csv, "closed")
            .status
            .code(),
        Some(0)
    );
    let (code, r, _) = analyze(&csv);
    assert_eq!(code, 0);
    assert!(r["v1"].as_f64().unwrap() <= 0.02);
    assert!(r["v12"].as_f64().unwrap() >= 0.99);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = narrowed(&dir, "default_mzim.json", 20.0, "");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    simulate(&cfg, &a, "oracle");
    simulate(&cfg, &b, "oracle");
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert!(!a.contains(&b'\r'));
}

#[test]
fn both_engines_report_agreement() {
    let dir = TempDir::new().unwrap();
    let cfg = narrowed(&dir, "default_mzi.json", 10.0, "");
    let csv = dir.path().join("both.csv");
    let o = simulate(&cfg, &csv, "both");
    assert_eq!(o.status.code(), Some(0));
    let summary = String::from_utf8(o.stdout).unwrap();
    let deltas: Vec<f64> = summary
        .trim()
        .trim_start_matches("max |delta| closed vs oracle: ")
        .split(", ")
        .map(|p| p.rsplit(' ').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(deltas.len(), 3, "{summary}");
    assert!(deltas.iter().all(|d| *d <= 1e-6), "{summary}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with(",closed")).count(), 101);
    assert_eq!(text.lines().filter(|l| l.ends_with(",oracle")).count(), 101);
    let (code, r, _) = analyze(&csv);
    assert_eq!(code, 0);
    assert!(r["closed"]["v1"].is_number() && r["oracle"]["v1"].is_number());
}

#[test]
fn csv_to_stdout_keeps_summary_on_stderr() {
    let dir = TempDir::new().unwrap();
    let cfg = narrowed(&dir, "default_mzi.json", 4.0, "");
    let o = bin()
        .args(["simulate", "--engine", "both", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("tau_fs,"));
    assert!(String::from_utf8(o.stderr)
        .unwrap()
        .starts_with("max |delta|"));
}

#[test]
fn json_output_format() {
    let dir = TempDir::new().unwrap();
    let cfg = narrowed(
        &dir,
        "default_mzi.json",
        2.0,
        r#"{"output": {"format": "json"}}"#,
    );
    let o = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 21);
    assert_eq!(v[0]["engine"], "closed");
}

#[test]
fn analyze_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "tau,intensity\n1,2\n").unwrap();
    let (code, _, err) = analyze(&bad);
    assert_eq!(code, 1);
    assert!(err.contains("tau,intensity"), "{err}");

    let csv = dir.path().join("mzi.csv");
    simulate(
        &narrowed(&dir, "default_mzi.json", 10.0, ""),
        &csv,
        "closed",
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let cut = dir.path().join("cut.csv");
    std::fs::write(&cut, &text[..text.len() / 2 - 7]).unwrap();
    assert_eq!(analyze(&cut).0, 1);
    assert_eq!(analyze(&dir.path().join("missing.csv")).0, 1);
}

#[test]
fn analyze_window_flag() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("mzi.csv");
    simulate(
        &narrowed(&dir, "default_mzi.json", 30.0, ""),
        &csv,
        "closed",
    );
    let o = bin()
        .args(["analyze", "--window", "-1:1", "--in"])
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r["window"][0].as_f64().unwrap() + 1e-15).abs() < 1e-24);
    let o = bin()
        .args(["analyze", "--window", "3:1", "--in"])
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_configs_exit_1_with_diagnostics() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (
            r#"{"filter": {"center_nm": 810, "bandwidth_nm": 900, "shape": "rectangular"}}"#,
            "bandwidth_nm",
        ),
        (
            r#"{"scan": {"tau_start_fs": -10, "tau_stop_fs": 10, "tau_step_fs": 2.0}}"#,
            "scan",
        ),
        (
            r#"{"grids": {"spatial_points": 256, "spectral_points": 1025, "spatial_halfwidth_mm": 3.0}}"#,
            "spatial_points",
        ),
    ];
    for (patch, needle) in cases {
        let cfg = narrowed(&dir, "default_mzi.json", 10.0, patch);
        let o = bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .output()
            .unwrap();
        let err = String::from_utf8(o.stderr).unwrap();
        assert_eq!(o.status.code(), Some(1), "{patch}: {err}");
        assert!(err.contains(needle), "{patch}: {err}");
    }
    let broken = dir.path().join("broken.json");
    std::fs::write(
        &broken,
        "{\n  \"pump\": {\n    \"wavelength_nm\": 405,\n  }\n}",
    )
    .unwrap();
    let o = bin()
        .args(["simulate", "--config"])
        .arg(&broken)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line"));
    assert_eq!(
        bin().args(["simulate"]).output().unwrap().status.code(),
        Some(1)
    );
    assert_eq!(
        bin().args(["--help"]).output().unwrap().status.code(),
        Some(0)
    );
}

#[test]
fn mixed_parity_pump_fails_closed_form_with_exit_2() {
    let dir = TempDir::new().unwrap();
    let patch = r#"{"pump": {"wavelength_nm": 405, "spatial_profile": {"kind": "shifted_gaussian", "waist_mm": 1.0, "offset_mm": 0.5}},
                    "interferometer": {"kind": "mzim"}}"#;
    let cfg = narrowed(&dir, "default_mzi.json", 4.0, patch);
    let o = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .args(["simulate", "--engine", "oracle", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

fn compare(cfg: &Path, engine: &str) -> Value {
    let o = bin()
        .args(["compare", "--engine", engine, "--config"])
        .arg(cfg)
        .output()
        .unwrap();
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn compare_default_state() {
    let v = compare(&bundled("default_mzim.json"), "closed");
    assert_eq!(v["coincidence_identical"], true);
    assert!(v["mzi"]["v1"].as_f64().unwrap() >= 0.99);
    assert!(v["mzim"]["v1"].as_f64().unwrap() <= 0.02);
}

#[test]
fn compare_shifted_and_odd_pumps() {
    let dir = TempDir::new().unwrap();
    let shifted = narrowed(
        &dir,
        "default_mzi.json",
        10.0,
        r#"{"pump": {"wavelength_nm": 405, "spatial_profile": {"kind": "shifted_gaussian", "waist_mm": 1.0, "offset_mm": 0.5}}}"#,
    );
    let v = compare(&shifted, "oracle");
    assert_eq!(v["engine"], "oracle");
    assert_eq!(v["coincidence_identical"], false);
    let ratio = v["coincidence_fringe"]["amplitude_ratio"].as_f64().unwrap();
    // |β| for a 0.5 mm offset of a 1 mm waist: exp(-2·0.5²/1²)
    assert!((ratio - (-0.5f64).exp()).abs() < 1e-3, "{ratio}");

    let odd = narrowed(
        &dir,
        "default_mzi.json",
        10.0,
        r#"{"pump": {"wavelength_nm": 405, "spatial_profile": {"kind": "hg1", "waist_mm": 1.0}}}"#,
    );
    let v = compare(&odd, "closed");
    let f = &v["coincidence_fringe"];
    assert!((f["phase_difference"].as_f64().unwrap().abs() - std::f64::consts::PI).abs() < 1e-3);
    assert!((f["amplitude_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn tabulated_pump_profile_resolves_relative_path() {
    let dir = TempDir::new().unwrap();
    let mut table = String::new();
    for j in -300..=300 {
        let x = j as f64 * 0.01;
        table.push_str(&format!("{x},{}\n", (-x * x).exp()));
    }
    std::fs::write(dir.path().join("pump.csv"), table).unwrap();
    let patch = r#"{"pump": {"wavelength_nm": 405, "spatial_profile": {"kind": "tabulated_file", "path": "pump.csv"}}}"#;
    let cfg = narrowed(&dir, "default_mzim.json", 4.0, patch);
    let out = dir.path().join("t.csv");
    let o = simulate(&cfg, &out, "closed");
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
