use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nongauss"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nongauss-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &PathBuf, body: &str) -> PathBuf {
    let path = dir.join("run.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn sweep_writes_data_and_sidecar() {
    let dir = scratch("sweep");
    let cfg = write_config(&dir, r#"{"mu_c": [1, 2], "tau_max": 6.283185307179586, "tau_steps": 201, "small_mu": true}"#);
    let out = dir.join("d.csv");
    let st = bin().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 402);
    for r in &rows {
        let delta: f64 = r[col("delta")].parse().unwrap();
        let witness: f64 = r[col("witness")].parse().unwrap();
        assert!(delta >= 0.0 && witness <= delta);
        assert!(r[col("nu_minus")].parse::<f64>().unwrap() >= 1.0);
    }
    for i in [0, 200, 201, 401] {
        assert!(rows[i][col("delta")].parse::<f64>().unwrap() <= 1e-9);
    }
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("d.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["tau_steps"], 201);
    assert!(meta["wall_time_s"].as_f64().is_some());
    assert!(meta["version"].is_string());

    let again = dir.join("e.csv");
    assert!(bin().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(&again).status().unwrap().success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn both_engines_report_their_discrepancy() {
    let dir = scratch("both");
    let cfg = write_config(&dir, r#"{"engine": "both", "mu_c": 0.3, "g0": 1, "tau_max": 3.0, "tau_steps": 7}"#);
    let out = dir.join("b.csv");
    assert!(bin().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap().success());
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("b.meta.json")).unwrap()).unwrap();
    let d = meta["max_discrepancy"].as_f64().unwrap();
    assert!(d <= 1e-3, "{d}");
    assert!(meta["points"][0]["truncation"]["n_phonon"].as_u64().unwrap() >= 40);
}

#[test]
fn compare_passes_for_moderate_amplitude() {
    let dir = scratch("compare");
    let cfg = write_config(&dir, r#"{"mu_c": 0.5, "g0": 1, "tau_max": 6.283185307179586, "tau_steps": 9}"#);
    let out = dir.join("report.json");
    let st = bin().args(["compare", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(st.success());
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rep["pass"], true);
    assert!(rep["max"].as_f64().unwrap() <= 1e-3);
    assert_eq!(rep["points"][0]["per_tau"].as_array().unwrap().len(), 9);
}

#[test]
fn exit_codes_separate_config_and_numerical_failures() {
    let dir = scratch("codes");
    let bad = write_config(&dir, r#"{"tau_max": 1.0, "tau_steps": 1}"#);
    let st = bin().args(["sweep", "--config"]).arg(&bad).arg("--out").arg(dir.join("x.csv")).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let noisy = dir.join("noisy.json");
    std::fs::write(&noisy, r#"{"tau_max": 1.0, "tau_steps": 3, "kappa_c": 0.1}"#).unwrap();
    let st = bin().args(["sweep", "--config"]).arg(&noisy).arg("--out").arg(dir.join("x.csv")).status().unwrap();
    assert_eq!(st.code(), Some(2));

    assert_eq!(bin().args(["figure", "fig1"]).arg("--out").arg(&dir).status().unwrap().code(), Some(2));

    let tight = dir.join("tight.json");
    std::fs::write(&tight, r#"{"mu_c": 5, "tau_max": 3.0, "tau_steps": 3, "n_photon": 30, "n_phonon": 40}"#).unwrap();
    let out = bin().args(["compare", "--config"]).arg(&tight).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation too small"));
}

#[test]
fn coeffs_dumps_json() {
    let out = bin().args(["coeffs", "--profile", "constant", "--g0", "1", "--tau", "3.141592653589793"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let theta = v[0]["theta_a"].as_f64().unwrap();
    assert!((theta + 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!((v[0]["f_re"].as_f64().unwrap() + 2.0).abs() < 1e-12);
}

#[test]
fn figure_preset_writes_one_file() {
    let dir = scratch("figure");
    assert!(bin().args(["figure", "fig3a", "--out"]).arg(&dir).status().unwrap().success());
    let text = std::fs::read_to_string(dir.join("fig3a.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 41 * 4 * 2);
    assert!(dir.join("fig3a.meta.json").exists());
}
