use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sonon::pilot::PilotError;
use sonon::sync::SyncError;
use sonon_cli::output::sha256_hex;
use sonon_cli::CliError;

fn sonon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sonon")).args(args).output().expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn flag_seed_overrides_file_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let config = write_config(tmp.path(), r#"{"subcommand": "bell", "seed": 7, "trials": 1000}"#);
    let o = sonon(&["bell", "--config", &config, "--seed", "42", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["seed"], 42);
    assert_eq!(m["config"]["params"]["trials"], 1000);
}

#[test]
fn minimal_config_gets_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let config = write_config(tmp.path(), &format!(r#"{{"subcommand": "bell", "model": "shared_phase", "output_dir": {:?}}}"#, out));
    let o = sonon(&["bell", "--config", &config]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["seed"], 0);
    assert_eq!(m["config"]["params"]["trials"], 100_000);
    assert_eq!(m["results"]["convention"], m["conventions"]["correlation"]);
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out = out.to_str().unwrap();
    for (args, key) in [
        (vec!["kuramoto", "--angles", "90,200", "--out", out], "angles"),
        (vec!["field-scan", "--polar-deg", "190", "--out", out], "polar_deg"),
        (vec!["bell", "--trials", "10", "--out", out], "trials"),
        (vec!["bell", "--model", "quantum_oracle", "--communication-allowed", "false", "--out", out], "communication"),
        (vec!["pilot-wave", "--scenario", "plane_wave", "--height", "2", "--out", out], "height"),
    ] {
        let o = sonon(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let stderr = String::from_utf8_lossy(&o.stderr);
        assert!(stderr.contains(key), "{args:?}: {stderr}");
    }
    assert!(!Path::new(out).join("manifest.json").exists());
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), r#"{"subcommand": "audit", "presetz": ["weihs1998"]}"#);
    let o = sonon(&["audit", "--config", &config, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("presetz"));
}

#[test]
fn subcommand_mismatch_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), r#"{"subcommand": "kuramoto"}"#);
    let o = sonon(&["bell", "--config", &config]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let o = sonon(&["audit", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn audit_writes_one_report_per_preset() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = sonon(&["audit", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    for preset in ["aspect1982", "weihs1998", "tittel1998", "salart2008"] {
        let report: Value = serde_json::from_str(&fs::read_to_string(out.join(preset).join("audit.json")).unwrap()).unwrap();
        assert_eq!(report["name"], preset);
    }
    let o = sonon(&["audit", "--presets", "weihs1998", "--out", tmp.path().join("one").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(manifest(&tmp.path().join("one"))["files"].as_array().unwrap().len(), 2);
}

#[test]
fn manifest_checksums_and_units_match_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = sonon(&["field-scan", "--samples", "20", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    for f in m["files"].as_array().unwrap() {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&bytes));
        assert_eq!(f["bytes"].as_u64().unwrap(), bytes.len() as u64);
        let header = String::from_utf8(bytes).unwrap().lines().next().unwrap().to_string();
        let names: Vec<&str> = f["columns"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
        assert_eq!(header, names.join(","));
        assert!(f["columns"].as_array().unwrap().iter().all(|c| c["unit"].is_string()));
    }
    let text = fs::read_to_string(out.join("field_scan.csv")).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert!(text.starts_with("r,re_xi,im_xi,abs_xi,chi_far,rel_dev\n"));
}

#[test]
fn kuramoto_tables_have_expected_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = sonon(&["kuramoto", "--angles", "90,180", "--trials", "10", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(sweep.starts_with("angle_deg,trial,final_r,cluster_count\n"));
    assert_eq!(sweep.lines().count(), 21);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("angle_deg,mean_r,std_r,p_1,p_2,p_3\n"));
    assert!(manifest(&out)["results"]["effect_90_vs_180"]["verdict"].is_string());
}

#[test]
fn pilot_wave_emits_trajectories_and_histogram() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = sonon(&["pilot-wave", "--scenario", "gaussian_free", "--trials", "200", "--t-final", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(out.join("trajectories.csv")).unwrap().starts_with("traj_id,t,x\n"));
    assert!(fs::read_to_string(out.join("histogram.csv")).unwrap().starts_with("bin_center,count,psi2\n"));
    let m = manifest(&out);
    assert_eq!(m["results"]["scenario"], "gaussian_free");
    assert_eq!(m["results"]["aborted"], 0);
    assert!(m["results"]["dt"].is_number() && m["results"]["grid"]["samples"].is_number());
}

#[test]
fn module_errors_map_to_exit_codes() {
    assert_eq!(CliError::from(PilotError::EnsembleQuality { aborted: 30, total: 1000 }).exit_code(), 4);
    assert_eq!(CliError::from(PilotError::Unstable { drift: 1.0 }).exit_code(), 3);
    assert_eq!(CliError::from(SyncError::StepTooLarge { dt: 1.0, max_rate: 1.0 }).exit_code(), 3);
    assert_eq!(CliError::from(SyncError::InvalidParameter("x".into())).exit_code(), 2);
}
