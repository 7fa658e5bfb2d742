//! End-to-end checks of the binary: scenario runs, profile round trips,
//! exit codes.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_warpcav"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("warpcav-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const TORSION: &str = r#"
config_version = 1
name = "torsion"
[geometry]
kind = "space_form"
curvature = 0.0
dimension = 3
radius = 1.0
[problem]
type = "elliptic"
lambda = 1.0
gamma = 0.0
[certification]
alphas = [1.0]
pairs = 16
params = 3
seed = 7
[solver]
grid = 1024
dt = 1e-4
tol = 1e-9
"#;

#[test]
fn run_torsion_scenario_end_to_end() {
    let dir = tmp_dir("run");
    let cfg = write_config(&dir, "torsion.toml", TORSION);
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .arg("--format")
        .arg("csv,json,svg")
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("T1.1"), "missing verdict line: {stdout}");
    for file in ["report.json", "certificates.json", "profile_solution.csv", "profile_solution.svg"] {
        assert!(dir.join("out/torsion").join(file).exists(), "{file} missing");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/torsion/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["scenario"], "torsion");
    assert_eq!(report["verdicts"][0]["verdict"], "certified_strict");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn certify_ingests_emitted_profile() {
    let dir = tmp_dir("certify");
    let cfg = write_config(&dir, "torsion.toml", TORSION);
    let out_dir = dir.join("out");
    let status = bin()
        .args(["solve-elliptic", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let profile = out_dir.join("torsion/profile_solution.csv");
    assert!(profile.exists());
    let out = bin()
        .args(["certify", "--config"])
        .arg(&cfg)
        .arg("--profile")
        .arg(&profile)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("CertifiedStrict"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn conditions_and_thresholds_commands() {
    let dir = tmp_dir("cond");
    let cfg = write_config(&dir, "torsion.toml", TORSION);
    let out = bin()
        .args(["conditions", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("C2-necessary") && text.contains("holds=true"));

    let out = bin()
        .args(["thresholds", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(out.status.success());
    // flat N=3: A = 2/pi^2 = 0.2026...
    assert!(String::from_utf8_lossy(&out.stdout).contains("A = 0.20264"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn execution_error_gives_exit_one() {
    let dir = tmp_dir("err");
    let cfg = write_config(&dir, "bad.toml", &TORSION.replace("gamma = 0.0", "gamma = 2.0"));
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn violated_certificate_gives_exit_two() {
    // ring initial data is not log-concave at early times
    let dir = tmp_dir("violated");
    let text = r#"
config_version = 1
name = "ring-early"
[geometry]
kind = "space_form"
curvature = -1.0
dimension = 2
radius = 1.0
[problem]
type = "parabolic"
kind = "heat"
initial = "ring"
t_end = 0.002
times = [0.001, 0.002]
[certification]
alphas = [0.0]
pairs = 4
params = 3
seed = 1
[solver]
grid = 256
dt = 5e-5
tol = 1e-8
"#;
    let cfg = write_config(&dir, "ring.toml", text);
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn env_var_overrides_out_dir() {
    let dir = tmp_dir("env");
    let cfg = write_config(&dir, "torsion.toml", TORSION);
    let status = bin()
        .args(["conditions", "--config"])
        .arg(&cfg)
        .env("WARPCAV_OUT", dir.join("envout"))
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.join("envout/torsion/report.json").exists());
    let _ = std::fs::remove_dir_all(&dir);
}
