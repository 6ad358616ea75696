use std::fs;
use std::path::Path;

use assert_cmd::Command;
use serde_json::Value;

fn dlogistic() -> Command {
    let mut cmd = Command::cargo_bin("dlogistic").unwrap();
    cmd.env_remove("DLOGISTIC_OUT_DIR");
    cmd
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn equilibrium_reports_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dlogistic()
        .args(["equilibrium", "--K", "5", "--D", "3", "--r", "2", "--out"])
        .arg(dir.path())
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let printed: Value = serde_json::from_slice(&out).unwrap();
    let n = printed["n_star"].as_f64().unwrap();
    let want = (1.0 + (1.0 + 4.0 * 3.0 / 10.0_f64).sqrt()) * 5.0 / 2.0;
    assert!((n - want).abs() < 1e-12);
    assert_eq!(printed, summary(dir.path()));
}

#[test]
fn simulate_is_byte_for_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        dlogistic()
            .args(["simulate", "--kernel", "gamma:p=2", "--r", "5", "--tau", "3", "--t-end", "40", "--out"])
            .arg(dir.path())
            .assert()
            .success();
    }
    let first = fs::read(a.path().join("trajectory.csv")).unwrap();
    assert_eq!(first, fs::read(b.path().join("trajectory.csv")).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("t,n,delayed\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "command = \"classify\"\nK = 5.0\nD = 3.0\nr = 5.0\nkernel = \"gamma:p=2\"\ntau = 5.0\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    dlogistic().arg("--config").arg(&config).arg("--out").arg(&out).assert().success();
    assert_eq!(summary(&out)["verdict"]["state"], "unstable");

    dlogistic()
        .arg("--config")
        .arg(&config)
        .args(["--tau", "0.5", "--out"])
        .arg(&out)
        .assert()
        .success();
    assert_eq!(summary(&out)["verdict"]["state"], "stable");
}

#[test]
fn output_directory_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    dlogistic()
        .env("DLOGISTIC_OUT_DIR", dir.path())
        .args(["transforms", "--kernel", "uniform:sigma=1", "--omega-max", "3", "--points", "31"])
        .assert()
        .success();
    let csv = fs::read_to_string(dir.path().join("transforms.csv")).unwrap();
    assert!(csv.starts_with("omega,c,s,dc,ds\n"));
    assert_eq!(csv.lines().count(), 32);
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = tempfile::tempdir().unwrap();
    // bad parameter
    dlogistic()
        .args(["classify", "--kernel", "uniform:sigma=2.5", "--tau", "1", "--out"])
        .arg(dir.path())
        .assert()
        .code(2);
    // missing required value
    dlogistic().args(["simulate", "--out"]).arg(dir.path()).assert().code(2);
    // unknown config key
    let config = dir.path().join("bad.toml");
    fs::write(&config, "command = \"equilibrium\"\nbogus = 1\n").unwrap();
    dlogistic().arg("--config").arg(&config).assert().code(2);
    // output path is a regular file
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    dlogistic()
        .args(["equilibrium", "--out"])
        .arg(blocker.join("sub"))
        .assert()
        .code(3);
}

#[test]
fn hopf_rows_lie_on_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    dlogistic()
        .args(["hopf", "--kernel", "gamma:p=3", "--r", "1.8", "--out"])
        .arg(dir.path())
        .assert()
        .success();
    let s = summary(dir.path());
    let taus: Vec<f64> = s["crossings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["tau_m"].as_f64().unwrap())
        .collect();
    assert_eq!(taus.len(), 2);
    assert!((taus[0] - 2.4675).abs() < 1e-3 && (taus[1] - 19.7738).abs() < 1e-3);
    let mut rdr = csv::Reader::from_path(dir.path().join("hopf.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["omega", "r", "tau_m", "crossing"]);
    assert!(rdr.records().count() > 100);
}
