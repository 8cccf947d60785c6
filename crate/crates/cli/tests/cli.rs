//! End-to-end runs of the `qfed` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qfed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfed"))
        .args(args)
        .env_remove("QFED_WORKERS")
        .output()
        .expect("spawn qfed")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn cavity_config(dir: &Path, emitter: &str, quantity: &str) -> String {
    let toml = stdout(&qfed(&["fixtures", "--emitter", emitter, "--quantity", quantity]));
    write(dir, &format!("{emitter}-{quantity}.toml"), &toml)
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(2)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn cavity_ldos_from_fixture_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cavity_config(dir.path(), "empty", "ldos");
    let csv = stdout(&qfed(&["run", "--config", &cfg]));
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "energy_eV,x_um,rho_e,rho_m,rho_tot");
    assert!(lines[1].starts_with("#eV,um,"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 101);
    // standing wave in the empty cavity: electric node and magnetic antinode
    // at the centre, at the same height
    let centre = &rows[50];
    assert!((centre[1] - 6.0).abs() < 1e-12);
    let e_max = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    let m_max = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    assert!(centre[2] < 0.1 * e_max);
    assert!((centre[3] - m_max).abs() <= 1e-9 * m_max);
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cavity_config(dir.path(), "magnetic", "photon-number");
    let out = dir.path().join("n.json");
    let status = qfed(&["run", "--config", &cfg, "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(stdout(&status).is_empty());
    let doc: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(doc["columns"], serde_json::json!(["energy_eV", "x_um", "n_e", "n_m", "n_tot"]));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 101);
    assert_eq!(doc["meta"]["quantity"], "photon-number");
    assert_eq!(doc["meta"]["config_sha256"].as_str().unwrap().len(), 64);

    let csv = stdout(&qfed(&["run", "--config", &cfg]));
    for (j, c) in doc["rows"].as_array().unwrap().iter().zip(data_rows(&csv)) {
        for (a, b) in j.as_array().unwrap().iter().zip(c) {
            assert_eq!(a.as_f64().unwrap().to_bits(), b.to_bits());
        }
    }
}

#[test]
fn uniform_temperature_gives_equilibrium_occupation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "eq.toml",
        r#"
quantity = "photon-number"
[[layers]]
eps_re = 2.0
eps_im = 0.1
temperature_K = 300.0
[[layers]]
thickness_um = 1.5
eps_re = 4.0
eps_im = 0.4
mu_re = 1.2
mu_im = 0.1
temperature_K = 300.0
[[layers]]
eps_re = 1.5
eps_im = 0.05
mu_im = 0.02
temperature_K = 300.0
[frequency]
energy_eV = 0.1
[positions]
min_um = -1.0
max_um = 2.5
count = 8
"#,
    );
    let rows = data_rows(&stdout(&qfed(&["run", "--config", &cfg])));
    assert_eq!(rows.len(), 8);
    let c = qfed::PhysicalConstants::default();
    let eta = qfed::bose_einstein(c.omega_from_ev(0.1), 300.0, &c);
    for r in rows {
        for n in &r[2..] {
            assert!((n - eta).abs() <= 1e-6 * eta, "{n} vs {eta}");
        }
    }
}

#[test]
fn empty_grid_emits_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "empty.toml",
        r#"
quantity = "ldos"
[[layers]]
eps_re = 1.0
[frequency]
energy_eV = 0.1
[positions]
list_um = []
"#,
    );
    let csv = stdout(&qfed(&["run", "--config", &cfg]));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn invalid_config_reports_the_layer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        r#"
quantity = "ldos"
[[layers]]
eps_re = 1.0
[[layers]]
thickness_um = -2.0
eps_re = 3.0
[[layers]]
eps_re = 1.0
[frequency]
energy_eV = 0.1
[positions]
list_um = [0.0]
"#,
    );
    let out = qfed(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("layers[1]"), "{err}");
}

#[test]
fn verify_passes_on_config_and_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cavity_config(dir.path(), "magnetic", "verify");
    for args in [vec!["verify", "--config", &cfg], vec!["verify"]] {
        let out = qfed(&args);
        assert_eq!(out.status.code(), Some(0));
        let csv = stdout(&out);
        let rows: Vec<_> = csv.lines().skip(2).collect();
        assert!(rows.len() >= 7);
        assert!(rows.iter().all(|l| l.contains(",true,true,")), "{csv}");
    }
}

#[test]
fn output_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cavity_config(dir.path(), "electric", "net-emission");
    let one = qfed(&["run", "--config", &cfg, "--workers", "1"]);
    let many = qfed(&["run", "--config", &cfg, "--workers", "4"]);
    assert_eq!(stdout(&one), stdout(&many));
}
