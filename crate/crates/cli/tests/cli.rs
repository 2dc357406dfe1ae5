use std::path::Path;
use std::process::{Command, Output};

fn nuspectra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nuspectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn spectrum_table_lists_oscillator_levels() {
    let o = nuspectra(&["spectrum", "--A", "0.5", "--n-max", "1", "--nbar-max", "0", "--mbar-max", "0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("2.5000000000"));
    assert!(out.contains("4.5000000000"));
    assert!(out.contains("entries"));
}

#[test]
fn params_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "p.json", r#"{"A": 0.5, "B": 0.0, "C": 0.0, "D": 0.0, "q": 1.0}"#);
    let from_file = nuspectra(&["spectrum", "--params", &file, "--out", "-"]);
    let from_flags = nuspectra(&["spectrum", "--A", "0.5", "--out", "-"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(from_file.stdout, from_flags.stdout);
    let v: serde_json::Value = serde_json::from_slice(&from_file.stdout).unwrap();
    let row = &v.as_array().unwrap()[0];
    for key in ["n", "nbar", "mbar", "branch_radial", "branch_angular", "Lambda", "gamma", "E", "admissible", "reason"] {
        assert!(row.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn spectrum_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = ["spectrum", "--A", "0.7", "--B", "0.3", "--C", "0.4", "--D", "0.9", "--q", "0.5", "--mbar-max", "2"];
    let run = |out: &Path, threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_nuspectra"))
            .args(args)
            .args(["--out", out.to_str().unwrap()])
            .env("NUSPECTRA_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    };
    run(&a, "1");
    run(&b, "4");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn spectrum_csv_format() {
    let o = nuspectra(&["spectrum", "--A", "0.5", "--n-max", "0", "--nbar-max", "0", "--format", "csv", "--out", "-"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("n,nbar,mbar,branch_radial,branch_angular,Lambda,gamma,E,admissible,reason\n"));
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn zero_oscillator_strength_is_invalid_input() {
    let o = nuspectra(&["spectrum", "--A", "0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no bound spectrum"));
    assert_eq!(code(&nuspectra(&["spectrum", "--A", "1", "--mass", "-1"])), 2);
    assert_eq!(code(&nuspectra(&["spectrum"])), 2);
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,theta,phi,psi_re,psi_im,abs2"));
    lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn wavefunction_samples() {
    let o = nuspectra(&["wavefunction", "--A", "0.5", "--r", "1", "--theta", "0.7853981633974483", "--phi", "0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][5] > 0.0 && rows[0][5].is_finite());

    let o = nuspectra(&["wavefunction", "--A", "0.5", "--mbar", "1", "--r", "1", "--theta", "1e-4,0.7853981633974483", "--phi", "0"]);
    let rows = csv_rows(&stdout(&o));
    assert!(rows[0][5] < 1e-6 * rows[1][5]);

    let o = nuspectra(&["wavefunction", "--A", "0.5", "--grid", "4,4,2"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 32);
    assert!(rows.iter().all(|r| r.iter().all(|v| v.is_finite()) && r[5] >= 0.0));
}

#[test]
fn wavefunction_refuses_pole_point_and_bad_state() {
    let o = nuspectra(&["wavefunction", "--A", "0.5", "--r", "1", "--theta", "1.5707963267948966", "--phi", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
    assert!(csv_rows(&stdout(&o)).is_empty());

    let o = nuspectra(&["wavefunction", "--A", "0.5", "--C", "1.125", "--D", "1", "--branch", "s2"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("b = -1"));
}

#[test]
fn verify_golden_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = nuspectra(&["verify", "--n-max", "1", "--nbar-max", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 failed"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let first = report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["verdict"] == "pass")
        .unwrap();
    for key in ["entry", "fd", "residual", "gram_defect", "verdict", "tolerances"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert!(first["fd"]["value"].is_number() && first["fd"]["rel_error"].is_number());
}

#[test]
fn verify_catches_injected_erratum() {
    let o = nuspectra(&["verify", "--n-max", "0", "--nbar-max", "0", "--inject-erratum", "remark-iv"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("FAIL"));
    assert!(out.contains("remark-iv"));
}

#[test]
fn verify_custom_params_and_empty_ranges() {
    let o = nuspectra(&["verify", "--A", "1", "--B", "0.5", "--C", "0.3", "--D", "0.2", "--n-max", "1", "--nbar-max", "1", "--branch", "s1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = nuspectra(&["verify", "--n-max", "-1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 entries"));
    assert_eq!(code(&nuspectra(&["verify", "--tol-fd", "0"])), 2);
}

#[test]
fn nu_solve_families_and_raw_problems() {
    let dir = tempfile::tempdir().unwrap();
    let radial = write(dir.path(), "r.json", r#"{"family": "radial", "abar": 1, "gamma": 0}"#);
    let o = nuspectra(&["nu-solve", &radial, "--n", "0", "--bracket", "1,5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("eigen-parameter (n = 0): 3.000000000000"));

    let angular = write(dir.path(), "a.json", r#"{"family": "angular", "kappa": 2, "dbar": 2, "gamma_theta": 16}"#);
    let o = nuspectra(&["nu-solve", &angular]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("k candidates: 2.0000000000, 4.2500000000"));

    let raw = write(dir.path(), "raw.json", r#"{"tau_tilde": [0.5, -1], "sigma": [0, 1, -1], "sigma_tilde": [-0.5, 4, -4]}"#);
    let json_out = dir.path().join("out.json");
    let o = nuspectra(&["nu-solve", &raw, "--out", json_out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json_out).unwrap()).unwrap();
    assert_eq!(v["k_candidates"].as_array().unwrap().len(), 2);
}

#[test]
fn nu_solve_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cubic = write(dir.path(), "c.json", r#"{"tau_tilde": [0, 1], "sigma": [0, 0, 0, 1], "sigma_tilde": [0]}"#);
    assert_eq!(code(&nuspectra(&["nu-solve", &cubic])), 2);
    let broken = write(dir.path(), "b.json", "{not json");
    assert_eq!(code(&nuspectra(&["nu-solve", &broken])), 2);
    let none = write(dir.path(), "n.json", r#"{"tau_tilde": [1, 1], "sigma": [0, 1], "sigma_tilde": [1, 1]}"#);
    assert_eq!(code(&nuspectra(&["nu-solve", &none])), 4);
}

#[test]
fn classify_reports_case() {
    let o = nuspectra(&["classify", "--A", "0.5", "--C", "1.125", "--D", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tag"], "double_ring");
    assert_eq!(v["agreement"], true);
}
