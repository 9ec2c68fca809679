use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use siegelkit::fourier::FourierExpansion;
use siegelkit::thetaforms::{lattice_theta_coefficients, lattice_theta_direct, LatticeGram};

fn siegelkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siegelkit"))
        .args(args)
        .env_remove("SIEGELKIT_THREADS")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(path: &Path, f: &FourierExpansion) {
    std::fs::write(path, f.to_json()).unwrap();
}

#[test]
fn certify_chi10_threshold() {
    let out = siegelkit(&["certify", "--g", "2", "--l", "1", "--form", "chi10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["threshold"], 10);
    assert_eq!(v["weight"], 30);
    assert_eq!(v["evidence"].as_array().unwrap().len(), 4);
}

#[test]
fn certify_rejects_genus_mismatch() {
    let out = siegelkit(&["certify", "--g", "3", "--l", "1", "--form", "chi10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_pullback_4_2() {
    let out = siegelkit(&["toroidal", "verify-pullback", "--n", "4", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["multiplicities"], serde_json::json!([2, 2, 2]));
    assert_eq!(v["consistent"], true);
}

#[test]
fn phi_of_e8_genus2_is_e8_genus1() {
    let dir = tempfile::tempdir().unwrap();
    let g2 = dir.path().join("e8_genus2.json");
    let g1 = dir.path().join("e8_genus1.json");
    // Independently generated genus-1 file: the direct enumeration path.
    write(&g2, &lattice_theta_coefficients(&LatticeGram::e8(), 2, 3).unwrap());
    write(&g1, &lattice_theta_direct(&LatticeGram::e8(), 1, 3).unwrap());
    let out = siegelkit(&["phi", "--input", g2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let phi = FourierExpansion::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let expected = FourierExpansion::from_json(&std::fs::read_to_string(&g1).unwrap()).unwrap();
    assert_eq!(phi, expected);
}

#[test]
fn lattice_theta_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = siegelkit(&[
        "lattice-theta",
        "--lattice",
        "e16",
        "--genus",
        "2",
        "--bound",
        "2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let lib = lattice_theta_coefficients(&LatticeGram::e16(), 2, 2).unwrap();
    assert_eq!(serde_json::from_str::<Value>(&written).unwrap(), lib.to_json_value());
}

#[test]
fn cusp_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let e8 = dir.path().join("e8.json");
    write(&e8, &lattice_theta_coefficients(&LatticeGram::e8(), 2, 2).unwrap());
    let out = siegelkit(&["cusp-check", "--input", e8.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["is_cusp"], false);
    assert_eq!(v["witness_coefficient"], "240");

    let schottky = dir.path().join("schottky.json");
    let out = siegelkit(&["named-form", "--name", "schottky", "--genus", "2", "--bound", "2"]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::write(&schottky, &out.stdout).unwrap();
    let out = siegelkit(&["cusp-check", "--input", schottky.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn symmetry_check_on_lattice_theta() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e8.json");
    write(&path, &lattice_theta_coefficients(&LatticeGram::e8(), 2, 3).unwrap());
    let p = path.to_str().unwrap();
    let out = siegelkit(&["symmetry-check", "--input", p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["violations"], 0);
    let out = siegelkit(&["symmetry-check", "--input", p, "--v", "1,1;0,1", "--u", "1,0;0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let out = siegelkit(&["symmetry-check", "--input", p, "--v", "2,0;0,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(siegelkit(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(siegelkit(&["named-form", "--name", "chi18", "--genus", "2"]).status.code(), Some(2));
    assert_eq!(siegelkit(&["theta", "--char", "1:0", "--tau", "1i,0;0,1i"]).status.code(), Some(2));
    assert_eq!(siegelkit(&["theta", "--char", "1:0", "--tau", "1i", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(siegelkit(&["boundary-growth", "--radii", "0.5,0.1"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_siegelkit"))
        .args(["toroidal", "verify-pullback", "--n", "4", "--m", "2"])
        .env("SIEGELKIT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn metric_check_is_deterministic_and_csv() {
    let a = siegelkit(&["metric-check", "--samples", "4", "--seed", "7"]);
    let b = siegelkit(&["metric-check", "--samples", "4", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert!((v["ratio_mean"].as_f64().unwrap() - 0.25).abs() < 1e-12);

    let csv = siegelkit(&["metric-check", "--samples", "2", "--directions", "2", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau_id,direction_id,bergman,hodge,ratio"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn einstein_check_g1_lambda() {
    let out = siegelkit(&["einstein-check", "--genus", "1", "--samples", "2"]);
    assert_eq!(out.status.code(), Some(0));
    for l in json_of(&out)["lambda"].as_array().unwrap() {
        assert!((l.as_f64().unwrap() - 2.0).abs() < 1e-4);
    }
}

#[test]
fn theta_value_at_i() {
    let out = siegelkit(&["theta", "--char", "0:0", "--tau", "1i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    // θ3(i) = π^{1/4} / Γ(3/4)
    let expected = 1.086_434_811_213_308;
    assert!((v["value"][0].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn examples_table_csv() {
    let out = siegelkit(&["examples-table", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let thresholds: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(thresholds, ["10", "9", "8"]);
}
