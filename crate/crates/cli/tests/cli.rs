use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nks3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nks3")).args(args).env_remove("NKS3_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn sidecar(path: &Path) -> Value {
    json(&path.with_extension("csv.report.json"))
}

fn fixture(dir: &Path, name: &str, n: &str, h: &str) -> std::path::PathBuf {
    let out = dir.join(format!("{name}.csv"));
    let o = nks3(&[
        "--command", "fixture", "--fixture", name, "--nu", n, "--nv", n, "--du", h, "--dv", h,
        "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn fixture_output_is_deterministic_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let a = fixture(dir.path(), "example1", "101", "0.01");
    let first = std::fs::read(&a).unwrap();
    let b = fixture(dir.path(), "example1", "101", "0.01");
    assert_eq!(first, std::fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(first).unwrap().lines().count(), 10202);
    assert_eq!(sidecar(&a)["rows"], 10201);
    assert_eq!(sidecar(&a)["version"].as_str().unwrap(), concat!("nks3 ", env!("CARGO_PKG_VERSION")));
}

#[test]
fn verify_with_no_samples_has_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = nks3(&["--command", "verify", "--samples", "0", "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = json(&out);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["samples"] == 0));
}

#[test]
fn verify_passes_and_perturbed_j_fails() {
    let o = nks3(&["--command", "verify", "--samples", "200"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["config"]["seed"], 42);
    let o = nks3(&["--command", "verify", "--samples", "200", "--j-perturbation", "1e-3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn seed_environment_override() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_nks3"))
            .args(["--command", "verify", "--samples", "10", "--seed", "1"])
            .env("NKS3_SEED", seed)
            .output()
            .unwrap()
    };
    let o = run("99");
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["config"]["seed"], 99);
    assert_eq!(code(&run("not-a-seed")), 3);
}

#[test]
fn analyze_classifies_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let e2 = fixture(dir.path(), "example2", "41", "0.01");
    let o = nks3(&["--command", "analyze", "--input", e2.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["classification"], "normal");
    assert!((r["K_mean"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-8);

    let e1 = fixture(dir.path(), "example1", "41", "0.01");
    let out = dir.path().join("a.json");
    let o = nks3(&["--command", "analyze", "--input", e1.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&out)["classification"], "tangent");
}

#[test]
fn non_adapted_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let st = fixture(dir.path(), "example1_st", "21", "0.01");
    let o = nks3(&["--command", "analyze", "--input", st.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&nks3(&["--command", "analyze", "--input", "/nonexistent.csv"])), 3);
    assert_eq!(code(&nks3(&["--command", "fixture", "--fixture", "example1"])), 3);
}

#[test]
fn to_h_on_example2_is_a_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let e2 = fixture(dir.path(), "example2", "41", "0.01");
    let out = dir.path().join("h.csv");
    let o = nks3(&["--command", "to-h", "--input", e2.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = sidecar(&out);
    assert!((r["sphere_radius"].as_f64().unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-4);
    assert_eq!(r["metric_factor"]["status"], "ratio");
}

#[test]
fn from_h_on_cylinder_reconstructs_flat_surface() {
    let dir = tempfile::tempdir().unwrap();
    let cyl = fixture(dir.path(), "cmc_cylinder", "41", "0.01");
    let out = dir.path().join("s.csv");
    let o = nks3(&["--command", "from-h", "--input", cyl.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = sidecar(&out);
    assert!(r["surface"]["K_max_dev"].as_f64().unwrap() < 1e-3);
    assert!(r["surface"]["K_mean"].as_f64().unwrap().abs() < 1e-3);
    assert!(out.exists());
}

#[test]
fn from_h_rejects_a_plane() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("plane.csv");
    let mut text = String::from("u,v,x,y,z\n");
    for j in 0..11 {
        for i in 0..11 {
            let (u, v) = (i as f64 * 0.01, j as f64 * 0.01);
            text.push_str(&format!("{u},{v},{},{v},{}\n", u + v, 2.0 * u));
        }
    }
    std::fs::write(&input, text).unwrap();
    let out = dir.path().join("s.csv");
    let o = nks3(&["--command", "from-h", "--input", input.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}
