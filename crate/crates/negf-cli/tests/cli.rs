//! End-to-end behavior of the `negf` binary: validation gating, exit
//! codes, manifest defaults, and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn negf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_negf"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("negf-cli-test-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

const VALID: &str = r#"
[model]
preset = "pristine-chain"

[physics]
eta = 1e-12

[[task]]
kind = "conductance"
alignment = "pc"
distance = 2.05
"#;

#[test]
fn pristine_conductance_csv_matches_golden_row() {
    let dir = temp_dir("golden");
    let config = write_config(&dir, "run.toml", VALID);
    let out = dir.join("out");
    let status = negf()
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("conductance.csv")).unwrap();
    assert_eq!(
        csv,
        "alignment,distance_angstrom,g_up,g_down,g_total\nPC,2.050000000,1.000000000,1.000000000,2.000000000\n"
    );
}

#[test]
fn validation_failure_writes_nothing_and_exits_one() {
    let dir = temp_dir("invalid");
    let bad = r#"
[model]
preset = "pristine-chain"

[physics]
beta = -1.0

[[task]]
kind = "conductance"
alignment = "pc"
distance = 2.05
"#;
    let config = write_config(&dir, "bad.toml", bad);
    let out = dir.join("out");
    let output = negf()
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    // the offending key is named
    assert!(stderr.contains("physics.beta"), "{stderr}");
    assert!(!out.exists(), "no files may be written on validation failure");
}

#[test]
fn all_validation_errors_are_listed() {
    let dir = temp_dir("multi-error");
    let bad = r#"
[model]
preset = "nope"

[contour]
n_poles = 0

[scf]
mixing = 2.0

[[task]]
kind = "mystery"
"#;
    let config = write_config(&dir, "bad.toml", bad);
    let output = negf().args(["run", config.to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    for needle in ["unknown preset", "contour", "mixing", "unknown kind"] {
        assert!(stderr.contains(needle), "missing `{needle}` in: {stderr}");
    }
}

#[test]
fn validate_only_succeeds_without_writing() {
    let dir = temp_dir("validate-only");
    let config = write_config(&dir, "run.toml", VALID);
    let out = dir.join("out");
    let status = negf()
        .args([
            "run",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--validate-only",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(!out.exists());
}

#[test]
fn omitted_contour_defaults_show_in_manifest() {
    let dir = temp_dir("defaults");
    let config = write_config(&dir, "run.toml", VALID);
    let out = dir.join("out");
    assert!(negf()
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let contour = &manifest["resolved"]["contour"];
    assert_eq!(contour["n_poles"], 16);
    assert_eq!(contour["n_circle"], 16);
    assert_eq!(contour["n_line"], 16);
    assert_eq!(manifest["resolved"]["scf"]["max_iter"], 500);
    assert_eq!(manifest["resolved"]["physics"]["kt"], 0.025);
    assert_eq!(manifest["status"], "ok");
}

#[test]
fn unpolarized_tip_mr_column_is_all_zero() {
    let dir = temp_dir("mr-zero");
    let config_text = r#"
[model.left_lead]
h00 = [[0.0]]
h01 = [[-1.0]]
exchange = 1.0

[model.right_lead]
h00 = [[0.0]]
h01 = [[-1.0]]
exchange = 0.0

[model.device]
hamiltonian = [[-0.4, -0.3, 0.0], [-0.3, -1.0, -0.4], [0.0, -0.4, -0.4]]
central_index = 1
u_hubbard = 1.5
coupling_left = [[-0.7, 0.0, 0.0]]
coupling_right = [[0.0, 0.0, -0.6]]

[model.distance_law]
t0 = 1.0
beta = 1.0
d0 = 2.05

[[task]]
kind = "mr"
d_min = 2.2
d_max = 3.4
n_distances = 3
"#;
    let config = write_config(&dir, "run.toml", config_text);
    let out = dir.join("out");
    assert!(negf()
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let csv = fs::read_to_string(out.join("mr_vs_d.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let mr = line.split(',').nth(3).unwrap();
        assert_eq!(mr, "0.000000000", "line: {line}");
        rows += 1;
    }
    assert_eq!(rows, 3);
}

#[test]
fn computation_failure_exits_two_with_manifest_detail() {
    let dir = temp_dir("comp-fail");
    // contour bottom pinned inside the spectrum: the refinement guard
    // rejects the density and the task fails
    let text = r#"
[model]
preset = "copc-analog"

[contour]
e_bottom = -2.0

[[task]]
kind = "conductance"
alignment = "pc"
distance = 2.5
"#;
    let config = write_config(&dir, "run.toml", text);
    let out = dir.join("out");
    let output = negf()
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "failed");
    let status = manifest["tasks"][0]["status"].as_str().unwrap();
    assert!(status.starts_with("error:"), "{status}");
    assert!(!out.join("conductance.csv").exists());
}

#[test]
fn env_var_sets_default_threads_and_flag_overrides() {
    let dir = temp_dir("threads-env");
    let config = write_config(&dir, "run.toml", VALID);
    let out = dir.join("out");
    assert!(negf()
        .env("NEGF_THREADS", "3")
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["threads_requested"], 3);

    let out2 = dir.join("out2");
    assert!(negf()
        .env("NEGF_THREADS", "3")
        .args([
            "run",
            config.to_str().unwrap(),
            "--out",
            out2.to_str().unwrap(),
            "--threads",
            "1",
        ])
        .status()
        .unwrap()
        .success());
    let manifest2: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out2.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest2["threads_requested"], 1);
}

#[test]
fn warm_start_sweep_matches_cold_rows_when_monostable() {
    let dir = temp_dir("warm");
    let base = r#"
[model]
preset = "copc-analog"

[[task]]
kind = "moment"
d_min = 2.2
d_max = 4.0
n_distances = 4
alignments = ["pc"]
"#;
    let cold_cfg = write_config(&dir, "cold.toml", base);
    let warm_cfg = write_config(
        &dir,
        "warm.toml",
        &format!("{base}\n[scf]\nwarm_start = true\n"),
    );
    let cold_out = dir.join("cold");
    let warm_out = dir.join("warm");
    for (cfg, out) in [(&cold_cfg, &cold_out), (&warm_cfg, &warm_out)] {
        assert!(negf()
            .args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .status()
            .unwrap()
            .success());
    }
    let cold = fs::read_to_string(cold_out.join("moment_vs_d.csv")).unwrap();
    let warm = fs::read_to_string(warm_out.join("moment_vs_d.csv")).unwrap();
    // the preset is monostable here, so warm starting only changes the
    // iteration path; converged moments agree to the loop tolerance scale
    for (a, b) in cold.lines().skip(1).zip(warm.lines().skip(1)) {
        let ma: f64 = a.split(',').nth(2).unwrap().parse().unwrap();
        let mb: f64 = b.split(',').nth(2).unwrap().parse().unwrap();
        assert!((ma - mb).abs() < 1e-4, "{ma} vs {mb}");
    }
    let warm_manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(warm_out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(warm_manifest["resolved"]["warm_start"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = temp_dir("repeat");
    let text = r#"
[model]
preset = "copc-analog"

[[task]]
kind = "transmission"
alignment = "apc"
distance = 2.4
e_min = -0.5
e_max = 0.5
n_energies = 11

[[task]]
kind = "iv"
alignment = "pc"
distance = 2.05
v_min = -0.1
v_max = 0.1
n_biases = 5
n_energy_points = 60
"#;
    let config = write_config(&dir, "run.toml", text);
    let out1 = dir.join("out1");
    let out2 = dir.join("out2");
    for out in [&out1, &out2] {
        assert!(negf()
            .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .status()
            .unwrap()
            .success());
    }
    for file in ["transmission.csv", "iv.csv"] {
        let a = fs::read(out1.join(file)).unwrap();
        let b = fs::read(out2.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}
