//! End-to-end checks of the command-line surface: artifact round trips,
//! byte determinism and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geomgate"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("geomgate-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn geomgate");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn plan_emits_expected_table_and_curves() {
    let out = tmp_dir("plan");
    run_ok(&[
        "plan",
        "--axis",
        "z",
        "--gamma",
        "pi/8",
        "--theta-mid",
        "pi/3",
        "--cap",
        "1.0",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = read(&out.join("plan.csv"));
    assert!(csv.starts_with(
        "family,theta_mid,gamma,length_spherical,length_paramsum,time_times_cap,fidelity"
    ));
    // τ·Ω̄ for the three-segment plan: π/3 + √3π/16 ≈ 0.4415π.
    let want = std::f64::consts::PI / 3.0 + 3f64.sqrt() * std::f64::consts::PI / 16.0;
    let three: Vec<&str> = csv
        .lines()
        .find(|l| l.starts_with("three_segment"))
        .expect("three_segment row")
        .split(',')
        .collect();
    let got: f64 = three[5].parse().unwrap();
    assert!((got - want).abs() < 1e-10);
    assert!((got / std::f64::consts::PI - 0.4415).abs() < 5e-4);
    for f in ["orange_slice.json", "three_segment_1.json", "min_circle.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
}

#[test]
fn planned_curves_reload_into_simulate() {
    let out = tmp_dir("roundtrip");
    run_ok(&[
        "plan",
        "--axis",
        "z",
        "--gamma",
        "pi/8",
        "--out",
        out.to_str().unwrap(),
    ]);
    for curve in ["orange_slice.json", "three_segment_1.json", "min_circle.json"] {
        let sim_out = out.join(format!("sim-{curve}"));
        run_ok(&[
            "simulate",
            "--curve",
            out.join(curve).to_str().unwrap(),
            "--target",
            "z:pi/8",
            "--out",
            sim_out.to_str().unwrap(),
        ]);
        let report = read(&sim_out.join("report.json"));
        let doc: serde_json::Value = serde_json::from_str(&report).unwrap();
        let fidelity = doc["report"]["fidelity_vs_target"].as_f64().unwrap();
        assert!(fidelity >= 1.0 - 1e-6, "{curve}: fidelity {fidelity}");
    }
}

#[test]
fn simulate_reports_fig1_numbers() {
    let out = tmp_dir("fig1");
    run_ok(&[
        "plan",
        "--axis",
        "z",
        "--gamma",
        "pi/8",
        "--out",
        out.to_str().unwrap(),
    ]);
    let sim_out = out.join("sim");
    run_ok(&[
        "simulate",
        "--curve",
        out.join("orange_slice.json").to_str().unwrap(),
        "--target",
        "z:pi/8",
        "--trajectory",
        "--out",
        sim_out.to_str().unwrap(),
    ]);
    let doc: serde_json::Value =
        serde_json::from_str(&read(&sim_out.join("report.json"))).unwrap();
    let report = &doc["report"];
    assert!(report["fidelity_vs_target"].as_f64().unwrap() >= 1.0 - 1e-8);
    let hol = report["holonomy_principal"].as_array().unwrap();
    let pi8 = std::f64::consts::PI / 8.0;
    assert!((hol[0].as_f64().unwrap() + pi8).abs() < 1e-8);
    assert!((hol[1].as_f64().unwrap() - pi8).abs() < 1e-8);
    // Trajectory CSV exists and starts at the initial state.
    let traj = read(&sim_out.join("trajectory.csv"));
    let first_row = traj.lines().nth(1).unwrap();
    assert!(first_row.starts_with("0.0000000000000000e0,1.0000000000000000e0"));
}

#[test]
fn identical_inputs_give_byte_identical_outputs() {
    let a = tmp_dir("det-a");
    let b = tmp_dir("det-b");
    for out in [&a, &b] {
        run_ok(&[
            "sweep",
            "--axis",
            "1,1,1",
            "--gamma",
            "pi/4",
            "--warps",
            "3",
            "--seed",
            "11",
            "--n-steps",
            "512",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    for f in ["sweep.csv", "sweep.json"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f} differs");
    }
}

#[test]
fn sweep_sanity_row_is_clean() {
    let out = tmp_dir("sweep");
    run_ok(&[
        "sweep",
        "--axis",
        "z",
        "--gamma",
        "pi/8",
        "--warps",
        "2",
        "--n-steps",
        "1024",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = read(&out.join("sweep.csv"));
    // First data row is the zero-amplitude sanity probe.
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "amplitude_scale");
    let magnitude: f64 = row[4].parse().unwrap();
    assert_eq!(magnitude, 0.0);
    let fidelity: f64 = row[5].parse().unwrap();
    assert!(fidelity >= 1.0 - 1e-6);
}

#[test]
fn ion_check_writes_report_with_slope() {
    let out = tmp_dir("ion");
    run_ok(&[
        "ion-check",
        "--ratios",
        "20,40",
        "--area",
        "pi/16",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = read(&out.join("ion_check.csv"));
    assert!(csv.starts_with(
        "ratio,eta,n_max,subspace_fidelity,leakage,phase_error,block_fidelity"
    ));
    assert_eq!(csv.lines().count(), 3);
    let doc: serde_json::Value =
        serde_json::from_str(&read(&out.join("ion_check.json"))).unwrap();
    assert!(doc["report"]["infidelity_slope"].is_number());
}

#[test]
fn missing_curve_file_is_a_config_error() {
    let out = bin()
        .args([
            "simulate",
            "--curve",
            "/definitely/not/here.json",
            "--target",
            "z:pi/8",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("machine-readable error");
    assert_eq!(err["error"]["code"], 2);
    assert_eq!(err["error"]["kind"], "config");
}

#[test]
fn garbage_curve_file_is_a_config_error() {
    let dir = tmp_dir("garbage");
    std::fs::create_dir_all(&dir).unwrap();
    let curve = dir.join("empty.json");
    std::fs::write(&curve, "").unwrap();
    let out = bin()
        .args([
            "simulate",
            "--curve",
            curve.to_str().unwrap(),
            "--target",
            "z:pi/8",
            "--out",
            dir.join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_angle_token_is_a_config_error() {
    let out = bin()
        .args(["plan", "--axis", "z", "--gamma", "pie/8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn open_curve_gets_the_path_exit_code() {
    let dir = tmp_dir("open");
    std::fs::create_dir_all(&dir).unwrap();
    let curve = dir.join("open.json");
    std::fs::write(
        &curve,
        r#"{"segments":[{"kind":"meridian","phi":0.0,"theta_from":0.3,"theta_to":1.1,"duration_fraction":1.0}],"tau":1.0}"#,
    )
    .unwrap();
    let out = bin()
        .args([
            "simulate",
            "--curve",
            curve.to_str().unwrap(),
            "--target",
            "z:pi/8",
            "--out",
            dir.join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5), "{}", String::from_utf8_lossy(&out.stderr));
}
