use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/paper.json")
}

fn nvcool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nvcool"))
        .args(args)
        .env_remove("NVCOOL_OUT")
        .output()
        .unwrap()
}

fn run_in(scenario: &str, out: &Path, extra: &[&str]) -> Output {
    let cfg = config();
    let mut args = vec![
        scenario,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    nvcool(&args)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn trap_json_has_depth_angle_and_fingerprint() {
    let d = tempfile::tempdir().unwrap();
    let o = run_in("trap", d.path(), &[]);
    assert!(o.status.success());
    let v = json(&d.path().join("trap.json"));
    let depth = v["trap_depth_J"].as_f64().unwrap();
    assert!((depth - 5.6e-21).abs() < 0.15 * 5.6e-21);
    let bm = v["beta_m_rad"].as_f64().unwrap().to_degrees();
    assert!((bm - 4.5).abs() < 0.5);
    assert_eq!(v["config_fingerprint"].as_str().unwrap().len(), 64);
    let meta = json(&d.path().join("trap.json.meta.json"));
    assert_eq!(meta["config_fingerprint"], v["config_fingerprint"]);
    assert!(!d.path().join(".nvcool.lock").exists());
}

#[test]
fn validate_echoes_trap_without_writing() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("never");
    let o = run_in("validate", &out, &[]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["libration_freq_omega0_rad_per_s"].as_f64().unwrap() > 1e7);
    assert!(!out.exists());
}

#[test]
fn exit_codes_distinguish_failures() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run_in("fig5", d.path(), &[]).status.code(), Some(1));
    assert_eq!(nvcool(&["trap"]).status.code(), Some(1));
    assert_eq!(
        run_in("trap", d.path(), &["--set", "zeeman_B1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run_in("trap", d.path(), &["--set", "no_such_key=1"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run_in("trap", d.path(), &["--set", "laser_power=1:parsec"])
            .status
            .code(),
        Some(3)
    );
    let missing = d.path().join("missing.json");
    let o = nvcool(&[
        "trap",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        d.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    // a file where the output directory should go
    let blocker = d.path().join("file");
    fs::write(&blocker, "x").unwrap();
    assert_eq!(run_in("trap", &blocker, &[]).status.code(), Some(4));
}

#[test]
fn locked_output_directory_is_refused() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join(".nvcool.lock"), "123").unwrap();
    let o = run_in("trap", d.path(), &[]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!d.path().join("trap.json").exists());
}

#[test]
fn fig3_csv_and_json_use_degrees_and_radians() {
    let d = tempfile::tempdir().unwrap();
    assert!(run_in("fig3", d.path(), &[]).status.success());
    let csv = fs::read_to_string(d.path().join("fig3.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# config_fingerprint: "));
    assert_eq!(
        lines.next().unwrap(),
        "beta_deg,delta_plus_alpha0_rad_per_s,delta_plus_alphapi_rad_per_s"
    );
    assert_eq!(lines.count(), 241);
    let j = tempfile::tempdir().unwrap();
    assert!(run_in("fig3", j.path(), &["--format", "json"])
        .status
        .success());
    let v = json(&j.path().join("fig3.json"));
    let last = &v["rows"][240];
    assert!((last["beta_rad"].as_f64().unwrap() - 12f64.to_radians()).abs() < 1e-15);
    assert!((v["crossing_beta0_rad"].as_f64().unwrap() - 9f64.to_radians()).abs() < 1e-12);
}

#[test]
fn reruns_are_byte_identical_and_compare_clean() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert!(run_in("fig4", d.path(), &[]).status.success());
    }
    let fa = a.path().join("fig4.csv");
    let fb = b.path().join("fig4.csv");
    assert_eq!(fs::read(&fa).unwrap(), fs::read(&fb).unwrap());
    let o = nvcool(&["compare", fa.to_str().unwrap(), fb.to_str().unwrap()]);
    assert!(o.status.success());
    let c: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(c["mismatches"], 0);
}

#[test]
fn compare_rejects_mixed_fingerprints() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_in("fig4", a.path(), &[]).status.success());
    assert!(run_in("fig4", b.path(), &["--set", "zeeman_B1=2:MHz"])
        .status
        .success());
    let fa = a.path().join("fig4.csv");
    let fb = b.path().join("fig4.csv");
    let o = nvcool(&["compare", fa.to_str().unwrap(), fb.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn compare_reports_value_changes() {
    let a = tempfile::tempdir().unwrap();
    assert!(run_in("fig4", a.path(), &[]).status.success());
    let fa = a.path().join("fig4.csv");
    let text = fs::read_to_string(&fa).unwrap();
    let fb = a.path().join("edited.csv");
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[2] = lines[2].replacen("0.0000000000000000e0", "1.0000000000000000e-9", 1);
    fs::write(&fb, lines.join("\n") + "\n").unwrap();
    let o = nvcool(&["compare", fa.to_str().unwrap(), fb.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_sweep_writes_nothing() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("sweep");
    let o = run_in("sweep", &out, &["--param", "nv_count_n", "--values", ""]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn sweep_over_nv_count_scales_friction() {
    let d = tempfile::tempdir().unwrap();
    let o = run_in(
        "sweep",
        d.path(),
        &[
            "--param",
            "nv_count_n",
            "--values",
            "1,2,4",
            "--beta-deg",
            "2",
            "--format",
            "json",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&d.path().join("sweep.json"));
    let rows = v["rows"].as_array().unwrap();
    let k: Vec<f64> = rows
        .iter()
        .map(|r| r["kappa_beta_h"].as_f64().unwrap())
        .collect();
    let t: Vec<f64> = rows.iter().map(|r| r["T_f_K"].as_f64().unwrap()).collect();
    // per-h units add one rounding on top of the exact SI scaling
    assert!((k[1] - 2.0 * k[0]).abs() <= 4.0 * f64::EPSILON * k[1]);
    assert!((k[2] - 4.0 * k[0]).abs() <= 4.0 * f64::EPSILON * k[2]);
    assert!(t
        .iter()
        .all(|x| (x - t[0]).abs() <= 4.0 * f64::EPSILON * t[0]));
    assert_ne!(rows[0]["config_fingerprint"], rows[1]["config_fingerprint"]);
}

#[test]
fn sweep_locates_temperature_minimum_at_gamma1() {
    let d = tempfile::tempdir().unwrap();
    let values: Vec<String> = (1..=25)
        .map(|i| format!("{}:per_us", 0.2 * f64::from(i) * 5.0))
        .collect();
    let joined = values.join(",");
    let o = run_in(
        "sweep",
        d.path(),
        &[
            "--set",
            "zeeman_B1=20000:rad_per_s",
            "--param",
            "delta_plus_at_rest",
            "--values",
            &joined,
            "--format",
            "json",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&d.path().join("sweep.json"));
    let rows = v["rows"].as_array().unwrap();
    let best = rows
        .iter()
        .min_by(|a, b| {
            a["T_f_closed_form_K"]
                .as_f64()
                .unwrap()
                .total_cmp(&b["T_f_closed_form_K"].as_f64().unwrap())
        })
        .unwrap();
    assert_eq!(best["value"], "5:per_us");
}

#[test]
fn failing_sweep_keeps_partial_results_and_index() {
    let d = tempfile::tempdir().unwrap();
    let o = run_in(
        "sweep",
        d.path(),
        &["--param", "nv_count_n", "--values", "1,2,0,4"],
    );
    assert_eq!(o.status.code(), Some(3));
    let csv = fs::read_to_string(d.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 2);
    let idx = json(&d.path().join("sweep.index.json"));
    assert_eq!(idx["completed"], serde_json::json!([0, 1]));
    assert_eq!(idx["failed_index"], 2);
}

#[test]
fn cool_reproduces_imposed_damping_time() {
    let d = tempfile::tempdir().unwrap();
    let o = run_in("cool", d.path(), &["--kappa-h", "500"]);
    assert!(o.status.success());
    let r = json(&d.path().join("cool_report.json"));
    let fit = r["damping_time_fit_s"].as_f64().unwrap();
    assert!((fit - 2.8e-4).abs() < 0.05 * 2.8e-4, "{fit}");
    assert!(d.path().join("cool_trajectory.csv").exists());
}

#[test]
fn ensemble_rejects_anti_damping_with_physics_code() {
    let d = tempfile::tempdir().unwrap();
    let o = run_in(
        "ensemble",
        d.path(),
        &["--set", "delta_plus_at_rest=-5:per_us", "--n-traj", "2"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_directory_defaults_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let cfg = config();
    let o = Command::new(env!("CARGO_BIN_EXE_nvcool"))
        .args(["trap", "--config", cfg.to_str().unwrap()])
        .env("NVCOOL_OUT", d.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(d.path().join("trap.json").exists());
}
