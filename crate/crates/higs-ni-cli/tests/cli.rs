//! End-to-end tests of the binary: exit codes, output files, and
//! determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_higs-ni"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("higs-ni-cli-test-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn verify_ni_exit_codes() {
    let mems = data("mems_model.json");
    let out = run(&["verify-ni", "--system", mems.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{out:?}");

    let non_ni = data("non_ni_example.json");
    let out = run(&["verify-ni", "--system", non_ni.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);

    let out = run(&["verify-ni", "--system", "/no/such/file.json"]);
    assert_eq!(exit_code(&out), 65);
}

#[test]
fn verify_ni_json_schema() {
    let mems = data("mems_model.json");
    let out = run(&["verify-ni", "--system", mems.to_str().unwrap(), "--json"]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ni"], serde_json::json!(true));
    assert_eq!(v["inconclusive"], serde_json::json!(false));
    assert!(v["pole_check"]["pass"].as_bool().unwrap());
    assert!(v["sweep_min"].is_number());
    assert!(v["worst_frequency"].is_number());
    let y = v["certificate"]["y"].as_array().unwrap();
    assert_eq!(y.len(), 2);
    assert!(v["certificate"]["margins"]["min_eig_y"].as_f64().unwrap() > 0.0);
}

#[test]
fn synth_y_exit_codes() {
    let out = run(&["synth-y", "--system", data("mems_model.json").to_str().unwrap(), "--json"]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["y"].as_array().unwrap().len(), 2);

    let out = run(&["synth-y", "--system", data("non_ni_example.json").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 3, "{out:?}");
}

#[test]
fn certify_exit_codes_and_schema() {
    let mems = data("mems_model.json");
    let out = run(&[
        "certify", "--system", mems.to_str().unwrap(),
        "--k-h", "0.4939", "--omega-h", "1.1705e4", "--json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], serde_json::json!("pass"));
    assert!(v["schur_margin"].as_f64().unwrap() > 0.0);
    assert!(v["alpha_identity"]["ok"].as_bool().unwrap());

    let out = run(&[
        "certify", "--system", mems.to_str().unwrap(),
        "--k-h", "1.2", "--omega-h", "1.1705e4", "--json",
    ]);
    assert_eq!(exit_code(&out), 2);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], serde_json::json!("fail"));
    assert!(!v["reasons"].as_array().unwrap().is_empty());

    // scalar special case: 1-state plant passes through the scalar branch
    let dir = tempdir("scalar");
    let scalar = dir.join("scalar.json");
    fs::write(&scalar, r#"{"a": [[-1.0]], "b": [[1.0]], "c": [[1.0]], "d": 0.0}"#).unwrap();
    let out = run(&[
        "certify", "--system", scalar.to_str().unwrap(),
        "--k-h", "0.5", "--omega-h", "10",
    ]);
    assert_eq!(exit_code(&out), 0, "{out:?}");
}

#[test]
fn df_bode_csv_and_flags() {
    let out = run(&["df-bode", "--points", "2"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "freq_hz,mag_db,phase_deg,re,im");

    // --hz grid interpretation and the cutoff marker
    let out = run(&[
        "df-bode", "--k-h", "1", "--omega-h", "1885",
        "--omega-min", "1", "--omega-max", "1000", "--hz", "--points", "10", "--cutoff",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# cutoff_hz,"));
    let first = text.lines().nth(1).unwrap();
    let f0: f64 = first.split(',').next().unwrap().parse().unwrap();
    assert!((f0 - 1.0).abs() < 1e-9, "grid start {f0} Hz");

    // bad parameters are usage errors
    let out = run(&["df-bode", "--k-h", "-1"]);
    assert_eq!(exit_code(&out), 64);
    let out = run(&["df-bode", "--nonsense-flag"]);
    assert_eq!(exit_code(&out), 64);
}

#[test]
fn df_bode_is_deterministic() {
    let args = ["df-bode", "--points", "50"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(exit_code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "identical inputs must give identical CSV");
}

#[test]
fn sweep_table() {
    let mems = data("mems_model.json");
    let out = run(&[
        "sweep", "--system", mems.to_str().unwrap(),
        "--omega-h", "1.1705e4", "--k-h-grid", "0.1,0.4939,0.9,1.2", "--json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["certificate"]["verdict"], serde_json::json!("pass"));
    assert_eq!(rows[3]["certificate"]["verdict"], serde_json::json!("fail"));
    // row order follows the grid
    assert!(rows[0]["k_h"].as_f64().unwrap() < rows[3]["k_h"].as_f64().unwrap());
}

#[test]
fn simulate_free_response_outputs() {
    let dir = tempdir("free");
    let out = run(&[
        "simulate",
        "--scenario", data("mems_free_response.json").to_str().unwrap(),
        "--out-dir", dir.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["w_monitor"], serde_json::json!("enabled"));
    assert!(summary["monitors"]["pass"].as_bool().unwrap());
    assert!(summary["final_combined_norm"].as_f64().unwrap() < 1e-3);

    let csv = fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,e,edot,x_h,u,mode,V,dissipation_residual,x_1,x_2,W,Wdot_est"
    );
    // u column equals x_h
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[3], row[4]);
    assert!(dir.join("monitors.json").exists());
    assert!(!dir.join("open_loop.csv").exists());
}

#[test]
fn simulate_step_disturbance_outputs() {
    let dir = tempdir("step");
    let out = run(&[
        "simulate",
        "--scenario", data("mems_step_disturbance.json").to_str().unwrap(),
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let open = fs::read_to_string(dir.join("open_loop.csv")).unwrap();
    assert!(open.starts_with("t,y,x_1,x_2\n"));
    // open loop settles at the plant DC gain
    let last = open.lines().last().unwrap();
    let y: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((y - 1.00531).abs() < 2e-3, "open-loop DC {y}");
    // closed loop settles at the quasi-linear prediction G0/(1 - kh G0)
    let closed = fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let last = closed.lines().last().unwrap();
    let e: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    let want = 1.0053074 / (1.0 - 0.4939 * 1.0053074);
    assert!((e - want).abs() < 1e-2 * want, "closed-loop DC {e} vs {want}");
}

#[test]
fn simulate_accepts_system_by_path() {
    let dir = tempdir("syspath");
    let scenario = dir.join("scenario.json");
    let model = data("mems_model.json");
    fs::write(
        &scenario,
        format!(
            r#"{{
                "system": "{}",
                "higs": {{"k_h": 0.4939, "omega_h": 11705.0}},
                "x0": [0.003, 0.024],
                "dt": 1e-6,
                "t_final": 2e-3,
                "record_stride": 20
            }}"#,
            model.display()
        ),
    )
    .unwrap();
    let out = run(&[
        "simulate", "--scenario", scenario.to_str().unwrap(),
        "--out-dir", dir.to_str().unwrap(), "--json",
    ]);
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["events"].as_u64().unwrap() > 0);
}

#[test]
fn sweep_with_settling_metric() {
    let mems = data("mems_model.json");
    let out = run(&[
        "sweep", "--system", mems.to_str().unwrap(),
        "--omega-h", "1.1705e4", "--k-h-grid", "0.4939",
        "--simulate", "--x0", "0.003,0.024", "--dt", "1e-6", "--t-final", "0.02",
        "--json",
    ]);
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let settle = v[0]["settling_time"].as_f64().unwrap();
    assert!(settle > 0.0 && settle < 0.02, "settling time {settle}");
}

#[test]
fn simulate_deterministic_output() {
    let d1 = tempdir("det1");
    let d2 = tempdir("det2");
    for d in [&d1, &d2] {
        let out = run(&[
            "simulate",
            "--scenario", data("mems_free_response.json").to_str().unwrap(),
            "--out-dir", d.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0);
    }
    let a = fs::read(d1.join("trajectory.csv")).unwrap();
    let b = fs::read(d2.join("trajectory.csv")).unwrap();
    assert_eq!(a, b, "trajectory CSV must be byte-identical across runs");
}

#[test]
fn simulate_zero_initial_condition() {
    let dir = tempdir("zero");
    let scenario = dir.join("zero.json");
    fs::write(
        &scenario,
        r#"{
            "system": {"a": [[-1.0]], "b": [[1.0]], "c": [[1.0]], "d": 0.0},
            "higs": {"k_h": 0.5, "omega_h": 10.0},
            "x0": [0.0],
            "dt": 1e-3,
            "t_final": 0.1
        }"#,
    )
    .unwrap();
    let out = run(&[
        "simulate", "--scenario", scenario.to_str().unwrap(),
        "--out-dir", dir.to_str().unwrap(), "--json",
    ]);
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["final_combined_norm"], serde_json::json!(0.0));
    assert_eq!(summary["events"], serde_json::json!(0));
}

#[test]
fn reproduce_figures() {
    let dir = tempdir("repro");
    for figure in ["1", "3", "4", "5", "6"] {
        let out = run(&["reproduce", "--figure", figure, "--out-dir", dir.to_str().unwrap()]);
        assert_eq!(exit_code(&out), 0, "figure {figure}: {out:?}");
    }
    let bundles: Vec<_> = fs::read_dir(&dir).unwrap().collect();
    assert_eq!(bundles.len(), 5);
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(path.join("manifest.json")).unwrap())
                .unwrap();
        for f in manifest["files"].as_array().unwrap() {
            assert!(path.join(f.as_str().unwrap()).exists());
        }
        if manifest["figure"] == serde_json::json!(4) {
            let damping = manifest["notes"]["resonance_damping_db"].as_f64().unwrap();
            assert!(damping > 5.0, "peak-to-peak damping {damping}");
        }
    }
    // unknown figure id is a usage error
    let out = run(&["reproduce", "--figure", "9", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 64);
}

#[test]
fn help_and_usage_exit_codes() {
    let out = run(&["--help"]);
    assert_eq!(exit_code(&out), 0);
    let out = run(&["no-such-command"]);
    assert_eq!(exit_code(&out), 64);
    let out = run(&[]);
    assert_eq!(exit_code(&out), 64);
}
