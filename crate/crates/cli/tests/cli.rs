use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dicke-trap"));
    cmd.env_remove("DICKE_TRAP_OUT");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn list_shows_bundled_scenarios() {
    let o = run(&["list"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for name in ["fig1", "fig6", "distant", "single-channel-k", "single-channel-gamma"] {
        assert!(out.lines().any(|l| l.starts_with(name)), "{name} missing from {out}");
    }
}

#[test]
fn run_writes_deterministic_tables() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = run(&["run", "fig4", "--out", dir.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for file in ["fig4.csv", "fig4_ode.csv", "fig4_compare.csv", "fig4_dicke.json"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs between runs");
    }
    let csv = std::fs::read_to_string(a.path().join("fig4.csv")).unwrap();
    assert!(csv.starts_with("time_s,c_bt,c_pair,survival\n"));
    assert!(!csv.contains('\r'));
    let last = csv.lines().last().unwrap();
    let c_bt: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((c_bt - 1.0).abs() < 1e-3, "final C_BT {c_bt}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("fig4_dicke.json")).unwrap()).unwrap();
    assert!((report["trapping_probability"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["run", "fig6", "--engine", "analytic"])
        .env("DICKE_TRAP_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("fig6.csv").exists());
    assert!(!dir.path().join("fig6_compare.csv").exists());
}

#[test]
fn seed_fixtures_writes_operator_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "fig1", "--engine", "analytic", "--seed-fixtures", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for n in [2, 3] {
        let text = std::fs::read_to_string(dir.path().join(format!("operators_n{n}.json"))).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v.get("u").is_some());
    }
}

#[test]
fn validate_reports_all_problems_with_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "bad.json",
        r#"{
  "name": "bad",
  "params": {"n_atoms": 0, "coupling": 1, "cavity_rate": 1, "atomic_rate": -1,
             "cavity_freq": 1, "atomic_freq": 1},
  "geometry": {"positions": [[0, 0, 0], [1, 0, 0]], "dipole_direction": [0, 0, 1]},
  "time": {"t_max": 1, "n_points": 10},
  "engine": "analytic",
  "outputs": ["survival"]
}"#,
    );
    let o = run(&["validate", &path]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for field in ["params.n_atoms", "params.atomic_rate", "engine", "geometry.positions"] {
        assert!(err.contains(field), "{field} missing from {err}");
    }

    let good = write_config(dir.path(), "good.json", scenario_text("fig1").as_str());
    let o = run(&["validate", &good]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn syntax_errors_give_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "broken.json", "{\n  \"name\": \"x\",\n  oops\n}");
    let o = run(&["run", &path, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("3:"), "{}", stderr(&o));
}

#[test]
fn engine_override_is_validated() {
    let o = run(&["run", "distant", "--engine", "analytic", "--out", "/nonexistent-never-written"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("point_like"));
}

#[test]
fn missing_file_is_an_io_error() {
    let o = run(&["run", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["validate", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(&scenario_text("fig1")).unwrap();
    cfg["engine"] = "ode".into();
    cfg["ode_step"] = 1e-3.into();
    let path = write_config(dir.path(), "coarse.json", &cfg.to_string());
    let o = run(&["run", &path, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("fig1"));
}

fn scenario_text(name: &str) -> String {
    std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../core/scenarios")
            .join(format!("{name}.json")),
    )
    .unwrap()
}
