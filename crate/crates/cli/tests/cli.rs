use std::process::{Command, Output};

fn semisym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semisym")).args(args).output().unwrap()
}

#[test]
fn passing_checks_exit_zero() {
    let out = semisym(&["check-semisymmetry", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["verdict"], "pass");
    assert_eq!(json["command"], "check-semisymmetry");
}

#[test]
fn tampered_support_function_exits_one() {
    let out = semisym(&["verify-closed-form", "--tamper", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let failing: Vec<&str> = json["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["pass"] == false)
        .map(|r| r["check"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["support_function_system"]);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[params]\na = 0.6\nb = 0.8\nc = [0.0, 0.0, 0.0, 0.0]\nextra = 1\n").unwrap();
    assert_eq!(semisym(&["char-poly", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let off_sphere = dir.path().join("off.toml");
    std::fs::write(&off_sphere, "[params]\na = 0.6\nb = 0.6\nc = [0.0, 0.0, 0.0, 0.0]\n").unwrap();
    assert_eq!(semisym(&["char-poly", "--config", off_sphere.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(semisym(&["mesh", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    assert_eq!(semisym(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn flat_sphere_parameters_use_the_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flat.toml");
    std::fs::write(&cfg, "samples = 20\n[params]\na = 1.0\nb = 0.0\nc = [0.5, -0.3, 0.2, 0.4]\n").unwrap();
    let out = semisym(&["verify-closed-form", "--config", cfg.to_str().unwrap()]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{json}");
    let checks: Vec<&str> = json["records"].as_array().unwrap().iter().map(|r| r["check"].as_str().unwrap()).collect();
    assert!(checks.contains(&"constant_normal"));
}

#[test]
fn reports_and_fields_go_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let field = dir.path().join("field.csv");
    let cfg = dir.path().join("grid.toml");
    std::fs::write(&cfg, "[grid]\nnx = 9\nny = 9\n").unwrap();
    // four RK4 steps per node gap are too few on this grid
    let coarse = semisym(&["solve-r-constructive", "--config", cfg.to_str().unwrap()]);
    assert_eq!(coarse.status.code(), Some(2));
    std::fs::write(&cfg, "[grid]\nnx = 9\nny = 9\n[solver]\nsteps = 200\n").unwrap();
    let out = semisym(&[
        "solve-r-constructive",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
        "--field-out",
        field.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["seed"], 42);
    let csv = std::fs::read_to_string(&field).unwrap();
    assert_eq!(csv.lines().count(), 1 + 81);
}
