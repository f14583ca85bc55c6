use std::path::Path;
use std::process::{Command, Output};

use probrep_cli::{run, validate, Cell, ExperimentConfig, Format, REGISTRY};

fn probrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_probrep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn list_prints_the_registry() {
    let out = probrep(&["list"]);
    assert!(out.status.success());
    let stdout = text(&out.stdout);
    for name in [
        "antisym",
        "airplane",
        "scramble",
        "nets",
        "keylock",
        "damped",
        "witness",
        "tomography",
    ] {
        assert!(stdout.contains(name), "{name} missing");
    }
    assert_eq!(REGISTRY.len(), 8);
}

#[test]
fn validation_examples() {
    let scramble = ExperimentConfig::new("scramble").with("n", 4);
    assert_eq!(validate(&scramble).len(), 1);
    let keylock = ExperimentConfig::new("keylock").with("n", 40);
    let problems = validate(&keylock);
    assert_eq!(problems.len(), 1);
    assert!(problems[0].contains("cap"), "{problems:?}");
    let antisym = ExperimentConfig::new("antisym")
        .with("n_max", 3)
        .with("seed", 7);
    assert!(validate(&antisym).is_empty());
    assert!(!validate(&ExperimentConfig::new("teleport")).is_empty());
    let stray = ExperimentConfig::new("keylock")
        .with("n", 3)
        .with("colour", 2);
    assert_eq!(validate(&stray).len(), 1);
    let unused = ExperimentConfig::new("keylock")
        .with("n", 3)
        .with("epsilon", 0.1);
    assert_eq!(validate(&unused).len(), 1);
    let bad = ExperimentConfig::new("nets")
        .with("seed", 1)
        .with("epsilon", "wide");
    assert_eq!(validate(&bad).len(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(
        probrep(&["validate", "--experiment", "keylock", "--param", "n=3"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        probrep(&["validate", "--experiment", "scramble"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        probrep(&["run", "--experiment", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        probrep(&["run", "--experiment", "keylock", "--param", "n=40"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        probrep(&["run", "--experiment", "keylock", "--param", "size=4"])
            .status
            .code(),
        Some(2)
    );
    let out = probrep(&[
        "run",
        "--experiment",
        "keylock",
        "--param",
        "n=3",
        "--out",
        "/nonexistent-dir/table.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("unwritable-output"));
}

#[test]
fn keylock_row_is_exact() {
    let table = run(&ExperimentConfig::new("keylock").with("n", 8)).unwrap();
    assert_eq!(table.cell(0, "n"), Some(&Cell::Integer(8)));
    assert_eq!(table.cell(0, "adaptive").unwrap().text(), "1/1");
    assert_eq!(table.cell(0, "product").unwrap().text(), "1/128");
}

#[test]
fn airplane_row_clears_the_bound() {
    let table = run(&ExperimentConfig::new("airplane").with("n", 256)).unwrap();
    assert_eq!(table.cell(0, "above_2_11"), Some(&Cell::Boolean(true)));
}

#[test]
fn same_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = probrep(&[
            "run",
            "--experiment",
            "witness",
            "--param",
            "seed=11",
            "--param",
            "samples=50",
            "--out",
            path_str(p),
        ]);
        assert!(out.status.success(), "{}", text(&out.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(!ta.contains(&b'\r'));
    let body = text(&ta);
    assert!(body.starts_with("# probrep v"));
    assert!(body.contains("# seed: 11\n"));
    assert!(body.contains("\ndim,samples,max_residual,within_tolerance,passed\n"));
}

#[test]
fn embedded_config_reproduces_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let out = probrep(&[
        "run",
        "--experiment",
        "nets",
        "--param",
        "seed=4",
        "--param",
        "samples=2000",
        "--out",
        path_str(&first),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let original = text(&std::fs::read(&first).unwrap());
    let echo = original
        .lines()
        .find_map(|l| l.strip_prefix("# config: "))
        .expect("config line");
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, echo).unwrap();
    let second = dir.path().join("second.csv");
    let out = probrep(&[
        "run",
        "--config",
        path_str(&config_path),
        "--out",
        path_str(&second),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert_eq!(text(&std::fs::read(&second).unwrap()), original);
}

#[test]
fn command_line_overrides_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("c.json");
    std::fs::write(
        &config_path,
        r#"{"experiment":"keylock","parameters":{"n":4},"format":"csv"}"#,
    )
    .unwrap();
    let out = probrep(&[
        "run",
        "--config",
        path_str(&config_path),
        "--param",
        "n=5",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["rows"][0][0], 5);
    assert_eq!(doc["rows"][0][2], "1/16");
    assert_eq!(doc["columns"][2]["type"], "rational");
    assert_eq!(doc["config"]["format"], "json");

    std::fs::write(&config_path, r#"{"experiment":"keylock","bogus":1}"#).unwrap();
    let out = probrep(&["run", "--config", path_str(&config_path)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_tables_are_deterministic() {
    let mut config = ExperimentConfig::new("damped").with("n", 5);
    config.format = Format::Json;
    let a = run(&config).unwrap().to_json();
    let b = run(&config).unwrap().to_json();
    assert_eq!(a, b);
    let doc: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn every_experiment_runs_at_small_size() {
    let configs = [
        ExperimentConfig::new("antisym")
            .with("n_max", 1)
            .with("seed", 1)
            .with("samples", 4),
        ExperimentConfig::new("airplane").with("n", 16),
        ExperimentConfig::new("scramble")
            .with("n", 2)
            .with("samples", 5)
            .with("seed", 1),
        ExperimentConfig::new("nets")
            .with("seed", 1)
            .with("samples", 500),
        ExperimentConfig::new("keylock").with("n", 0),
        ExperimentConfig::new("damped").with("n", 2),
        ExperimentConfig::new("witness")
            .with("n", 2)
            .with("samples", 5)
            .with("seed", 1),
        ExperimentConfig::new("tomography").with("n", 1),
    ];
    for c in &configs {
        let table = run(c).unwrap_or_else(|e| panic!("{}: {e}", c.experiment));
        assert!(!table.rows().is_empty());
        assert!(table
            .rows()
            .iter()
            .all(|r| r.len() == table.columns().len()));
    }
}
