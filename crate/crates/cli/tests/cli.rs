use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nanofall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nanofall"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    nanofall(&args)
}

#[test]
fn lists_presets() {
    let out = nanofall(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().any(|l| l == "tailoring"));
}

#[test]
fn csv_is_identical_for_one_and_four_workers() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("one"), dir.path().join("four"));
    let common = ["--preset", "fig4_gold_dp", "--trajectories", "64", "--seed", "5"];
    assert!(run_in(&a, &[&common[..], &["--workers", "1"]].concat())
        .status
        .success());
    assert!(run_in(&b, &[&common[..], &["--workers", "4"]].concat())
        .status
        .success());
    for curve in ["free", "gravity", "decoherence", "decoherence_gravity"] {
        let x = fs::read(a.join(format!("{curve}.csv"))).unwrap();
        let y = fs::read(b.join(format!("{curve}.csv"))).unwrap();
        assert_eq!(x, y, "{curve}");
    }
}

#[test]
fn seed_changes_localized_curves_only() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_in(
        &a,
        &["--preset", "fig3_silicate_dp", "--trajectories", "16", "--seed", "1"]
    )
    .status
    .success());
    assert!(run_in(
        &b,
        &["--preset", "fig3_silicate_dp", "--trajectories", "16", "--seed", "2"]
    )
    .status
    .success());
    assert_eq!(
        fs::read(a.join("free.csv")).unwrap(),
        fs::read(b.join("free.csv")).unwrap()
    );
    assert_ne!(
        fs::read(a.join("decoherence.csv")).unwrap(),
        fs::read(b.join("decoherence.csv")).unwrap()
    );
}

#[test]
fn minimal_config_is_echoed_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"radius": 1e-7, "density": 2600, "initial_spread": 1e-8, "duration": 60}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run_in(&out_dir, &["--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let echo: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("config.json")).unwrap()).unwrap();
    assert_eq!(echo["sample_count"], 200);
    assert_eq!(echo["trajectories"], 10000);
    assert_eq!(echo["environment"]["environment_temperature"], 16.0);
    // no localization channels: only the deterministic curves
    let csv = fs::read_to_string(out_dir.join("free.csv")).unwrap();
    assert_eq!(csv.lines().count(), 201);
    assert!(!out_dir.join("decoherence.csv").exists());
}

#[test]
fn domain_errors_exit_with_one_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"radius": -1e-7, "density": 2600, "initial_spread": 1e-8, "duration": 60}"#,
    )
    .unwrap();
    let out = run_in(&dir.path().join("out"), &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius"));

    fs::write(
        &cfg,
        r#"{"radius": 1e-7, "density": 2600, "initial_spread": 1e-8, "duration": 60, "speed": 3}"#,
    )
    .unwrap();
    let out = run_in(&dir.path().join("out"), &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("speed"));

    assert_eq!(nanofall(&["run", "--preset", "fig9"]).status.code(), Some(1));
    assert_eq!(nanofall(&["run"]).status.code(), Some(1));
}

#[test]
fn integrator_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.json");
    fs::write(
        &cfg,
        r#"{"radius": 1e-7, "density": 2600, "initial_spread": 1e-8, "duration": 60,
            "curves": ["gravity"], "integrator": {"max_steps": 1}}"#,
    )
    .unwrap();
    let out = run_in(&dir.path().join("out"), &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn preset_document_round_trips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let doc = nanofall(&["preset", "fig4_gold_dp"]);
    assert!(doc.status.success());
    let cfg = dir.path().join("fig4.json");
    fs::write(&cfg, &doc.stdout).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_in(&a, &["--preset", "fig4_gold_dp", "--trajectories", "8"])
        .status
        .success());
    assert!(run_in(&b, &["--config", cfg.to_str().unwrap(), "--trajectories", "8"])
        .status
        .success());
    assert_eq!(
        fs::read(a.join("config.json")).unwrap(),
        fs::read(b.join("config.json")).unwrap()
    );
    assert_eq!(
        fs::read(a.join("decoherence_gravity.csv")).unwrap(),
        fs::read(b.join("decoherence_gravity.csv")).unwrap()
    );
}

#[test]
fn fig1_emits_free_and_gravity_curve_per_initial_condition() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["--preset", "fig1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for k in 0..5 {
        assert!(dir.path().join(format!("free_{k}.csv")).exists());
        assert!(dir.path().join(format!("gravity_{k}.csv")).exists());
    }
    let csvs = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count();
    assert_eq!(csvs, 10);
}

#[test]
fn json_format_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["--preset", "tailoring", "--trajectories", "20", "--format", "json"],
    );
    assert!(out.status.success());
    let stats: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("decoherence.json")).unwrap()).unwrap();
    assert_eq!(stats["trajectory_count"], 20);
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["histograms"].as_array().unwrap().len(), 2);

    let out = run_in(dir.path(), &["--preset", "tables"]);
    assert!(out.status.success());
    let tables: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("tables.json")).unwrap()).unwrap();
    assert_eq!(tables["catalogs"].as_array().unwrap().len(), 4);
    let printed = nanofall(&["tables"]);
    let printed: serde_json::Value = serde_json::from_slice(&printed.stdout).unwrap();
    assert_eq!(printed, tables);
}

#[test]
fn gas_post_selection_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gas.json");
    fs::write(
        &cfg,
        r#"{"radius": 1e-7, "density": 2600, "initial_spread": 1e-8, "duration": 10,
            "channels": [{"label": "gas", "gamma": 0.1, "alpha": 1e16}],
            "curves": ["decoherence"], "trajectories": 100, "sample_count": 3}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run_in(
        &out_dir,
        &[
            "--config",
            cfg.to_str().unwrap(),
            "--filter-gas-collisions",
            "--format",
            "json",
        ],
    );
    assert!(out.status.success());
    let stats: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("decoherence.json")).unwrap()).unwrap();
    let kept = stats["trajectory_count"].as_u64().unwrap();
    let dropped = stats["dropped"].as_u64().unwrap();
    assert_eq!(kept + dropped, 100);
    assert!(dropped > 30 && dropped < 100, "{dropped}");
    let echo: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("config.json")).unwrap()).unwrap();
    assert_eq!(echo["filter_gas_collisions"], true);
}
