use std::path::PathBuf;
use std::process::{Command, Output};

fn ctmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctmp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn example(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn preprocessed(dir: &tempfile::TempDir) -> String {
    let lib = dir.path().join("grid.lib");
    let lib = lib.to_str().unwrap().to_string();
    let o = ctmp(&[
        "preprocess",
        "--scenario",
        &example("example_grid.json"),
        "--out",
        &lib,
        "--seed",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    lib
}

#[test]
fn preprocess_then_query() {
    let dir = tempfile::tempdir().unwrap();
    let lib = preprocessed(&dir);
    let o = ctmp(&[
        "query",
        "--scenario",
        &example("example_grid.json"),
        "--library",
        &lib,
        "--start",
        "0,0",
        "--goal",
        "13,14",
        "--budget-ms",
        "2000",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout.clone()).unwrap();
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.first(), Some(&"0 0"));
    assert_eq!(lines.last(), Some(&"13 14"));
    assert!(stderr(&o).contains("optimal=true"));
}

#[test]
fn query_without_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let lib = preprocessed(&dir);
    let o = ctmp(&[
        "query",
        "--scenario",
        &example("example_grid.json"),
        "--library",
        &lib,
        "--start",
        "12 1",
        "--goal",
        "12 13",
        "--budget-ms",
        "100",
        "--no-refine",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(
        out.lines().any(|l| l == "0 0"),
        "via-home path passes through home"
    );
}

#[test]
fn uncovered_goal_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let lib = preprocessed(&dir);
    let o = ctmp(&[
        "query",
        "--scenario",
        &example("example_grid.json"),
        "--library",
        &lib,
        "--start",
        "0,0",
        "--goal",
        "2,2",
        "--budget-ms",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("GoalUncovered"));
}

#[test]
fn library_for_other_scenario_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let lib = preprocessed(&dir);
    let o = ctmp(&[
        "query",
        "--scenario",
        &example("example_arm.json"),
        "--library",
        &lib,
        "--start",
        "0,0",
        "--goal",
        "1,1",
        "--budget-ms",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).to_lowercase().contains("fingerprint"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ctmp(&["preprocess", "--bogus"]).status.code(), Some(2));
    assert_eq!(ctmp(&["query", "--scenario", "x"]).status.code(), Some(2));
    assert_eq!(ctmp(&[]).status.code(), Some(2));
    let o = ctmp(&[
        "query",
        "--scenario",
        "s",
        "--library",
        "l",
        "--start",
        "a,b",
        "--goal",
        "1,1",
        "--budget-ms",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = ctmp(&[
        "query",
        "--scenario",
        "s",
        "--library",
        "l",
        "--start",
        "0,0",
        "--goal",
        "1,1",
        "--budget-ms",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_files_exit_one() {
    let o = ctmp(&[
        "preprocess",
        "--scenario",
        "/nonexistent.json",
        "--out",
        "/tmp/x.lib",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nonexistent"));
}

#[test]
fn version_lists_formats() {
    let o = ctmp(&["--version"]);
    assert!(o.status.success());
    let v = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(
        v.contains("library format 1") && v.contains("scenario format 1"),
        "{v}"
    );
}

#[test]
fn bench_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"format_version":1,"scenario":"{}","mode":"single","trials":3,
               "budget":{{"fixed_ms":300}},"planners":["ctmp","ctmp+refine","astar"],
               "seed":4,"output_dir":"out","deterministic_output":true}}"#,
            example("example_grid.json")
        ),
    )
    .unwrap();
    let o = ctmp(&["bench", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in [
        "trials.csv",
        "summary.csv",
        "anytime_profile.svg",
        "timings.csv",
    ] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let trials = std::fs::read_to_string(dir.path().join("out/trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 3 * 3);

    std::fs::write(&cfg, r#"{"format_version":1,"trials":0}"#).unwrap();
    assert_eq!(
        ctmp(&["bench", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}
