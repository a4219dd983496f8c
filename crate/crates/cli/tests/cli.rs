use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_fluidity");

fn fluidity(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run_to(dir: &Path, scenario: &Path, log: &str) -> (i32, PathBuf) {
    let out_path = dir.join(log);
    let out = fluidity(&[
        "run",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    (code(&out), out_path)
}

const TRACKER: &str = r#"{"seed": 3, "agent": {"kind": "proportional", "gain": 1.0}}"#;
const HALF: &str = r#"{"seed": 3, "agent": {"kind": "proportional", "gain": 0.5, "name": "half"}}"#;

#[test]
fn valid_scenario_writes_a_log() {
    let dir = TempDir::new().unwrap();
    let s = scenario(dir.path(), "tracker.json", TRACKER);
    let (status, log) = run_to(dir.path(), &s, "tracker.log.json");
    assert_eq!(status, 0);
    let text = fs::read_to_string(log).unwrap();
    assert!(text.contains("\"agent_name\": \"proportional\""));
}

#[test]
fn toml_scenarios_are_accepted() {
    let dir = TempDir::new().unwrap();
    let s = scenario(
        dir.path(),
        "half.toml",
        "seed = 3\n[schedule]\nepochs = 4\n[agent]\nkind = \"proportional\"\ngain = 0.5\n",
    );
    let (status, log) = run_to(dir.path(), &s, "half.log.json");
    assert_eq!(status, 0);
    assert!(fs::read_to_string(log).unwrap().contains("\"epochs\": 4"));
}

#[test]
fn log_goes_to_stdout_without_out() {
    let dir = TempDir::new().unwrap();
    let s = scenario(dir.path(), "tracker.json", TRACKER);
    let out = fluidity(&["run", "--scenario", s.to_str().unwrap(), "--seed", "11"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("\"seed\": 11"));
}

#[test]
fn zero_base_rate_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let s = scenario(dir.path(), "bad.json", r#"{"schedule": {"base_rate": 0}}"#);
    let (status, log) = run_to(dir.path(), &s, "bad.log.json");
    assert_eq!(status, 2);
    assert!(!log.exists());
}

#[test]
fn unreadable_or_malformed_scenarios_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = fluidity(&[
        "run",
        "--scenario",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("cannot read"));

    let s = scenario(dir.path(), "garbled.json", "{ not json");
    assert_eq!(run_to(dir.path(), &s, "x.json").0, 2);
}

#[test]
fn budget_starved_scenario_exits_1_with_a_truncated_log() {
    let dir = TempDir::new().unwrap();
    let s = scenario(dir.path(), "starved.json", r#"{"initial_tokens": 4}"#);
    let (status, log) = run_to(dir.path(), &s, "starved.log.json");
    assert_eq!(status, 1);
    let text = fs::read_to_string(log).unwrap();
    assert!(text.contains("\"truncated\": true"));
    assert!(text.contains("\"budget_exhausted\""));
}

#[test]
fn score_ranks_two_logs_deterministically() {
    let dir = TempDir::new().unwrap();
    let (_, a) = run_to(
        dir.path(),
        &scenario(dir.path(), "a.json", HALF),
        "half.log.json",
    );
    let (_, b) = run_to(
        dir.path(),
        &scenario(dir.path(), "b.json", TRACKER),
        "tracker.log.json",
    );
    let args = [
        "score",
        "--format",
        "csv",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
    ];
    let first = fluidity(&args);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let text = stdout(&first);
    let rows: Vec<&str> = text.lines().take(3).collect();
    assert!(rows[0].starts_with("rank,agent,fi,mean_responsiveness"));
    assert!(rows[1].starts_with("1,proportional,0,1,"));
    assert!(rows[2].starts_with("2,half,0.5,0.5,"));
    assert_eq!(text.matches("# series: ").count(), 2);
    assert!(text.contains("snapshot,time,prefix_fi,reserve"));

    assert_eq!(stdout(&fluidity(&args)), text);
}

#[test]
fn score_formats_and_series_files() {
    let dir = TempDir::new().unwrap();
    let (_, log) = run_to(
        dir.path(),
        &scenario(dir.path(), "t.json", TRACKER),
        "tracker.log.json",
    );
    let log = log.to_str().unwrap();

    let table = stdout(&fluidity(&["score", log]));
    assert!(table.starts_with("rank  agent"));

    let json = stdout(&fluidity(&["score", "--format", "json", log]));
    assert!(json.contains("\"rows\"") && json.contains("\"series\""));

    let series = dir.path().join("plots");
    let out = fluidity(&["score", "--series-dir", series.to_str().unwrap(), log]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(series.join("tracker.log.series.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 65);
}

#[test]
fn tampered_log_exits_3_naming_file_and_location() {
    let dir = TempDir::new().unwrap();
    let (_, log) = run_to(
        dir.path(),
        &scenario(dir.path(), "h.json", HALF),
        "half.log.json",
    );
    let text = fs::read_to_string(&log).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["samples"][5]["aa_value"] = serde_json::json!(0.25);
    fs::write(&log, serde_json::to_string_pretty(&value).unwrap()).unwrap();

    let out = fluidity(&["score", log.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let err = stderr(&out);
    assert!(err.contains("half.log.json"), "{err}");
    assert!(err.contains("sample 5"), "{err}");
    assert!(stdout(&out).is_empty());
}

#[test]
fn non_log_input_exits_3() {
    let dir = TempDir::new().unwrap();
    let junk = scenario(dir.path(), "junk.json", "[1, 2, 3]");
    assert_eq!(code(&fluidity(&["score", junk.to_str().unwrap()])), 3);
}

#[test]
fn score_without_logs_prints_usage() {
    let out = fluidity(&["score"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn agents_lists_every_kind_stably() {
    let first = fluidity(&["agents"]);
    assert_eq!(code(&first), 0);
    let text = stdout(&first);
    for kind in [
        "static",
        "proportional",
        "lagged",
        "overcorrector",
        "noisy",
        "external",
    ] {
        assert!(text.lines().any(|l| l.starts_with(kind)), "{kind} missing");
    }
    assert_eq!(stdout(&fluidity(&["agents"])), text);
}
