use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbm"))
        .args(args)
        .output()
        .expect("cbm runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SINGLE: &str = r#"{"name":"one","components":[{"id":1,"shape":1.0,"scale":50000,
  "role":"starting","cm_cost":100,"pm_cost":50,"cms_investment":10,"max_min_repairs":5}],
  "tree":{"basic":1},
  "scenario":{"t_life":2000,"t_m":200,"iterations":5,"system_failure_cost":20000,
  "operating_cost":175,"degraded_factor":0.2,"seed":3}}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn validate_bundled_model() {
    let o = cbm(&["validate"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("71 components, 28 modules"));

    let o = cbm(&["validate", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["modules"], 28);
}

#[test]
fn validate_truncated_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", &SINGLE[..60]);
    let o = cbm(&["validate", "--system", &p]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed system file"));

    let o = cbm(&["validate", "--system", &p, "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], false);
}

#[test]
fn validate_reports_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let text = SINGLE
        .replace("\"shape\":1.0", "\"shape\":-1.0")
        .replace("\"t_m\":200", "\"t_m\":300");
    let p = write(dir.path(), "bad.json", &text);
    let o = cbm(&["validate", "--system", &p, "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["violations"].as_array().unwrap().len(), 2);
}

#[test]
fn decompose_tables() {
    let o = cbm(&["decompose"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2 + 28);
    assert!(text.contains("\n22,45;46;47;48;49;50;51;52;53;54;55;56;57;58,false\n"));

    let o = cbm(&["decompose", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 28);
    assert_eq!(rows[27]["members"], serde_json::json!([63, 64, 65, 66]));

    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "one.json", SINGLE);
    let o = cbm(&["decompose", "--system", &p]);
    assert_eq!(
        stdout(&o).lines().skip(2).collect::<Vec<_>>(),
        vec!["1,1,true"]
    );
}

#[test]
fn decompose_names_a_shared_component() {
    let dir = tempfile::tempdir().unwrap();
    let text = SINGLE.replace(
        r#""tree":{"basic":1}"#,
        r#""tree":{"gate":"OR","children":[{"basic":1},{"gate":"AND","children":[{"basic":1},{"basic":1}]}]}"#,
    );
    let p = write(dir.path(), "shared.json", &text);
    let o = cbm(&["decompose", "--system", &p]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("component 1"));
}

#[test]
fn simulate_single_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = cbm(&["simulate", "--iterations", "1", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let records = fs::read_to_string(dir.path().join("records.csv")).unwrap();
    assert_eq!(records.lines().count(), 2 + 1 + 1);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["summary"]["iterations"], 1);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["manifest"], summary["manifest"]);
    assert!(manifest["started_unix"].as_u64().unwrap() > 0);
}

#[test]
fn simulate_strategy1_raises_pm_on_monitored_components() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = cbm(&[
        "simulate",
        "--strategy",
        "strategy1",
        "--iterations",
        "5",
        "--out",
        out,
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    let comps = v["summary"]["components"].as_array().unwrap();
    let pm = |id: usize| comps[id - 1]["n_pm"]["mean"].as_f64().unwrap();
    assert!(pm(43) > 5.0 && pm(71) > 2.0);
    assert_eq!(pm(3), 0.0);
}

#[test]
fn reruns_are_bit_identical_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "8")] {
        let o = cbm(&[
            "compare",
            "--candidate",
            "strategy2",
            "--iterations",
            "12",
            "--seed",
            "42",
            "--threads",
            threads,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
    }
    for f in [
        "baseline_records.csv",
        "candidate_records.csv",
        "report.json",
        "plot.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn baseline_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let o = cbm(&[
        "compare",
        "--candidate",
        "baseline",
        "--iterations",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["cost_avoidance"], 0.0);
    assert!(v["report"]["roi"].is_null());
}

#[test]
fn strategy_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "s.json", r#"[{"id":72,"p_cms":0.5}]"#);
    let o = cbm(&[
        "simulate",
        "--strategy",
        &p,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown component 72"));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "plain", "x");
    let out = format!("{file}/sub");
    let o = cbm(&["simulate", "--iterations", "1", "--out", &out]);
    assert_eq!(code(&o), 2);
}

#[test]
fn trace_lists_missions_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "one.json", SINGLE);
    let out = dir.path().to_str().unwrap();
    let o = cbm(&["simulate", "--system", &p, "--out", out, "--trace"]);
    assert_eq!(code(&o), 0);
    let trace = fs::read_to_string(dir.path().join("trace.jsonl")).unwrap();
    let starts: Vec<u64> = trace
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|v| v["event"] == "mission_start")
        .map(|v| v["mission"].as_u64().unwrap())
        .collect();
    assert_eq!(starts, (1..=10).collect::<Vec<_>>());
}
