mod common;

use common::{qrs, qrs_with_env, stdout};
use serde_json::Value;

fn json(args: &[&str]) -> (i32, Value) {
    let o = qrs(args);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)));
    (o.status.code().unwrap(), v)
}

#[test]
fn cat_script_reports_the_two_cat_states() {
    let (code, v) = json(&["--format", "json", "run", "examples/cat.qrs"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["scenario"], "cat");
    let table = v["report"]["state_tables"].as_array().unwrap().iter().find(|t| t["label"] == "cat").unwrap();
    let mut p: Vec<f64> =
        table["entries"].as_array().unwrap().iter().map(|e| e["probability"].as_f64().unwrap()).collect();
    p.sort_by(f64::total_cmp);
    assert_eq!(p, vec![0.3, 0.7]);
}

#[test]
fn every_demo_passes_in_every_format() {
    for name in qrs::scenarios::SCENARIO_NAMES {
        for format in ["text", "json", "csv"] {
            let o = qrs(&["--format", format, "demo", name, "--trials", "10"]);
            assert_eq!(o.status.code(), Some(0), "{name} {format}: {}", String::from_utf8_lossy(&o.stderr));
            assert!(!o.stdout.is_empty());
        }
    }
}

#[test]
fn bell_verdicts_follow_the_recorders() {
    let (code, v) = json(&["--format", "json", "demo", "bell"]);
    assert_eq!(code, 0);
    let margin = v["report"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["name"].as_str().unwrap().starts_with("margin"))
        .unwrap();
    assert!((margin["value"].as_f64().unwrap() - 0.103553390593).abs() < 1e-9);

    let text = stdout(&qrs(&["demo", "bell", "--angles", "0,90,45"]));
    assert!(text.contains("VIOLATED"), "{text}");
    let text = stdout(&qrs(&["demo", "bell", "--angles", "0,90,45", "--recorders"]));
    assert!(text.contains("SATISFIED"), "{text}");
}

#[test]
fn scan_csv_has_one_row_per_triple() {
    let o = qrs(&["--format", "csv", "scan", "--alpha", "0", "--beta", "0:180:45", "--gamma", "60"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), qrs::cli::SCAN_COLUMNS);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    let violated = rows.iter().filter(|r| &r[7] == "true").count();
    assert_eq!(violated, 2);
}

#[test]
fn recorder_scan_never_violates() {
    let o = qrs(&[
        "--format",
        "csv",
        "scan",
        "--alpha",
        "0:180:30",
        "--beta",
        "0:180:30",
        "--gamma",
        "0:180:30",
        "--recorders",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 7 * 7 * 7);
    assert!(rows.iter().all(|r| &r[7] == "false" && r[6].parse::<f64>().unwrap() <= 1e-10));
}

#[test]
fn output_does_not_depend_on_the_thread_count() {
    let args = |p: &'static str| {
        ["--format", "csv", "--parallel", p, "scan", "--alpha", "0:180:20", "--beta", "0:180:20", "--gamma", "0:180:20"]
    };
    let one = qrs(&args("1"));
    let four = qrs(&args("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn seed_comes_from_the_flag_or_the_environment() {
    let args = ["--format", "json", "demo", "locality", "--trials", "5"];
    let default = qrs(&args);
    let env = qrs_with_env(&args, &[("QRS_SEED", "7")]);
    let flag = qrs(&["--seed", "7", "--format", "json", "demo", "locality", "--trials", "5"]);
    assert_eq!(env.stdout, flag.stdout);
    assert_ne!(default.stdout, flag.stdout);
    let v: Value = serde_json::from_slice(&flag.stdout).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn failed_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wrong.qrs");
    std::fs::write(
        &path,
        "system A : 2;\nstate a = |0>@A;\nroot a isolated;\nquery possible_states(A) expect [0.5, 0.5];\n",
    )
    .unwrap();
    let o = qrs(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn errors_exit_two_with_a_located_message() {
    let o = qrs(&["run", "no/such/file.qrs"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no/such/file.qrs"));

    let o = qrs(&["run", "tests/scripts/malformed/undeclared_subsystem.qrs"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("undeclared_subsystem.qrs:3:14: error: undeclared subsystem `Q`"), "{err}");

    let o = qrs(&["demo", "nosuch"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for name in qrs::scenarios::SCENARIO_NAMES {
        assert!(err.contains(name), "{err}");
    }

    for grid in ["0:180", "0:x:5", "90:0:5", "0:180:0"] {
        let o = qrs(&["scan", "--alpha", grid]);
        assert_eq!(o.status.code(), Some(2), "{grid}");
    }
}

#[test]
fn out_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.json");
    let printed = qrs(&["--format", "json", "demo", "cat"]);
    let written = qrs(&["--format", "json", "--out", path.to_str().unwrap(), "demo", "cat"]);
    assert_eq!(written.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), printed.stdout);
}
