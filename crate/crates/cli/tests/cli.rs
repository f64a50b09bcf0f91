//! End-to-end tests of the cml binary: exit codes, determinism, and file
//! shapes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cml(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cml"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// The two-job fixture whose unique-best equilibrium is the diagonal.
const DIAG_INSTANCE: &str = r#"{
  "format": "cml-1",
  "n": 2,
  "m": 2,
  "weights": [[1, 4], [4, 1]]
}
"#;

#[test]
fn gen_is_deterministic_and_reports_digest() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "gen",
        "--kind",
        "uniform-integer",
        "--n",
        "4",
        "--m",
        "3",
        "--seed",
        "7",
        "--out",
        "a.json",
    ];
    let first = cml(&args, tmp.path());
    assert_eq!(exit_code(&first), 0, "{}", stderr(&first));
    assert!(stdout(&first).contains("digest "));
    let bytes_a = fs::read(tmp.path().join("a.json")).unwrap();

    let mut again = args;
    *again.last_mut().unwrap() = "b.json";
    let second = cml(&again, tmp.path());
    assert_eq!(exit_code(&second), 0);
    let bytes_b = fs::read(tmp.path().join("b.json")).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed must give identical files");
    assert_eq!(stdout(&first).lines().nth(1), stdout(&second).lines().nth(1));
}

#[test]
fn gen_two_values_stays_in_codomain() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cml(
        &[
            "gen", "--kind", "two-values", "--n", "3", "--m", "2", "--lo", "1", "--hi", "4",
            "--out", "tv.json",
        ],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(tmp.path().join("tv.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for row in value["weights"].as_array().unwrap() {
        for entry in row.as_array().unwrap() {
            let v = entry.as_u64().unwrap();
            assert!(v == 1 || v == 4, "entry {v} not in {{1,4}}");
        }
    }
}

#[test]
fn gen_rejects_unknown_kind_with_usage_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cml(&["gen", "--kind", "gaussian", "--n", "2", "--m", "2"], tmp.path());
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("unknown generator"));
}

#[test]
fn run_on_an_equilibrium_start_reports_zero_moves() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("diag.json"), DIAG_INSTANCE).unwrap();
    // min-weight start of the diagonal instance is already the equilibrium.
    let out = cml(
        &["run", "--instance", "diag.json", "--mech", "dcoord", "--d", "2"],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("moves: 0 (converged)"));
}

#[test]
fn run_records_auto_degree_in_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cml(
        &[
            "run", "--kind", "uniform-integer", "--n", "3", "--m", "8", "--seed", "5", "--d",
            "auto",
        ],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    // max(2, ceil(log2 8)) = 3, recorded in the summary and the trace meta.
    assert!(stdout(&out).contains("(d = 3)"), "{}", stdout(&out));
    let trace = fs::read_to_string(tmp.path().join("out/trace.jsonl")).unwrap();
    let header: serde_json::Value =
        serde_json::from_str(trace.lines().next().unwrap()).unwrap();
    assert_eq!(header["meta"]["mechanism"]["d"], 3);
    assert_eq!(header["meta"]["seed"], 5);
    assert!(header["meta"]["version"].is_string());
    assert!(header["meta"]["instance_digest"].is_string());
}

#[test]
fn run_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "run", "--kind", "uniform-integer", "--n", "4", "--m", "3", "--seed", "11", "--order",
        "random", "--start", "random",
    ];
    assert_eq!(exit_code(&cml(&args, tmp.path())), 0);
    let first = fs::read(tmp.path().join("out/trace.jsonl")).unwrap();
    assert_eq!(exit_code(&cml(&args, tmp.path())), 0);
    let second = fs::read(tmp.path().join("out/trace.jsonl")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn run_exhausted_budget_exits_resource_code_with_partial_trace() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("diag.json"), DIAG_INSTANCE).unwrap();
    // first-available puts both jobs on machine 0; zero budget cannot fix it.
    let out = cml(
        &[
            "run",
            "--instance",
            "diag.json",
            "--start",
            "first-available",
            "--max-iter",
            "0",
        ],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 3, "{}", stderr(&out));
    assert!(stdout(&out).contains("not converged"));
    let trace = fs::read_to_string(tmp.path().join("out/trace.jsonl")).unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(trace.lines().last().unwrap()).unwrap();
    assert_eq!(summary["converged"], serde_json::Value::Bool(false));
}

#[test]
fn run_rejects_the_makespan_baseline() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("diag.json"), DIAG_INSTANCE).unwrap();
    let out = cml(
        &["run", "--instance", "diag.json", "--mech", "makespan"],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("analyze"));
}

#[test]
fn run_requires_exactly_one_instance_source() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("diag.json"), DIAG_INSTANCE).unwrap();
    let neither = cml(&["run"], tmp.path());
    assert_eq!(exit_code(&neither), 1);
    let both = cml(
        &[
            "run", "--instance", "diag.json", "--kind", "uniform-integer", "--n", "2", "--m",
            "2",
        ],
        tmp.path(),
    );
    assert_eq!(exit_code(&both), 1);
    assert!(stderr(&both).contains("mutually exclusive"));
}

#[test]
fn analyze_diag_instance_reports_ratio_one_equilibrium() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("diag.json"), DIAG_INSTANCE).unwrap();
    let out = cml(
        &["analyze", "--instance", "diag.json", "--mech", "dcoord", "--d", "2"],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(tmp.path().join("out/report-diag.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["opt_makespan"], "1");
    assert_eq!(report["pos_ratio"], "1.00000000000");
    let eqs = report["equilibria"].as_array().unwrap();
    assert!(eqs
        .iter()
        .any(|eq| eq["machine_of"] == serde_json::json!([0, 1])));
    // Every bound check passes on a correct build.
    for check in report["bound_checks"].as_array().unwrap() {
        assert_eq!(check["pass"], serde_json::Value::Bool(true), "{check}");
    }
    let csv = fs::read_to_string(tmp.path().join("out/report.csv")).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "instance_id,mech,d,n,m,phi,max_ct,makespan,opt,ratio"
    );
}

#[test]
fn analyze_batch_mode_emits_one_row_per_instance_equilibrium() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("instances");
    fs::create_dir(&dir).unwrap();
    fs::write(dir.join("diag.json"), DIAG_INSTANCE).unwrap();
    fs::write(
        dir.join("single.json"),
        r#"{"format":"cml-1","n":1,"m":2,"weights":[[2,3]]}"#,
    )
    .unwrap();
    let out = cml(
        &["analyze", "--instances-dir", "instances", "--mech", "dcoord", "--d", "2"],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(tmp.path().join("out/report.csv")).unwrap();
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("instance_id"))
        .collect();
    let diag_rows = rows.iter().filter(|r| r.starts_with("diag,")).count();
    let single_rows = rows.iter().filter(|r| r.starts_with("single,")).count();
    assert!(diag_rows >= 1);
    assert_eq!(single_rows, 1, "single job on machine 0 is the unique equilibrium");
    assert!(tmp.path().join("out/report-diag.json").exists());
    assert!(tmp.path().join("out/report-single.json").exists());
}

#[test]
fn analyze_compare_emits_side_by_side_columns() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("diag.json"), DIAG_INSTANCE).unwrap();
    let out = cml(
        &[
            "analyze",
            "--instance",
            "diag.json",
            "--mech",
            "ccoord",
            "--compare",
            "dcoord",
            "--d",
            "2",
        ],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(tmp.path().join("out/compare.csv")).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.contains("poa_ccoord(d=2)") && header.contains("poa_dcoord(d=2)"));
    assert_eq!(
        csv.lines().filter(|l| !l.starts_with('#')).count(),
        2,
        "header plus one row"
    );
}

#[test]
fn analyze_with_makespan_baseline_is_allowed() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("diag.json"), DIAG_INSTANCE).unwrap();
    let out = cml(
        &["analyze", "--instance", "diag.json", "--mech", "makespan"],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(tmp.path().join("out/report-diag.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["mechanism"]["kind"], "makespan-baseline");
    assert!(report["bound_checks"].as_array().unwrap().is_empty());
}

#[test]
fn analyze_cap_exceeded_exits_resource_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cml(
        &[
            "analyze", "--kind", "uniform-integer", "--n", "12", "--m", "4", "--cap", "1000",
        ],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 3);
    assert!(stderr(&out).contains("raise --cap to at least 16777216"));
}

#[test]
fn analyze_custom_mechanism_descriptor_file() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("diag.json"), DIAG_INSTANCE).unwrap();
    fs::write(
        tmp.path().join("mech.json"),
        r#"{"kind":"custom","d":2,"table":[
            {"partition":[3],"gamma":"1"},
            {"partition":[2,1],"gamma":"3/2"},
            {"partition":[1,1,1],"gamma":"2"}
        ]}"#,
    )
    .unwrap();
    let out = cml(
        &["analyze", "--instance", "diag.json", "--mech", "mech.json"],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(tmp.path().join("out/report-diag.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["mechanism"]["kind"], "custom");
    assert!(report["bound_checks"].as_array().unwrap().is_empty());
}

#[test]
fn verify_subset_passes_and_prints_one_line_per_suite() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cml(
        &[
            "verify", "--suite", "sandwich", "--suite", "corollary7", "--cases", "40", "--d",
            "4",
        ],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS  sandwich"));
    assert!(text.contains("PASS  corollary7"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn verify_corrupt_gamma_fails_the_potential_suite() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cml(
        &[
            "verify",
            "--suite",
            "potential-sign",
            "--cases",
            "30",
            "--corrupt-gamma",
        ],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 2);
    assert!(stdout(&out).contains("FAIL  potential-sign"));
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cml(&["verify", "--suite", "nonsense"], tmp.path());
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("unknown suite"));
}

#[test]
fn final_assignment_respects_availability() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("restricted.json"),
        r#"{"format":"cml-1","n":2,"m":2,"weights":[[null,2],[3,"7/2"]]}"#,
    )
    .unwrap();
    let out = cml(
        &["run", "--instance", "restricted.json", "--d", "2"],
        tmp.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let asg: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(tmp.path().join("out/final_assignment.json")).unwrap(),
    )
    .unwrap();
    // Job 0 is unavailable on machine 0.
    assert_eq!(asg["machine_of"][0], 1);
}
