//! Black-box tests of the `powl-discovery` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_powl-discovery")
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_fixture(dir: &Path, name: &str, bytes: &[u8]) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, bytes).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn discover_produces_artifacts_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "orders.xes",
        include_bytes!("fixtures/orders.xes"),
    );
    let model = dir.path().join("model.json");
    let pnml = dir.path().join("net.pnml");
    let dot = dir.path().join("net.dot");
    let output = run(&[
        "discover",
        "--input",
        input.to_str().unwrap(),
        "--out-model",
        model.to_str().unwrap(),
        "--out-pnml",
        pnml.to_str().unwrap(),
        "--out-dot",
        dot.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let summary = stdout(&output);
    assert!(summary.contains("cases=4"), "summary: {summary}");
    assert!(summary.contains("variants=3"));
    assert!(summary.contains("labels=4"));
    assert!(model.exists() && pnml.exists() && dot.exists());
}

#[test]
fn unreadable_input_exits_2() {
    let output = run(&[
        "discover",
        "--input",
        "/no/such/file.xes",
        "--out-model",
        "/tmp/x.json",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn check_round_trips_its_own_model() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "orders.xes",
        include_bytes!("fixtures/orders.xes"),
    );
    let model = dir.path().join("model.json");
    let discover_output = run(&[
        "discover",
        "--input",
        input.to_str().unwrap(),
        "--out-model",
        model.to_str().unwrap(),
    ]);
    assert!(discover_output.status.success());

    let report = dir.path().join("report.json");
    let check_output = run(&[
        "check",
        "--model",
        model.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--out-report",
        report.to_str().unwrap(),
    ]);
    assert!(check_output.status.success());
    let report_json = std::fs::read_to_string(report).unwrap();
    assert!(report_json.contains("\"failures\": []"));
}

#[test]
fn check_flags_a_non_fitting_model_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "orders.xes",
        include_bytes!("fixtures/orders.xes"),
    );
    let model = write_fixture(
        dir.path(),
        "wrong.json",
        br#"{"kind":"xor","children":[{"kind":"transition","label":"receive"},{"kind":"transition","label":"pack"}]}"#,
    );
    let output = run(&[
        "check",
        "--model",
        model.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn check_with_a_tiny_cap_reports_capped_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "orders.xes",
        include_bytes!("fixtures/orders.xes"),
    );
    let model = dir.path().join("model.json");
    assert!(run(&[
        "discover",
        "--input",
        input.to_str().unwrap(),
        "--out-model",
        model.to_str().unwrap(),
    ])
    .status
    .success());
    let output = run(&[
        "check",
        "--model",
        model.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--lin-cap",
        "1",
    ]);
    assert!(
        output.status.success(),
        "capped but no failures among checked"
    );
    assert!(stdout(&output).contains("\"capped\": true"));
}

#[test]
fn soundness_budget_exhaustion_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_fixture(
        dir.path(),
        "model.json",
        br#"{"kind":"order","children":[{"kind":"transition","label":"a"},{"kind":"transition","label":"b"},{"kind":"transition","label":"c"}],"edges":[]}"#,
    );
    let output = run(&[
        "soundness",
        "--model",
        model.to_str().unwrap(),
        "--budget",
        "2",
    ]);
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn invalid_model_json_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_fixture(dir.path(), "bad.json", br#"{"kind":"unknown"}"#);
    let output = run(&["soundness", "--model", model.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn pots_prints_the_variant_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "hospital.csv",
        include_bytes!("fixtures/hospital.csv"),
    );
    let output = run(&[
        "pots",
        "--input",
        input.to_str().unwrap(),
        "--granularity",
        "day",
        "--timestamp-format",
        "%Y-%m-%d %H:%M",
        "--out-pots",
        dir.path().join("pots").to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let table = stdout(&output);
    assert_eq!(
        table.lines().count(),
        5,
        "header plus four variants: {table}"
    );
    assert!(dir.path().join("pots/variant_1.dot").exists());
    assert!(dir.path().join("pots/variant_4.dot").exists());
}

#[test]
fn convert_and_soundness_on_a_discovered_model() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "orders.xes",
        include_bytes!("fixtures/orders.xes"),
    );
    let model = dir.path().join("model.json");
    assert!(run(&[
        "discover",
        "--input",
        input.to_str().unwrap(),
        "--out-model",
        model.to_str().unwrap(),
    ])
    .status
    .success());

    let pnml = dir.path().join("net.pnml");
    let convert_output = run(&[
        "convert",
        "--model",
        model.to_str().unwrap(),
        "--out-pnml",
        pnml.to_str().unwrap(),
    ]);
    assert!(convert_output.status.success());
    assert!(stdout(&convert_output).starts_with("places="));

    let soundness_output = run(&["soundness", "--model", model.to_str().unwrap()]);
    assert!(soundness_output.status.success());
    assert!(stdout(&soundness_output).starts_with("verdict=sound"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "hospital.csv",
        include_bytes!("fixtures/hospital.csv"),
    );
    let config = write_fixture(
        dir.path(),
        "run.conf",
        format!(
            "input = {}\ngranularity = day\ntimestamp-format = %Y-%m-%d %H:%M\n",
            input.display()
        )
        .as_bytes(),
    );
    let model = dir.path().join("model.json");
    let output = run(&[
        "discover",
        "--config",
        config.to_str().unwrap(),
        "--out-model",
        model.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(stdout(&output).contains("cases=4"));

    // The flag overrides the file: hour granularity keeps more order, the
    // summary still reports the same cases.
    let output = run(&[
        "discover",
        "--config",
        config.to_str().unwrap(),
        "--granularity",
        "hour",
        "--out-model",
        dir.path().join("hourly.json").to_str().unwrap(),
    ]);
    assert!(output.status.success());
}

#[test]
fn discover_is_deterministic_across_processes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "orders.xes",
        include_bytes!("fixtures/orders.xes"),
    );
    let mut outputs = Vec::new();
    for k in 0..2 {
        let model = dir.path().join(format!("model{k}.json"));
        assert!(run(&[
            "discover",
            "--input",
            input.to_str().unwrap(),
            "--out-model",
            model.to_str().unwrap(),
        ])
        .status
        .success());
        outputs.push(std::fs::read(model).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
