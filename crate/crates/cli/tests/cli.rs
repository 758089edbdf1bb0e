//! End-to-end tests of the command-line interface: documents, exit
//! codes, and byte stability.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_goodsets")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

const FOUR_POINT: &str =
    r#"{"n":3,"points":[["0","0","0"],["0","0","1"],["1","1","0"],["1","1","1"]]}"#;
const RECT: &str = r#"{"n":2,"points":[["a","x"],["a","y"],["b","x"],["b","y"]]}"#;
const PATH3: &str = r#"{"n":2,"points":[["a","x"],["b","x"],["b","y"]]}"#;
const GRID: &str =
    r#"{"n":2,"points":[["a","x"],["a","y"],["a","z"],["b","x"],["b","y"],["b","z"]]}"#;

#[test]
fn analyze_four_point_set_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", FOUR_POINT);
    let out = run(&["analyze", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["structure"]["good"], Value::Bool(false));
    assert_eq!(report["structure"]["rank"], 3);
    assert!(report["related_components"].is_null());
    assert_eq!(
        report["relatively_full_components"]["parts"]
            .as_array()
            .unwrap()
            .len(),
        2
    );
    assert_eq!(report["loops"]["count"], 1);
    assert_eq!(report["uperp"]["dimension"], 1);
    assert_eq!(report["extreme_points"]["count"], 2);
}

#[test]
fn analyze_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", GRID);
    let a = run(&["analyze", "--input", input.to_str().unwrap()]);
    let b = run(&["analyze", "--input", input.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn analyze_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_file(dir.path(), "bad.json", "{not json");
    let out = run(&["analyze", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty(), "no partial documents on error paths");

    let dup = write_file(
        dir.path(),
        "dup.json",
        r#"{"n":2,"points":[["a","x"],["a","x"]]}"#,
    );
    let out = run(&["analyze", "--input", dup.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_feasible_path() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", PATH3);
    let f = write_file(
        dir.path(),
        "f.json",
        r#"{"values":[{"point":["a","x"],"value":"1"},{"point":["b","x"],"value":"3"},{"point":["b","y"],"value":"5"}]}"#,
    );
    let out = run(&[
        "solve",
        "--input",
        input.to_str().unwrap(),
        "--function",
        f.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["feasible"], Value::Bool(true));
    assert_eq!(report["freedom_dim"], 0);
    assert_eq!(report["bundle"][0]["values"]["a"], "0");
    assert_eq!(report["bundle"][0]["values"]["b"], "2");
    assert_eq!(report["bundle"][1]["values"]["x"], "1");
    assert_eq!(report["bundle"][1]["values"]["y"], "3");
}

#[test]
fn solve_infeasible_rectangle_exits_two_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", RECT);
    let f = write_file(
        dir.path(),
        "f.json",
        r#"{"values":[{"point":["a","x"],"value":"1"},{"point":["a","y"],"value":"2"},{"point":["b","x"],"value":"2"},{"point":["b","y"],"value":"4"}]}"#,
    );
    let out = run(&[
        "solve",
        "--input",
        input.to_str().unwrap(),
        "--function",
        f.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let report = stdout_json(&out);
    assert_eq!(report["feasible"], Value::Bool(false));
    assert_eq!(report["pairing"], "1/4");
    assert!(report["violated_measure"]["values"].is_array());
}

#[test]
fn solve_honors_explicit_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", PATH3);
    let f = write_file(
        dir.path(),
        "f.json",
        r#"{"values":[{"point":["a","x"],"value":"1"},{"point":["b","x"],"value":"3"},{"point":["b","y"],"value":"5"}]}"#,
    );
    let anchors = write_file(
        dir.path(),
        "anchors.json",
        r#"{"anchors":[{"axis":0,"label":"b"}]}"#,
    );
    let out = run(&[
        "solve",
        "--input",
        input.to_str().unwrap(),
        "--function",
        f.to_str().unwrap(),
        "--anchors",
        anchors.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["bundle"][0]["values"]["b"], "0");
    assert_eq!(report["bundle"][1]["values"]["x"], "3");
}

#[test]
fn extend_completes_rectangle() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", RECT);
    let subset = write_file(
        dir.path(),
        "m.json",
        r#"{"n":2,"points":[["a","x"],["a","y"],["b","x"]]}"#,
    );
    let g = write_file(
        dir.path(),
        "g.json",
        r#"{"values":[{"point":["a","x"],"value":"1"},{"point":["a","y"],"value":"2"},{"point":["b","x"],"value":"3"}]}"#,
    );
    let out = run(&[
        "extend",
        "--input",
        input.to_str().unwrap(),
        "--subset",
        subset.to_str().unwrap(),
        "--function",
        g.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let values = doc["values"].as_array().unwrap();
    assert_eq!(values[3]["point"], serde_json::json!(["b", "y"]));
    assert_eq!(values[3]["value"], "4");
}

#[test]
fn decompose_grid_vector() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", GRID);
    let mu = write_file(
        dir.path(),
        "mu.json",
        r#"{"values":[{"point":["a","x"],"value":"1"},{"point":["a","y"],"value":"1"},{"point":["a","z"],"value":"-2"},{"point":["b","x"],"value":"-1"},{"point":["b","y"],"value":"-1"},{"point":["b","z"],"value":"2"}]}"#,
    );
    let out = run(&[
        "decompose",
        "--input",
        input.to_str().unwrap(),
        "--measure",
        mu.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["input_l1"], "8");
    assert_eq!(report["pairs_l1"], "8");
    assert_eq!(report["pairs"].as_array().unwrap().len(), 2);
}

#[test]
fn decompose_rejects_bad_marginals() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", RECT);
    let mu = write_file(
        dir.path(),
        "mu.json",
        r#"{"values":[{"point":["a","x"],"value":"1"}]}"#,
    );
    let out = run(&[
        "decompose",
        "--input",
        input.to_str().unwrap(),
        "--measure",
        mu.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn loops_cap_exceeded_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", GRID);
    let out = run(&["loops", "--input", input.to_str().unwrap(), "--cap", "1"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["loops", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["count"], 3);
}

#[test]
fn components_on_non_good_set() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", FOUR_POINT);
    let out = run(&["components", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert!(report["related"].is_null());
    assert_eq!(
        report["relatively_full"]["parts"].as_array().unwrap().len(),
        2
    );
    assert_eq!(report["relatively_full"]["method"], "oracle");
}

#[test]
fn quotient_reports_fullness_transfer() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", PATH3);
    let out = run(&["quotient", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["full"], report["image_full"]);
    assert_eq!(report["image"]["points"].as_array().unwrap().len(), 1);
}

#[test]
fn union_check_on_four_point_set() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", FOUR_POINT);
    let out = run(&["union-check", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["union_is_maximal_good"], Value::Bool(false));
    assert_eq!(report["every_loop_in_one_part"], Value::Bool(false));
    assert_eq!(report["loop_count"], 1);
}

#[test]
fn generate_is_deterministic_and_valid() {
    let a = run(&[
        "generate", "--kind", "full", "--n", "3", "--size", "7", "--seed", "11",
    ]);
    let b = run(&[
        "generate", "--kind", "full", "--n", "3", "--size", "7", "--seed", "11",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.json");
    std::fs::write(&path, &a.stdout).unwrap();
    let out = run(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["structure"]["full"], Value::Bool(true));
    assert_eq!(
        report["related_components"]["parts"]
            .as_array()
            .unwrap()
            .len(),
        1
    );
}

#[test]
fn generate_rejects_unknown_kind() {
    let out = run(&["generate", "--kind", "mystery", "--n", "2", "--size", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_bound_fails_closed_without_fallback() {
    // 18 points exceed every oracle/enumeration bound.
    let mut points = Vec::new();
    for i in 0..3 {
        for j in 0..6 {
            points.push(vec![format!("r{i}"), format!("c{j}")]);
        }
    }
    let doc = serde_json::json!({"n": 2, "points": points}).to_string();
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "big.json", &doc);

    let out = run(&["components", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "oracle must fail closed");

    let out = run(&[
        "components",
        "--input",
        input.to_str().unwrap(),
        "--heuristic-fallback",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["relatively_full"]["method"], "heuristic");

    let out = run(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--heuristic-fallback",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert!(
        report["loops"].is_null(),
        "loop section skipped above the bound"
    );
    assert!(report["extreme_points"].is_null());

    let out = run(&["extreme", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", RECT);
    let outfile = dir.path().join("report.json");
    let out = run(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--output",
        outfile.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&outfile).unwrap()).unwrap();
    assert_eq!(report["structure"]["good"], Value::Bool(false));
    assert_eq!(report["structure"]["relatively_full"], Value::Bool(true));
}

#[test]
fn analyze_cap_fails_closed_without_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", GRID);
    let out = run(&["analyze", "--input", input.to_str().unwrap(), "--cap", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());

    let out = run(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--cap",
        "1",
        "--heuristic-fallback",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert!(report["loops"].is_null());
    assert_eq!(report["extreme_points"]["count"], 6);
}

#[test]
fn skip_extreme_flag_omits_the_section() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", RECT);
    let out = run(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--skip-extreme",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_json(&out)["extreme_points"].is_null());
}
