use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use assur_kit::corpus::{ExpectedVerdict, INSTANCES};
use assur_kit::io::GraphDocument;
use assur_kit::report::AnalysisReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assur-kit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn emit_corpus(dir: &Path) {
    let out = run(&["corpus", "emit", "--dir", dir.to_str().unwrap()]);
    assert!(out.status.success());
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(format!("{name}.json")).to_str().unwrap().to_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn emitted_corpus_round_trips_and_matches_sidecars() {
    let tmp = TempDir::new().unwrap();
    emit_corpus(tmp.path());
    for inst in INSTANCES {
        let text = std::fs::read_to_string(path(tmp.path(), inst.name)).unwrap();
        assert_eq!(GraphDocument::parse(&text).unwrap().to_json(), text);

        let out = run(&["analyze", &path(tmp.path(), inst.name)]);
        let report: AnalysisReport = serde_json::from_slice(&out.stdout).unwrap();
        assert!(out.status.success(), "{}", inst.name);
        let sidecar = std::fs::read_to_string(tmp.path().join(format!("{}.expected.json", inst.name))).unwrap();
        let expected: ExpectedVerdict = serde_json::from_str(&sidecar).unwrap();
        assert!(expected.mismatches(&report).is_empty(), "{}", inst.name);
    }
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    emit_corpus(tmp.path());

    let missing = run(&["analyze", "/nonexistent/graph.json"]);
    assert_eq!(missing.status.code(), Some(1));

    let bad = write(tmp.path(), "bad.json", r#"{"format": "assur-kit/1", "dimension": 2}"#);
    assert_eq!(run(&["check", bad.to_str().unwrap()]).status.code(), Some(1));

    let unknown_end = write(
        tmp.path(),
        "dangling.json",
        r#"{"format": "assur-kit/1", "dimension": 2, "inner": ["v"], "pinned": ["p"],
            "edges": [{"id": "e", "u": "v", "v": "q"}]}"#,
    );
    let out = run(&["check", unknown_end.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let dyad = path(tmp.path(), "dyad2");
    assert_eq!(run(&["check", &dyad, "--dimension", "3"]).status.code(), Some(1));
    assert_eq!(run(&["drive", &dyad, "--edge", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["corpus", "emit", "no_such_instance", "--dir", tmp.path().to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn pin_pin_edges_rejected_or_dropped() {
    let tmp = TempDir::new().unwrap();
    let g = write(
        tmp.path(),
        "g.json",
        r#"{"format": "assur-kit/1", "dimension": 2, "inner": ["v"], "pinned": ["p1", "p2"],
            "edges": [{"id": "a", "u": "v", "v": "p1"}, {"id": "b", "u": "v", "v": "p2"},
                      {"id": "c", "u": "p1", "v": "p2"}]}"#,
    );
    let g = g.to_str().unwrap();
    assert_eq!(run(&["check", g]).status.code(), Some(1));
    let out = run(&["check", g, "--drop-pin-pin"]);
    assert_eq!(stdout_json(&out)["isostatic"], Value::Bool(true));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`c`"));
}

#[test]
fn orientation_witness() {
    let tmp = TempDir::new().unwrap();
    let g = write(
        tmp.path(),
        "g.json",
        r#"{"format": "assur-kit/1", "dimension": 2, "inner": ["v"], "pinned": ["p1", "p2", "p3"],
            "edges": [{"id": "a", "u": "v", "v": "p1"}, {"id": "b", "u": "v", "v": "p2"},
                      {"id": "c", "u": "v", "v": "p3"}]}"#,
    );
    let out = run(&["orient", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["infeasible"]["reason"], "overloaded");
    assert_eq!(v["infeasible"]["edge_count"], 3);
    assert_eq!(v["infeasible"]["capacity"], 2);
}

#[test]
fn check_and_decompose() {
    let tmp = TempDir::new().unwrap();
    emit_corpus(tmp.path());
    let v = stdout_json(&run(&["check", "--strong", &path(tmp.path(), "weak3_assur")]));
    assert_eq!(v["isostatic"], true);
    assert_eq!(v["assur"], true);
    assert_eq!(v["strongly_assur"], false);

    let multi = path(tmp.path(), "multi_component2");
    let v = stdout_json(&run(&["decompose", &multi, "--extensions", "10"]));
    assert_eq!(v["decomposition"]["components"].as_array().unwrap().len(), 4);
    assert_eq!(v["linear_extensions"].as_array().unwrap().len(), 4);

    // decomposing with a saved orientation gives the same result
    let o = tmp.path().join("o.json");
    assert!(run(&["orient", &multi, "--out", o.to_str().unwrap()]).status.success());
    let w = stdout_json(&run(&["decompose", &multi, "--orientation", o.to_str().unwrap(), "--extensions", "10"]));
    assert_eq!(v, w);

    let counts = stdout_json(&run(&["check-counts", &path(tmp.path(), "overcounted3")]));
    assert_eq!(counts["pass"], false);
    assert_eq!(counts["violations"].as_array().unwrap().len(), 1);
}

#[test]
fn rank_nullspace_and_matrix_dump() {
    let tmp = TempDir::new().unwrap();
    emit_corpus(tmp.path());
    let banana = path(tmp.path(), "double_banana_pinned");
    let csv = tmp.path().join("m.csv");
    let v = stdout_json(&run(&["rank", &banana, "--dump-matrix", csv.to_str().unwrap()]));
    assert_eq!(v["rank"]["rank"], 23);
    assert_eq!(v["certificate"]["isostatic"], false);
    let csv = std::fs::read_to_string(csv).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 1 + 24);
    assert_eq!(csv.lines().count(), 1 + 24);

    let v = stdout_json(&run(&["nullspace", &banana]));
    assert_eq!(v["dimension"], 1);
    let triad = path(tmp.path(), "triad2");
    for mode in ["exact", "float"] {
        let v = stdout_json(&run(&["nullspace", &triad, "--remove-edge", "a-b", "--mode", mode]));
        assert_eq!(v["dimension"], 1, "{mode}");
        let v = stdout_json(&run(&["nullspace", &triad, "--remove-vertex", "a", "--mode", mode]));
        assert_eq!(v["dimension"], 1, "{mode}");
    }
}

#[test]
fn drivers_and_vertex_removal() {
    let tmp = TempDir::new().unwrap();
    emit_corpus(tmp.path());
    let v = stdout_json(&run(&["vertex-removal", &path(tmp.path(), "vertex_removal3"), "--vertex", "E"]));
    assert_eq!(v["moving"], serde_json::json!(["B", "C", "D"]));
    let v = stdout_json(&run(&["drivers", &path(tmp.path(), "weak3_assur"), "--mode", "float"]));
    let weak = v["drivers"].as_array().unwrap().iter().find(|d| d["edge_id"] == "q1-p4").unwrap().clone();
    assert_eq!(weak["kind"], "weak");
}

#[test]
fn drive_exact_and_float() {
    let tmp = TempDir::new().unwrap();
    emit_corpus(tmp.path());
    let dyad = path(tmp.path(), "dyad2");
    let v = stdout_json(&run(&["drive", &dyad, "--edge", "v-p1", "--rate", "2"]));
    assert_eq!(v["velocities"]["v"], serde_json::json!(["-2", "0"]));
    let v = stdout_json(&run(&["drive", &dyad, "--edge", "v-p1", "--rate", "2", "--mode", "float"]));
    let u = v["velocities"]["v"].as_array().unwrap();
    assert!((u[0].as_f64().unwrap() + 2.0).abs() < 1e-12);
    assert!(u[1].as_f64().unwrap().abs() < 1e-12);

    // an edge outside the bottom component is refused
    let stacked = path(tmp.path(), "stacked_dyads");
    assert_eq!(run(&["drive", &stacked, "--edge", "v2-p3"]).status.code(), Some(1));
    let v = stdout_json(&run(&["drive", &stacked, "--edge", "v1-p1"]));
    assert_eq!(v["velocities"].as_object().unwrap().len(), 2);
}

#[test]
fn dot_export() {
    let tmp = TempDir::new().unwrap();
    emit_corpus(tmp.path());
    let stacked = path(tmp.path(), "stacked_dyads");
    let out = run(&["export-dot", &stacked]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("c1 -> c0;"));
    assert!(dot.contains("c0 -> ground;"));
    let out = run(&["export-dot", &stacked, "--full"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.contains("cluster_0"));
    assert!(dot.contains("\"v:v2\" -> \"v:v1\""));
}

#[test]
fn surgery() {
    let tmp = TempDir::new().unwrap();
    emit_corpus(tmp.path());
    let dyad = path(tmp.path(), "dyad2");
    let out = run(&["surgery", "release", &dyad, "--pin", "p1", "--anchors", "q1,q2"]);
    assert!(out.status.success());
    let doc = GraphDocument::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(doc.graph.inner.len(), 2);
    assert_eq!(doc.graph.edges.len(), 4);
    let released = write(tmp.path(), "released.json", &doc.to_json());
    let v = stdout_json(&run(&["check", released.to_str().unwrap()]));
    assert_eq!(v["isostatic"], true);

    let out = run(&["surgery", "repin", released.to_str().unwrap(), "--vertex", "p1"]);
    assert!(out.status.success());
    let back = GraphDocument::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(back.graph.inner.len(), 1);
    assert_eq!(back.graph.edges.len(), 2);

    assert_eq!(run(&["surgery", "release", &dyad, "--pin", "p1", "--anchors", "q1"]).status.code(), Some(1));
    assert_eq!(run(&["surgery", "release", &dyad, "--pin", "v", "--anchors", "q1,q2"]).status.code(), Some(1));
}

#[test]
fn corpus_listing() {
    let out = run(&["corpus", "list"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), INSTANCES.len());
    assert!(text.lines().all(|l| INSTANCES.iter().any(|i| l.starts_with(i.name))));
}
