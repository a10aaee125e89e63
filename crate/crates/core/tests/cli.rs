use std::path::PathBuf;
use std::process::{Command, Output};

use probe_machine::instance::Instance;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn pm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pm"))
        .args(args)
        .env_remove("PM_SEED")
        .output()
        .expect("pm runs")
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn solutions(v: &Value) -> &Vec<Value> {
    v["solutions"].as_array().expect("solutions array")
}

#[test]
fn encode_hamilton_reports_the_library() {
    let out = pm(&["encode", "hamilton", &path("hamilton8.edges")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("data types 17"), "{err}");
    assert!(err.contains("probe types 47"), "{err}");
    let instance = Instance::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(instance.data.types.len(), 17);
    assert_eq!(instance.probes.len(), 47);
}

#[test]
fn encode_coloring_with_fixed_classes() {
    let out = pm(&["encode", "coloring", &path("g12.edges"), "-k", "4", "--fix-classes", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary: Value = serde_json::from_str(stderr(&out).lines().next().unwrap()).unwrap();
    assert_eq!(summary["fibers"], 21);
    assert_eq!(summary["probe_types"], 73);
    assert_eq!(summary["sublibraries"], 30);
}

#[test]
fn encode_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("instance.json");
    let out = pm(&["encode", "coloring", &path("triangle.edges"), "-k", "3", "-o", target.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let instance = Instance::from_json(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(instance.data.types.len(), 3);
}

#[test]
fn infeasible_encodings_exit_3() {
    let out = pm(&["encode", "hamilton", &path("k3.edges")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("at least 5"), "{}", stderr(&out));
    let out = pm(&["solve", "hamilton", &path("path4.edges")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn parse_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.edges");
    std::fs::write(&bad, "1 2\n2 x\n").unwrap();
    let out = pm(&["solve", "hamilton", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
    let missing = dir.path().join("missing.edges");
    assert_eq!(pm(&["oracle", "hamilton", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(pm(&["solve", "hamilton"]).status.code(), Some(2));
    assert_eq!(pm(&["solve", "hamilton", &path("hamilton8.edges"), "--seeds", "5..5"]).status.code(), Some(2));
}

#[test]
fn other_graph_formats_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let col = dir.path().join("c5.col");
    std::fs::write(&col, "c five-cycle\np edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\n").unwrap();
    let graph = dir.path().join("c5.json");
    std::fs::write(&graph, r#"{"n": 5, "edges": [[1, 2], [2, 3], [3, 4], [4, 5], [5, 1]]}"#).unwrap();
    for file in [col, graph] {
        let out = pm(&["solve", "hamilton", file.to_str().unwrap(), "--json"]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert_eq!(solutions(&json(&out)), &vec![serde_json::json!([1, 2, 3, 4, 5])]);
    }
}

#[test]
fn solve_worked_examples() {
    let out = pm(&["solve", "hamilton", &path("hamilton8.edges"), "--mode", "exhaustive", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(
        solutions(&report),
        &vec![serde_json::json!([1, 4, 7, 5, 3, 8, 2, 6]), serde_json::json!([1, 6, 2, 8, 3, 5, 4, 7])]
    );
    let stats = &report["stats"];
    assert_eq!(
        stats["accepted"].as_u64().unwrap() + stats["residues"].as_u64().unwrap(),
        stats["theta"].as_u64().unwrap()
    );
    assert!(report.get("wall_time").is_none());
    assert!(stderr(&out).contains("wall time"));

    let out = pm(&["solve", "coloring", &path("g12.edges"), "-k", "4", "--mode", "exhaustive", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(solutions(&json(&out)).len(), 14);
}

#[test]
fn exhaustive_solve_matches_oracle_on_fixtures() {
    let cases: [(&str, &[&str], &[&str]); 8] = [
        ("hamilton8.edges", &["hamilton"], &["hamilton"]),
        ("g12.edges", &["coloring", "-k", "4"], &["coloring", "-k", "4", "--fix-classes"]),
        ("g12.edges", &["coloring", "-k", "4", "--full-table"], &["coloring", "-k", "4"]),
        ("hamilton8.edges", &["coloring", "-k", "3", "--full-table"], &["coloring", "-k", "3"]),
        ("triangle.edges", &["coloring", "-k", "3", "--full-table"], &["coloring", "-k", "3"]),
        ("triangle.edges", &["coloring", "-k", "3"], &["coloring", "-k", "3", "--fix-classes"]),
        ("path4.edges", &["coloring", "-k", "3", "--full-table"], &["coloring", "-k", "3"]),
        ("k3.edges", &["coloring", "-k", "4", "--full-table"], &["coloring", "-k", "4"]),
    ];
    for (file, solve_args, oracle_args) in cases {
        let graph = path(file);
        let mut args = vec!["solve"];
        args.extend_from_slice(&solve_args[..1]);
        args.push(&graph);
        args.extend_from_slice(&solve_args[1..]);
        args.push("--json");
        let solved = pm(&args);
        assert!(solved.status.success(), "{file}: {}", stderr(&solved));
        let mut args = vec!["oracle"];
        args.extend_from_slice(&oracle_args[..1]);
        args.push(&graph);
        args.extend_from_slice(&oracle_args[1..]);
        args.push("--json");
        let oracle = pm(&args);
        assert!(oracle.status.success(), "{file}: {}", stderr(&oracle));
        assert_eq!(solutions(&json(&solved)), solutions(&json(&oracle)), "{file} {solve_args:?}");
    }
}

#[test]
fn oracle_examples() {
    let out = pm(&["oracle", "coloring", &path("triangle.edges"), "-k", "3", "--json"]);
    assert_eq!(solutions(&json(&out)).len(), 6);
    let out = pm(&["oracle", "hamilton", &path("path4.edges"), "--json"]);
    assert!(out.status.success());
    assert!(solutions(&json(&out)).is_empty());
    let out = pm(&["oracle", "hamilton", &path("hamilton8.edges")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "2 solutions\n1-4-7-5-3-8-2-6\n1-6-2-8-3-5-4-7\n");
}

#[test]
fn stochastic_runs_are_byte_identical_per_seed() {
    let args = ["solve", "hamilton", &path("hamilton8.edges"), "--mode", "stochastic", "--seed", "7", "--copies", "20", "--json"];
    let first = pm(&args);
    let second = pm(&args);
    assert!(matches!(first.status.code(), Some(0) | Some(4)), "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.status.code(), second.status.code());
    let report = json(&first);
    assert_eq!(report["seed"], 7);
    let audit = &report["stats"]["audit"];
    assert_eq!(audit["data_loaded"], audit["data_on_platform"]);
    assert_eq!(
        audit["probes_loaded"].as_u64().unwrap(),
        audit["probes_free"].as_u64().unwrap() + audit["probes_bound"].as_u64().unwrap()
    );
    // Exit 4 exactly when nothing was found.
    assert_eq!(first.status.code() == Some(4), solutions(&report).is_empty());

    let from_env = Command::new(env!("CARGO_BIN_EXE_pm"))
        .args(["solve", "hamilton", &path("hamilton8.edges"), "--mode", "stochastic", "--copies", "20", "--json"])
        .env("PM_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(from_env.stdout, first.stdout);
}

#[test]
fn empty_stochastic_runs_exit_4() {
    // One step cannot form a 12-vertex aggregation.
    let out = pm(&["solve", "coloring", &path("g12.edges"), "-k", "4", "--mode", "stochastic", "--max-steps", "1", "--json"]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(solutions(&json(&out)).is_empty());
    // Exhaustive "provably none" is a success.
    for (file, k) in [("k3.edges", "2"), ("g12.edges", "3")] {
        let out = pm(&["solve", "coloring", &path(file), "-k", k, "--json"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(solutions(&json(&out)).is_empty());
    }
}

#[test]
fn seed_sweeps_merge_in_seed_order() {
    let g = path("g12.edges");
    let sweep = pm(&["solve", "coloring", &g, "-k", "4", "--mode", "stochastic", "--seeds", "3..6", "--copies", "4", "--json"]);
    assert!(matches!(sweep.status.code(), Some(0) | Some(4)), "{}", stderr(&sweep));
    let reports = json(&sweep);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for (k, seed) in (3..6).enumerate() {
        let single = pm(&["solve", "coloring", &g, "-k", "4", "--mode", "stochastic", "--seed", &seed.to_string(), "--copies", "4", "--json"]);
        assert_eq!(reports[k], json(&single), "seed {seed}");
    }
}

#[test]
fn traces_have_one_line_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let out = pm(&[
        "solve", "coloring", &path("g12.edges"), "-k", "4", "--mode", "stochastic", "--seed", "1", "--copies", "3",
        "--json", "--trace", trace.to_str().unwrap(),
    ]);
    assert!(matches!(out.status.code(), Some(0) | Some(4)), "{}", stderr(&out));
    let steps = json(&out)["stats"]["steps"].as_u64().unwrap();
    let text = std::fs::read_to_string(trace).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len() as u64, steps);
    for (k, line) in lines.iter().enumerate() {
        assert_eq!(line["step"], k as u64 + 1);
        assert!(line["probe"].is_object() && line["endpoints"].is_array() && line["merged_orders"].is_array());
    }
}

#[test]
fn dot_output() {
    let out = pm(&["solve", "hamilton", &path("hamilton8.edges"), "--format", "dot"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("graph hamilton_").count(), 2);
    assert_eq!(text.matches("penwidth=3").count(), 16);
    let out = pm(&["solve", "coloring", &path("triangle.edges"), "-k", "3", "--full-table", "--format", "dot"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("graph coloring_").count(), 6);
}

#[test]
fn fixtures_round_trip() {
    for name in ["hamilton8", "g12"] {
        let out = pm(&["fixture", name]);
        assert!(out.status.success());
        let bundled = std::fs::read_to_string(fixture(&format!("{name}.edges"))).unwrap();
        let body: String = bundled.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), body);
    }
}
