use std::path::PathBuf;
use std::process::{Command, Output};

use leveltree::io::{read_level_tree, TreeFile};
use leveltree::level::{is_equivalent, LevelTree};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leveltree")).args(args).env_remove("LEVELTREE_MAX_EDGES").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("leveltree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_worked_example() {
    let o = run(&["verify", &data("fig2.json"), "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    for op in ["chart.round_trip", "chart.mu_vanishing", "transition.stratum", "blowup.yk_pullback", "blowup.psi2_level_tree"] {
        assert!(out.contains(&format!("PASS {op}")), "{out}");
    }
}

#[test]
fn verify_reports_failures_with_exit_1() {
    // the larger example hits the literal 𝕀₋ identity
    let o = run(&["verify", &data("fig1.json"), "--suite", "contraction", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["operations"]["contract.index_identities"]["failed_instances"], 1);
    assert_eq!(report["operations"]["contract.index_identities_completed"]["failed_instances"], 0);
    assert!(report.get("elapsed_ms").is_none());
}

#[test]
fn contract_gives_the_contracted_example() {
    let o = run(&["contract", &data("fig2.json"), "--levels", "-2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got = read_level_tree(&stdout(&o)).unwrap();
    // c and d merge into b, which rises to level -1 next to a
    let want = LevelTree::build("o", &[("a", "o", 1, -1), ("b", "o", 2, -1)], 0).unwrap();
    assert!(is_equivalent(&got, &want) && is_equivalent(&want, &got), "{got}");
    let dot = stdout(&run(&["contract", &data("fig2.json"), "--levels", "-1", "--format", "dot"]));
    assert!(dot.starts_with("digraph") && dot.contains("style=dotted"));
}

#[test]
fn indices_on_root_weighted_tree() {
    let f = temp_file("root.json", r#"{"root":"o","parents":{"x":"o"},"weights":{"o":1},"levels":{"x":"-1"}}"#);
    let o = run(&["indices", &f]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("m = 0") && out.contains("𝕀₊ = {}") && out.contains("𝕀₋ = {x}"), "{out}");
}

#[test]
fn bad_input_exits_2() {
    let f = temp_file("broken.json", "{\"root\": \"o\",\n  \"parents\": {\"a\": \"o\",}\n}");
    let o = run(&["validate", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let f = temp_file("upward.json", r#"{"root":"o","parents":{"a":"o"},"weights":{"a":1},"levels":{"a":"1"}}"#);
    let o = run(&["validate", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid level map"), "{}", stderr(&o));

    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nonsense", "--max-edges", "1"]).status.code(), Some(2));
}

#[test]
fn chart_matches_golden() {
    let o = run(&["chart", &data("fig2.json"), "--special", "-1=b,-2=a"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), include_str!("golden/fig2_chart.txt"));
}

#[test]
fn enumerate_counts_and_env_bound() {
    let out = stdout(&run(&["enumerate", "--max-edges", "3", "--count-only"]));
    assert!(out.contains("trees 295") && out.contains("instances 451"), "{out}");
    let o = Command::new(env!("CARGO_BIN_EXE_leveltree"))
        .args(["enumerate", "--count-only"])
        .env("LEVELTREE_MAX_EDGES", "2")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("instances 63"), "{}", stdout(&o));
    let lines = stdout(&run(&["enumerate", "--max-edges", "2"]));
    assert_eq!(lines.lines().count(), 63);
    for l in lines.lines() {
        let f = TreeFile::parse(l).unwrap();
        f.level_tree().unwrap();
    }
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["verify", "--max-edges", "3", "--suite", "all", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), b.status.code());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn blowup_report_on_example() {
    let o = run(&["blowup-report", &data("fig2.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("k=2: eps(-1)\n") && out.contains("k=3: eps(-1) * eps(-2)\n"), "{out}");
    assert!(out.contains("step 2: {a b}") && out.contains("step 3: {a c d}"), "{out}");
}
