use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softsheaf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn alg_con_lists_four_congruences() {
    let o = run(&["alg", "con", &fixture("chain3.alg")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("4 congruences of chain3"));
    assert!(out.contains("{{0,m},{1}}"));
}

#[test]
fn commute_reports_witness() {
    let o = run(&["con", "commute", &fixture("chain3.alg"), "--pairs", "0 m", "m 1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness (0,1)"));

    let o = run(&[
        "con",
        "commute",
        &fixture("chain3.alg"),
        "--pairs",
        "0 m",
        "m 1",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "property_failed");
    assert_eq!(v["report"]["witness"], serde_json::json!(["0", "1"]));
}

#[test]
fn commute_accepts_commuting_pairs() {
    let o = run(&["con", "commute", &fixture("b4.alg"), "--pairs", "(0,0) (0,1)", "(0,0) (1,0)"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn crt_solves_and_rejects() {
    let b4 = fixture("b4.alg");
    let o = run(&[
        "con", "crt", &b4, "--pairs", "(0,0) (0,1)", "(0,0) (1,0)", "--targets", "(1,0)", "(0,1)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "solution: (1,1)");
    let c3 = fixture("chain3.alg");
    let o = run(&["con", "crt", &c3, "--pairs", "0 m", "m 1", "--targets", "0", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["con", "crt", &c3, "--pairs", "0 m", "--targets", "0", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn roundtrip_antichain_kernels() {
    let o = run(&["sheaf", "roundtrip", &fixture("fh.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["sheaf", "roundtrip", &fixture("noncommuting.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("do not commute"));
}

#[test]
fn build_and_soft() {
    let o = run(&["sheaf", "build", &fixture("fh.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("global sections: 4"));
    let o = run(&["sheaf", "soft", &fixture("not_soft.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("over {l,r}"));
    let o = run(&["sheaf", "soft", &fixture("fh.json")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn direct_image_writes_assignment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("image.json");
    let o = run(&[
        "sheaf",
        "direct-image",
        &fixture("fh.json"),
        &fixture("collapse.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["sheaf", "roundtrip", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn dl_commands() {
    let o = run(&["dl", "dual", &fixture("chain3.alg")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("p[m] < p[1]"));
    let o = run(&["dl", "sp", &fixture("b4.alg")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("|Con A| = 4, 2^|X| = 4"));
    let o = run(&["dl", "interp", &fixture("b4_split.json")]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["dl", "interp", &fixture("chain3_split.json")]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["dl", "dual", &fixture("m3.alg")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mv_generators_and_sheaf() {
    let dir = tempfile::tempdir().unwrap();
    let alg = dir.path().join("l1xl2.alg");
    let o = run(&["mv", "product", "1", "2", "--out", alg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["mv", "spectrum", alg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("2 prime ideals"));
    let o = run(&["mv", "sheaf", alg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["global_sections"], 6);
    let o = run(&["mv", "chain", "2"]);
    assert!(stdout(&o).contains("\"(1/2,1/2)\": \"1\""));
    let o = run(&["mv", "chain", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["alg", "validate", alg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("MV-algebra axioms hold"));
}

#[test]
fn export_dot_objects() {
    let o = run(&["export", "dot", &fixture("antichain2.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("digraph poset"));
    let o = run(&["export", "dot", &fixture("chain3.alg")]);
    let out = stdout(&o);
    assert_eq!(out.matches("[label=").count(), 4);
    assert_eq!(out.matches("->").count(), 4);
    let o = run(&["export", "dot", &fixture("fh.json")]);
    let out = stdout(&o);
    assert_eq!(out.matches("subgraph cluster_").count(), 2);
    assert_eq!(out.lines().filter(|l| l.trim_start().starts_with('s') && l.contains("[label=")).count(), 4);
    let o = run(&["export", "dot", &fixture("b4_split.json")]);
    assert!(stdout(&o).contains("fillcolor"));
    let o = run(&["export", "dot", &fixture("collapse.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.alg");
    std::fs::write(&bad, "{\"name\": \"x\", \"carrier\": [\"a\"]").unwrap();
    let o = run(&["alg", "con", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("error:"));
    let o = run(&["alg", "con", "/nonexistent/file.alg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = ["dl", "interp", &fixture("b4_split.json"), "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn suite_single_criterion() {
    let o = run(&["suite", "run", "--criterion", "10", "--sequential"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("criterion 10 PASS"));
    let o = run(&["suite", "run", "--criterion", "11"]);
    assert_eq!(o.status.code(), Some(2));
}
