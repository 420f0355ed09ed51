use std::path::PathBuf;
use std::process::{Command, Output};

use cardseq::chain::ChainReport;
use cardseq::report::Report;

const GOOD: &str = "points\n<0, 0>\n<1, 0>\norder\n<0, 0> < <1, 0>\ninf\n{<0, 0>, <1, 0>} = {<0, 0>}\n";
const UNREALIZED: &str = "points\n<0, 0>\n<w + 1, 0>\norder\n<0, 0> < <w + 1, 0>\ninf\n{<0, 0>, <w + 1, 0>} = {<0, 0>}\n";
const POSET: &str = "0/a\n1/t\nsupply 0/a = w\norder 0/a < 1/t\ninf {0/a, 1/t} = {0/a}\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cardseq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn file(name: &str, body: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn walk_prints_sequence_and_separation() {
    let o = run(&["walk", "0", "w+1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("<0, w, w, w + 1>\n"), "{out}");
    assert!(out.contains("J = [0, w)"), "{out}");
}

#[test]
fn walk_suite_passes() {
    let o = run(&["walk", "--check", "gamma-visit", "--samples", "50", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn gfun_of_a_small_pair() {
    let o = run(&["gfun", "3", "w+1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "{0}");
}

#[test]
fn condition_checks_set_the_exit_code() {
    assert_eq!(run(&["check-cond", &file("good.cond", GOOD)]).status.code(), Some(0));
    let o = run(&["check-cond", &file("bad.cond", UNREALIZED)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("P4"));
    let o = run(&["--format", "json", "check-cond", &file("bad2.cond", UNREALIZED)]);
    let r: Report = serde_json::from_slice(&o.stdout).expect("report json");
    assert!(r.has_rule("P4"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["walk", "0", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["check-cond", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(run(&["suite", "forcing"]).status.code(), Some(2));
    assert_eq!(run(&["walk", "1", "0"]).status.code(), Some(2));
    assert_eq!(run(&["--universe", &file("u.txt", "delta = 3\n"), "walk", "0", "1"]).status.code(), Some(2));
}

#[test]
fn extend_adds_a_fresh_predecessor() {
    let o = run(&["extend", &file("ext.cond", GOOD), "--target", "<1, 0>", "--alpha", "0", "--j", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("<0, 3> < <1, 0>"), "{out}");
}

#[test]
fn transform_and_amalgamate() {
    let c = file("t.cond", GOOD);
    let o = run(&["transform", &c]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("order 0/u0 < 1/u0"));
    let map = file("id.map", "<0, 0> -> <0, 0>\n<1, 0> -> <1, 0>\n");
    let o = run(&["amalgamate", &c, &c, "--map", &map]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["oracle-extend", &c, &c, "--bound", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn posets_and_ranks() {
    let p = file("p.txt", POSET);
    assert_eq!(run(&["validate-poset", &p]).status.code(), Some(0));
    let dot = stdout(&run(&["--format", "dot", "validate-poset", &p]));
    assert!(dot.starts_with("digraph poset"));
    let cb = stdout(&run(&["cb", &p]));
    assert!(cb.contains("1/t rank 1") && cb.contains("cardinal sequence <w, 1>"), "{cb}");
}

#[test]
fn adequacy_of_a_family() {
    let f = file("fam.txt", "{0, w + 1}\n{0, w*2 + 1}\n");
    assert_eq!(run(&["adequacy", &f]).status.code(), Some(0));
}

#[test]
fn tree_formats() {
    let dot = stdout(&run(&["--format", "dot", "tree", "--depth", "1"]));
    assert!(dot.starts_with("digraph intervals"));
    let json = run(&["--format", "json", "tree", "--depth", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v[0][0]["hi"], "w^2*2");
}

#[test]
fn chain_json_round_trips_and_repeats() {
    let a = run(&["--format", "json", "chain", "--saturate", "12", "--seed", "5"]);
    let b = run(&["--format", "json", "chain", "--saturate", "12", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let r: ChainReport = serde_json::from_slice(&a.stdout).expect("chain json");
    assert_eq!(r.steps, 12);
    let sched = file("s.txt", "# two predecessors\nadd <1, 0>\nextend <1, 0> 0 0\nextend <1, 0> 0 1\n");
    let o = run(&["chain", "--schedule", &sched]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("<1, 0> at 0:"));
}

#[test]
fn seeded_suites_pass() {
    for name in ["ordinal", "tree"] {
        assert_eq!(run(&["suite", name]).status.code(), Some(0), "{name}");
    }
    for name in ["star", "walks", "adequacy", "poset", "forcing"] {
        let o = run(&["suite", name, "--seed", "1", "--samples", "20"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}
