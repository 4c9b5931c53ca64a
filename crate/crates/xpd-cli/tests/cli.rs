//! End-to-end tests of the `xpd` binary: outputs and exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use xpd_core::ast::{parse_node_in, Alphabet, Fragment};
use xpd_core::semantics::{parse_tree, Evaluator};

fn xpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xpd"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("xpd-cli-tests-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn sat_emits_a_verified_model() {
    let out = scratch("out.tree");
    let expr = "<down[a]/down[b] = eps>";
    let o = xpd(&["sat", "--fragment", "eq", "--alphabet", "a,b", "--expr", expr, "--emit-model", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("SAT"));
    let alphabet = Alphabet::parse("a,b").unwrap();
    let t = parse_tree(&fs::read_to_string(&out).unwrap(), &alphabet).unwrap();
    let phi = parse_node_in(expr, &alphabet, Fragment::EqOnly).unwrap().desugar();
    assert!(Evaluator::new(&t).holds(t.root(), &phi));
}

#[test]
fn model_requires_an_output_file() {
    let o = xpd(&["model", "--alphabet", "a", "a"]);
    assert_eq!(o.status.code(), Some(2));
    let out = scratch("model.tree");
    let o = xpd(&["model", "--alphabet", "a", "a", "--emit-model", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&out).unwrap().starts_with("(a "));
}

#[test]
fn unsat_exits_one() {
    let o = xpd(&["sat", "--alphabet", "a,b", "<eps != eps>"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "UNSAT");
}

#[test]
fn equivalence_of_the_complement_of_a_label() {
    let o = xpd(&["equiv", "--fragment", "eq", "--alphabet", "a,b,c", "!a", "(b & <eps=eps>) | (c & <eps=eps>)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "EQUIV");
}

#[test]
fn differ_reports_a_separating_tree() {
    let o = xpd(&[
        "equiv",
        "--fragment",
        "eq",
        "--alphabet",
        "a,b",
        "--json",
        "<down[a]/down[b] = eps>",
        "<down[a & <down[b]>] = eps>",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "DIFFER");
    let alphabet = Alphabet::parse("a,b").unwrap();
    let t = parse_tree(v["tree"].as_str().unwrap(), &alphabet).unwrap();
    let p = |s| parse_node_in(s, &alphabet, Fragment::EqOnly).unwrap().desugar();
    let (l, r) = (p("<down[a]/down[b] = eps>"), p("<down[a & <down[b]>] = eps>"));
    let mut ev = Evaluator::new(&t);
    assert_ne!(ev.holds(t.root(), &l), ev.holds(t.root(), &r));
}

#[test]
fn path_equivalence() {
    let o = xpd(&["equiv", "--alphabet", "a,b", "down[a] + down[b]", "down"]);
    assert_eq!(o.status.code(), Some(0));
    let o = xpd(&["equiv", "--alphabet", "a,b", "down[a]", "down"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_proof_accepts_the_unit_law_script() {
    let file = scratch("proof.txt");
    fs::write(
        &file,
        "alphabet: a,b\nfragment: eq\ngoal: eps/down == down/eps\n\
         1. axiom IsAx5.1 {alpha=down}\n2. axiom IsAx5.2 {alpha=down}\n3. sym 2\n4. trans 1 3\n",
    )
    .unwrap();
    let o = xpd(&["check-proof", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "accepted");
    fs::write(&file, "alphabet: a,b\nfragment: eq\ngoal: a == b\n1. axiom IsAx5.1 {alpha=a}\n").unwrap();
    let o = xpd(&["check-proof", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("rejected at step 1"));
}

#[test]
fn eval_at_a_child() {
    let file = scratch("example.tree");
    fs::write(&file, "(a 0 (a 0 (b 1)) (b 1))").unwrap();
    let t = file.to_str().unwrap();
    let o = xpd(&["eval", "--alphabet", "a,b", "--tree", t, "<down/down[b] != eps>"]);
    assert_eq!((o.status.code(), stdout(&o).trim().to_string()), (Some(0), "true".into()));
    let o = xpd(&["eval", "--alphabet", "a,b", "--tree", t, "--at", "1", "a"]);
    assert_eq!((o.status.code(), stdout(&o).trim().to_string()), (Some(1), "false".into()));
    let o = xpd(&["eval", "--alphabet", "a,b", "--tree", t, "--at", "7", "a"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_and_normalize() {
    let o = xpd(&["parse", "--alphabet", "a,b", "--json", "<down[a] = eps> & b"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["sort"].as_str(), v["dd"].as_u64()), (Some("node"), Some(1)));
    let o = xpd(&["normalize", "--fragment", "eq", "--alphabet", "a,b", "!a"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("level 0: 1 disjunct(s)"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(xpd(&["sat", "a"]).status.code(), Some(2));
    assert_eq!(xpd(&["sat", "--alphabet", "a", "<down[c]>"]).status.code(), Some(2));
    assert_eq!(xpd(&["sat", "--alphabet", "a", "--fragment", "eq", "<eps != eps>"]).status.code(), Some(2));
    assert_eq!(xpd(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_three() {
    // No tree of the default search bounds has depth 3, so the fallback cannot help.
    let o = xpd(&["sat", "--alphabet", "a,b", "--fragment", "eq", "<down/down/down>"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn oracle_sat_respects_bounds() {
    let o = xpd(&["oracle-sat", "--alphabet", "a", "<down/down>", "--max-depth", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = xpd(&["oracle-sat", "--alphabet", "a", "<down/down>"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn fuzz_and_cross_check_small_runs() {
    let o = xpd(&["fuzz-axioms", "--alphabet", "a,b", "--fragment", "eq", "--trees", "20", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["counterexamples"], 0);
    let small = ["--max-nodes", "3", "--max-classes", "3"];
    let mut args = vec!["cross-check", "--alphabet", "a", "--fragment", "full", "--extra", "5"];
    args.extend(small);
    assert_eq!(xpd(&args).status.code(), Some(0));
    args.push("--mutate");
    assert_eq!(xpd(&args).status.code(), Some(1));
}
