use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use dtds::decide::{sat, SatOptions};
use dtds::proofkit::ProofScript;
use dtds::syntax::parse;
use dtds::{LassoSystem, Premodel};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtds")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), value)
}

fn offer() -> String {
    data("offer.json").to_string_lossy().into_owned()
}

#[test]
fn parse_reports_closure_and_rejects_unknown_agents() {
    let (code, v) = json(&["parse", "dia [1] X p"]);
    assert_eq!(code, 0);
    assert_eq!(v["formula"], "dia [1] X p");
    assert_eq!(v["raw"], "~box ~[1] X p");
    assert_eq!(v["closure_size"], 8);
    let out = run(&["parse", "[3] p", "--agents", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("agent 3"));
}

#[test]
fn check_matches_library_evaluation() {
    let m = Premodel::from_json(&std::fs::read_to_string(data("offer.json")).unwrap(), false).unwrap();
    for text in ["box p", "dia [1] X (O1 [1] p & O2 [2] q)", "O2 [2] q", "X q"] {
        let f = parse(text, 2).unwrap();
        for s in 0..m.len() {
            let (code, v) = json(&["check", &offer(), "--formula", text, "--state", m.name(s)]);
            assert_eq!(code, 0);
            assert_eq!(v["results"][0]["value"], m.eval(s, &f).unwrap(), "{text} at {}", m.name(s));
        }
    }
}

#[test]
fn audit_exit_codes_follow_violations() {
    let (code, v) = json(&["audit", &offer()]);
    assert_eq!(code, 0);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    let grid = data("split_grid.json");
    let grid = grid.to_str().unwrap();
    assert_eq!(json(&["audit", grid]).0, 0);
    let (code, v) = json(&["audit", grid, "--additive"]);
    assert_eq!(code, 1);
    assert_eq!(v["violations"][0]["condition"], "D3");
    assert_eq!(v["violations"][0]["witness"], serde_json::json!([3, 4]));
}

#[test]
fn side_conditions_flag_branching_next() {
    let fork = data("fork.json");
    let (code, v) = json(&["sides", fork.to_str().unwrap(), "--formula", "X p"]);
    assert_eq!(code, 1);
    assert_eq!(v[0]["kind"], "XFunc");
    assert_eq!(v[0]["state"], 0);
    let (code, _) = json(&["sides", &offer(), "--formula", "X p"]);
    assert_eq!(code, 0);
}

#[test]
fn contradictory_obligations_are_unsat_up_to_the_bound() {
    let out = run(&["sat", "O1 p & O1 ~p", "--states", "3", "--agents", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("# sat O1 p & O1 ~p states<=3 agents=1 seed=0"), "{text}");
    let (code, v) = json(&["sat", "O1 p & O1 ~p", "--states", "3", "--agents", "1"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "UNSAT-UP-TO");
    assert_eq!(v["detail"]["exhaustive_up_to"], 3);
}

#[test]
fn sat_emits_a_witness_that_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("witness.json");
    let text = "dia [1] X (O1 [1] p & O2 [2] q)";
    let (code, v) = json(&["sat", text, "--states", "4", "--agents", "2", "--emit-witness", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "SAT");
    let lib = sat(&parse(text, 2).unwrap(), &SatOptions::new(4, 2)).unwrap();
    assert_eq!(v["explored"], lib.explored);
    let sys = LassoSystem::from_json(&std::fs::read_to_string(&file).unwrap(), Some(dir.path()), false).unwrap();
    assert!(sys.eval_at(0, 0, &parse(text, 2).unwrap()).unwrap());
}

#[test]
fn valid_reports_countermodels() {
    let (code, v) = json(&["valid", "X p -> p", "--states", "3", "--agents", "1"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "COUNTERMODEL");
    assert_eq!(v["formula"], "X p -> p");
    let (code, v) = json(&["valid", "box p -> [1] p", "--states", "3", "--agents", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "VALID-UP-TO");
}

#[test]
fn unravel_and_filtrate_write_loadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let lasso = dir.path().join("lasso.json");
    let out = run(&[
        "unravel",
        &offer(),
        "--formula",
        "dia [1] X (O1 [1] p & O2 [2] q)",
        "--out",
        lasso.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sys = LassoSystem::from_json(&std::fs::read_to_string(&lasso).unwrap(), Some(dir.path()), false).unwrap();
    assert!(sys.audit_window().is_clean());
    assert_eq!(json(&["audit", lasso.to_str().unwrap()]).0, 0);

    let quotient = dir.path().join("quotient.json");
    let out = run(&["filtrate", &offer(), "--formula", "p", "--out", quotient.to_str().unwrap()]);
    assert!(out.status.success());
    let m = Premodel::from_json(&std::fs::read_to_string(&quotient).unwrap(), false).unwrap();
    assert!(m.len() <= 4);
}

#[test]
fn additive_converts_the_split_grid() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("additive.json");
    let grid = data("split_grid.json");
    let out = run(&["additive", grid.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&["audit", target.to_str().unwrap(), "--additive"]).0, 0);
}

#[test]
fn prove_check_accepts_the_bundled_script_and_rejects_a_broken_one() {
    let proof = data("until_weakening.proof");
    let (code, v) = json(&["prove", "check", proof.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["ok"], true);
    let text = std::fs::read_to_string(&proof).unwrap().replace("MP 1 2", "MP 2 1");
    assert!(ProofScript::parse(&text, 2).unwrap().check(2).is_err());
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.proof");
    std::fs::write(&bad, text).unwrap();
    let (code, v) = json(&["prove", "check", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["failure"]["line"], 3);
}

#[test]
fn missing_files_are_errors() {
    let out = run(&["audit", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn examples_list_names_the_corpus() {
    let out = run(&["examples", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("power"));
    assert!(text.contains("dia [1] X (O1 [1] p & O2 [2] q)"));
}
