//! The binary against direct library calls on the same inputs.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use succinct_dyn::annet::expand_dynamics;
use succinct_dyn::arith::find_solutions;
use succinct_dyn::graph::glue;
use succinct_dyn::logic::{fixed_point, random_corpus};
use succinct_dyn::pump::shipped_fixture_dir;
use succinct_dyn::reduce::demos::Demo;
use succinct_dyn::reduce::{compile_reduction, ReductionOutput};
use succinct_dyn::treedec::fixtures as td;
use succinct_dyn::Digraph;
use tempfile::TempDir;

fn sdyn(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sdyn")).args(args).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let doc = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), doc, String::from_utf8(out.stderr).unwrap())
}

fn write(dir: &Path, name: &str, v: &impl serde::Serialize) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.display().to_string()
}

fn fixture(name: &str) -> String {
    shipped_fixture_dir().join(name).display().to_string()
}

#[test]
fn mc_check_on_a_self_loop() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "loop.json", &Digraph::from_edges(2, [(0, 0), (0, 1)]));
    let (code, doc, _) = sdyn(&["mc", "check", "--psi", "exists x. x -> x", "--graph", &g]);
    assert_eq!((code, doc), (0, json!({ "result": true })));
    let psi = write(dir.path(), "psi.txt", &"unused");
    std::fs::write(&psi, "forall x. exists y. x -> y\n").unwrap();
    let (code, doc, _) = sdyn(&["mc", "check", "--psi", &psi, "--graph", &g]);
    assert_eq!((code, doc), (0, json!({ "result": false })));
}

#[test]
fn arith_solve_lists_witnesses() {
    let (code, doc, _) = sdyn(&["arith", "solve", "--a", "2", "--b", "4", "--q", "2", "--nmax", "5"]);
    assert_eq!(code, 0);
    let pairs: Vec<(u64, u32)> = doc["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| (w["k"].as_u64().unwrap(), w["n"].as_u64().unwrap() as u32))
        .collect();
    assert_eq!(pairs, [(0, 2), (2, 3), (6, 4), (14, 5)]);
    let lib: Vec<(String, u32)> = find_solutions(2, 4, 2, 5).into_iter().map(|w| (w.k.to_string(), w.n)).collect();
    assert_eq!(pairs.iter().map(|(k, n)| (k.to_string(), *n)).collect::<Vec<_>>(), lib);
    assert_eq!(doc["geometric_sequence"], json!({ "n0": 2, "mu": 1 }));
    let (_, doc, _) = sdyn(&["arith", "solve", "--a", "4", "--b", "2", "--q", "2", "--nmax", "30"]);
    assert_eq!(doc["witnesses"], json!([{ "k": 0, "n": 1 }]));
    assert_eq!(doc["geometric_sequence"], Value::Null);
}

#[test]
fn reduce_build_and_verify_the_fixed_point_demo() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.json").display().to_string();
    let (code, summary, err) = sdyn(&["reduce", "build", "--demo", "fixed-point", "-o", &out]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(summary["expected_word"], "2111110013");
    let (code, doc, _) = sdyn(&["reduce", "verify", "--output", &out]);
    assert_eq!(code, 0);
    assert_eq!(doc["passed"], true);

    let written: ReductionOutput = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let demo = Demo::FixedPoint;
    let lib = compile_reduction(&demo.gadgets().unwrap(), &demo.default_formula(), demo.settings()).unwrap();
    assert_eq!(written, lib);

    // ψ that disagrees with the word is a verification failure, not a usage error.
    let (code, doc, _) = sdyn(&["reduce", "verify", "--output", &out, "--psi", "forall x. !(x -> x)"]);
    assert_eq!((code, &doc["passed"]), (1, &json!(false)));
}

#[test]
fn reduce_build_options_reach_the_compiler() {
    let (code, doc, _) =
        sdyn(&["reduce", "build", "--demo", "tautology", "--formula", "x1 | !x1", "--vars", "2", "--orient", "unsat"]);
    assert_eq!(code, 0);
    assert_eq!(doc["orientation"], "unsat");
    assert_eq!(doc["expected_word"], "2111144443");
    let (code, _, err) = sdyn(&["reduce", "build", "--demo", "tautology", "--kind", "an"]);
    assert_eq!(code, 2);
    assert!(err.contains("mode"), "{err}");
}

#[test]
fn pump_pipeline_from_fixture_to_verified_reduction() {
    let dir = TempDir::new().unwrap();
    let (code, doc, _) = sdyn(&["pump", "verify", "--fixture", &shipped_fixture_dir().display().to_string()]);
    assert_eq!((code, &doc["verdict"]), (0, &json!(true)));

    let triple = dir.path().join("triple.json").display().to_string();
    let (code, doc, _) = sdyn(&[
        "pump", "find", "--model", &fixture("model.json"), "--decomp", &fixture("decomp.json"),
        "--psi", &fixture("psi.txt"), "--functional", "-o", &triple,
    ]);
    assert_eq!((code, &doc["found"]), (0, &json!(true)));
    let omega = write(dir.path(), "omega.json", &Digraph::from_edges(1, [(0, 0)]));
    let gadgets: PathBuf = dir.path().to_path_buf();
    let (code, doc, err) =
        sdyn(&["pump", "assemble", "--triple", &triple, "--omega", &omega, "--q", "2", "-o", gadgets.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!((doc["a"].as_u64(), doc["b"].as_u64()), (Some(2), Some(6)));

    let out = dir.path().join("out.json").display().to_string();
    let (code, _, err) = sdyn(&[
        "reduce", "build", "--gadgets", gadgets.to_str().unwrap(), "--formula", "x1 & !x2", "--kind", "an", "-o", &out,
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, doc, _) = sdyn(&["reduce", "verify", "--output", &out, "--psi", &fixed_point().to_string()]);
    assert_eq!((code, &doc["passed"]), (0, &json!(true)));
}

#[test]
fn glue_and_td_match_the_library() {
    let dir = TempDir::new().unwrap();
    let (l, r) = (write(dir.path(), "l.json", &td::left_graph()), write(dir.path(), "r.json", &td::right_graph()));
    let (code, doc, _) = sdyn(&["glue", &l, &r]);
    assert_eq!(code, 0);
    assert_eq!(doc, serde_json::to_value(glue(&td::left_graph(), &td::right_graph()).unwrap()).unwrap());

    let (tl, tr) = (write(dir.path(), "tl.json", &td::left_decomp()), write(dir.path(), "tr.json", &td::right_decomp()));
    let (code, tree, _) = sdyn(&["td", "glue", &tl, &tr]);
    assert_eq!(code, 0);
    let t = write(dir.path(), "t.json", &tree);
    let g = write(dir.path(), "g.json", &doc);
    let (code, doc, _) = sdyn(&["td", "validate", "--decomp", &t, "--graph", &g]);
    assert_eq!((code, doc), (0, json!({ "valid": true, "width": 1 })));
    let (code, _, _) = sdyn(&["td", "validate", "--decomp", &tl, "--graph", &g]);
    assert_eq!(code, 1);
}

#[test]
fn lookup_then_expand_round_trips() {
    let dir = TempDir::new().unwrap();
    let g = Digraph::from_edges(8, (0..8).map(|i| (i, (3 * i + 1) % 8)));
    let gp = write(dir.path(), "g.json", &g);
    let (code, desc, _) = sdyn(&["dyn", "lookup", "--graph", &gp, "--alphabet", "2,2,2"]);
    assert_eq!(code, 0);
    let dp = write(dir.path(), "d.json", &desc);
    for extra in [&[][..], &["--sequential"][..]] {
        let mut args = vec!["dyn", "expand", "--descriptor", dp.as_str()];
        args.extend_from_slice(extra);
        let (code, doc, _) = sdyn(&args);
        assert_eq!(code, 0);
        let back: Digraph = serde_json::from_value(doc).unwrap();
        assert!(back.same_indexed_edges(&g));
        let lib = expand_dynamics(&serde_json::from_value(desc.clone()).unwrap()).unwrap();
        assert!(back.same_indexed_edges(&lib));
    }
}

#[test]
fn seeded_corpus_is_reproducible() {
    let (_, a, _) = sdyn(&["mc", "corpus", "--count", "5", "--seed", "9"]);
    let (_, b, _) = sdyn(&["--seed", "9", "mc", "corpus", "--count", "5"]);
    assert_eq!(a, b);
    let lib: Vec<String> = random_corpus(9, 5, 2).iter().map(ToString::to_string).collect();
    assert_eq!(a["formulas"], json!(lib));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["arith", "solve", "--a", "2"][..],
        &["mc", "check", "--psi", "exists x.", "--graph", "/nonexistent.json"],
        &["reduce", "build"],
        &["frobnicate"],
    ] {
        let (code, _, err) = sdyn(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}
