use std::path::PathBuf;
use std::process::{Command, Output};

fn adt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adt")).args(args).env_remove("ADT_CEILING").output().expect("adt runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("adt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn eval_add() {
    let o = adt(&["eval", "--alg", "N", "--der", "add", "--args", "(2 3)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "5\n");
    let o = adt(&["eval", "--alg", "N*", "--der", "arrlen", "--args", "(4)"]);
    assert_eq!(stdout(&o), "4\n", "{}", String::from_utf8_lossy(&o.stderr));
    let o = adt(&["eval", "--alg", "N*", "--der", &data("lgth.der"), "--args", "([true false true])"]);
    assert_eq!(stdout(&o), "3\n", "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(adt(&["--bogus"]).status.code(), Some(2));
    assert_eq!(adt(&["eval", "--der", "add", "--args", "(1)"]).status.code(), Some(2));
    assert_eq!(adt(&["eval", "--der", "nosuch.der"]).status.code(), Some(2));
    assert_eq!(adt(&["approx"]).status.code(), Some(2));
    assert_eq!(adt(&["corpus-run"]).status.code(), Some(2));
}

#[test]
fn inconsistent_model_exits_one() {
    let o = adt(&["model", "--spec", &data("bad.spec")]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["check"], "model");
    assert_eq!(v["status"], "fail");
    assert_eq!(v["detail"], "inconsistent");
}

#[test]
fn undetermined_boolean() {
    let o = adt(&["model", "--spec", &data("u.spec"), "--depth", "1", "--dump"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("\\\"determines_bool\\\":false"), "{out}");
}

#[test]
fn compile_eliminate_extract() {
    let spec = tmp("isqrt.spec");
    let elim = tmp("isqrt_elim.spec");
    assert_eq!(adt(&["compile", "--der", "isqrt", "--out", spec.to_str().unwrap()]).status.code(), Some(0));
    let o = adt(&["eliminate-bu", "--spec", spec.to_str().unwrap(), "--mode", "bool", "--out", elim.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c: serde_json::Value = serde_json::from_str(stdout(&adt(&["counts", "--spec", elim.to_str().unwrap()])).trim()).unwrap();
    assert_eq!(c["bu_occurrences"], 0);
    let o = adt(&["extract", "--spec", elim.to_str().unwrap(), "--args", "(10)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\\\"term\\\":\\\"#3\\\""), "{}", stdout(&o));
    let o = adt(&["extract", "--der", "fact", "--args", "(3)"]);
    assert!(stdout(&o).contains("\\\"value\\\":\\\"6\\\""), "{}", stdout(&o));
}

#[test]
fn query_and_ceiling() {
    let spec = tmp("add.spec");
    assert_eq!(adt(&["compile", "--der", "add", "--out", spec.to_str().unwrap()]).status.code(), Some(0));
    let text = std::fs::read_to_string(&spec).unwrap();
    let target = text.split("(target ").nth(1).unwrap().split(')').next().unwrap().to_string();
    let s = spec.to_str().unwrap();
    let lhs = format!("({target} #2 #3)");
    assert_eq!(adt(&["query", "--spec", s, "--nstd", "--lhs", &lhs, "--rhs", "#5"]).status.code(), Some(0));
    assert_eq!(adt(&["query", "--spec", s, "--nstd", "--lhs", &lhs, "--rhs", "#4"]).status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_adt")).args(["model", "--spec", s, "--depth", "3"]).env("ADT_CEILING", "50").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn axiom_printers() {
    let o = adt(&["arrax", "--alg", "N"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(axiom arrax"));
    let o = adt(&["nstdax", "--alg", "N"]);
    assert!(stdout(&o).contains("(axiom nstd"));
    assert_eq!(adt(&["nstdax", "--alg", "B"]).status.code(), Some(2));
}

#[test]
fn approx_report() {
    let o = adt(&["approx", "--der", &data("exp.der"), "--oracle", "exp", "--nmax", "20", "--samples", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l["status"] == "pass"));
}

#[test]
fn corpus_reports_are_reproducible() {
    let a = adt(&["corpus-run", "--seed", "42"]);
    let b = adt(&["corpus-run", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    for l in stdout(&a).lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert!(v["check"].is_string() && v["detail"].is_string());
        assert_eq!(v["status"], "pass");
    }
}
