use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn knowall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knowall")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("knowall-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

const CONSENSUS: &str = r#"{"kind":"consensus","n":3,"values":[0,1]}"#;

#[test]
fn solve_exit_codes() {
    let star = knowall(&["solve", "--n", "3", "--mask", "3", "--task", CONSENSUS]);
    assert_eq!(star.status.code(), Some(0));
    assert!(stdout(&star).starts_with("SOLVABLE"));

    let cycle = scratch("c3.json", r#"{"n":3,"rounds":[[[1,2],[2,3],[3,1]]]}"#);
    let out = knowall(&["solve", "--instance", cycle.to_str().unwrap(), "--task", CONSENSUS]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("UNSOLVABLE"));

    let reflexive = scratch("bad.json", r#"{"n":2,"rounds":[[[1,1]]]}"#);
    let bad = knowall(&["solve", "--instance", reflexive.to_str().unwrap(), "--task", CONSENSUS]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn gamma_and_homology() {
    let cycle = scratch("c3g.json", r#"{"n":3,"rounds":[[[1,2],[2,3],[3,1]]]}"#);
    let g = knowall(&["gamma", "--instance", cycle.to_str().unwrap()]);
    assert_eq!(stdout(&g), "gamma=2 witness=1,2\n");
    let h = knowall(&["homology", "--n", "3", "--mask", "0", "--up-to", "2"]);
    assert_eq!(stdout(&h), "0 0 1\n");
}

#[test]
fn shell_check_reports_first_violation() {
    let order = scratch("order.facets", "1:0\t2:0\t3:0\n1:0\t2:1\t3:1\n1:0\t2:0\t3:1\n");
    let complex = scratch("complex.facets", "1:0\t2:0\t3:0\n1:0\t2:0\t3:1\n1:0\t2:1\t3:1\n");
    let out = knowall(&["shell-check", "--complex", complex.to_str().unwrap(), "--order", order.to_str().unwrap()]);
    assert_eq!(stdout(&out), "INVALID t=1\n");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_reports_are_reproducible() {
    let args = ["check", "scissor", "--n", "3", "--values", "0,1", "--trials", "40", "--seed", "9"];
    let a = knowall(&args);
    let b = knowall(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains(r#""disagreements":0"#));
}
