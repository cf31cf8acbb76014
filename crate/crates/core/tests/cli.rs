//! Drives the built binary.

use std::path::Path;
use std::process::{Command, Output};

use unitalforge::certificate::Certificate;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unitalforge"))
        .args(args)
        .env_remove("UNITALFORGE_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const Q3: [&str; 4] = ["--p", "3", "--m", "2"];

fn with(cmd: &[&str], extra: &[&str]) -> Vec<String> {
    cmd.iter().chain(Q3.iter()).chain(extra.iter()).map(|s| s.to_string()).collect()
}

fn run_v(args: Vec<String>) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&refs)
}

#[test]
fn unital_build_writes_certificate_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let cert = path(dir.path(), "u.json");
    let file = path(dir.path(), "u.txt");
    let o = run_v(with(&["unital", "build"], &["--spec", "square", "--theta", "auto", "--out", &cert, "--unital-out", &file]));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("points=28"));
    let c = Certificate::from_json(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert!(c.passed() && c.verify_hash());
    assert_eq!(c.unital().unwrap().points().len(), 28);
    let text = std::fs::read_to_string(&file).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "UNITAL v1");
    assert_eq!(lines[2], "square");
    assert_eq!(lines.len(), 4 + 28);
}

#[test]
fn same_config_same_hash() {
    let a = run_v(with(&["circles"], &["--format", "json"]));
    let b = run_v(with(&["circles"], &["--format", "json"]));
    let ca = Certificate::from_json(&stdout(&a)).unwrap();
    let cb = Certificate::from_json(&stdout(&b)).unwrap();
    assert_eq!(ca.hash, cb.hash);
    let c = run_v(with(&["circles"], &["--format", "json", "--list"]));
    assert_ne!(Certificate::from_json(&stdout(&c)).unwrap().hash, ca.hash);
}

#[test]
fn cache_reuses_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cache = path(dir.path(), "cache");
    let first = run_v(with(&["unital", "build"], &["--cache-dir", &cache]));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let second = Command::new(env!("CARGO_BIN_EXE_unitalforge"))
        .args(with(&["unital", "build"], &["--cache-dir", &cache]))
        .output()
        .unwrap();
    assert_eq!(stdout(&first), stdout(&second));
    // the environment variable wins over the flag
    let env_cache = path(dir.path(), "env");
    Command::new(env!("CARGO_BIN_EXE_unitalforge"))
        .args(with(&["unital", "build"], &["--cache-dir", &cache]))
        .env("UNITALFORGE_CACHE", &env_cache)
        .output()
        .unwrap();
    assert_eq!(std::fs::read_dir(&env_cache).unwrap().count(), 1);
}

#[test]
fn onan_find_counts() {
    let o = run_v(with(&["onan", "find"], &[]));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "count=0"));
    let o = run_v(with(&["onan", "find"], &["--search", "exhaustive"]));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "count=324"));
    let onan: Vec<&str> = out.lines().filter(|l| l.starts_with("ONAN blocks=[")).collect();
    assert_eq!(onan.len(), 324);
    let mut sorted = onan.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), 324);
    let o = run_v(with(&["onan", "find"], &["--search", "exhaustive", "--budget", "10"]));
    assert!(stdout(&o).contains("complete=false"));
}

#[test]
fn onan_construct_exit_codes() {
    let o = run(&["onan", "construct", "--p", "5", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ONAN blocks=[42,256,468,625] points=[0,7,14,89,125,607]"));
    let o = run_v(with(&["onan", "construct"], &[]));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("CHECK explicit construction FAIL"));
}

#[test]
fn compare_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let u = path(dir.path(), "u.json");
    let h = path(dir.path(), "h.txt");
    run_v(with(&["unital", "build"], &["--out", &u]));
    run_v(with(&["unital", "build"], &["--source", "classical", "--unital-out", &h]));
    let o = run(&["compare", "--left", &u, "--right", &h]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("NON-ISOMORPHIC (onan count: 324 vs 0)"));
    let o = run(&["compare", "--left", &u, "--right", &u]);
    assert_eq!(stdout(&o).lines().next(), Some("UNDECIDED (all computed invariants agree)"));
}

#[test]
fn wilbrink_output_format() {
    let o = run_v(with(&["wilbrink"], &[]));
    assert!(stdout(&o).lines().any(|l| l == "VERTEX 90 strong=true satisfied=432/432"));
    let o = run_v(with(&["wilbrink"], &["--all"]));
    let vertices = stdout(&o).lines().filter(|l| l.starts_with("VERTEX ")).count();
    assert_eq!(vertices, 28);
    assert!(stdout(&o).contains("strong_vertices=1"));
}

#[test]
fn plane_dump_lines() {
    let o = run_v(with(&["plane", "dump", "--lines"], &[]));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 91);
    for (i, l) in lines.iter().enumerate() {
        let (head, pts) = l.split_once(" : ").unwrap();
        assert_eq!(head, format!("L {i}"));
        assert_eq!(pts.split(' ').count(), 10);
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["unital", "build", "--p", "4", "--m", "2"],
        vec!["unital", "build", "--p", "3", "--m", "2", "--spec", "nope"],
        vec!["unital", "build", "--p", "3", "--m", "3"],
        vec!["unital", "build", "--m", "2"],
        vec!["unital", "build", "--p", "3", "--m", "2", "--theta", "x"],
        vec!["unital", "frobnicate"],
        vec!["plane", "verify", "--p", "3", "--m", "6", "--spec", "albert:k=2"],
        vec!["polarity", "verify", "--p", "3", "--m", "2", "--kappa", "bogus"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["unital", "build", "--p", "3", "--m", "2", "--spec", "nope"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--spec"));
}

#[test]
fn check_failures_exit_1() {
    let o = run_v(with(&["planar", "verify"], &["--spec", "custom:2:1,1:1"]));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("CHECK normal FAIL"));
    // theta = 1 lies in F_q and fails the unital hypothesis
    let o = run_v(with(&["unital", "build"], &["--theta", "1"]));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn other_subcommands_pass() {
    for cmd in [
        vec!["field", "check"],
        vec!["planar", "verify"],
        vec!["plane", "verify"],
        vec!["unital", "verify"],
        vec!["unital", "dual"],
        vec!["unital", "ovals"],
        vec!["polarity", "verify"],
        vec!["polarity", "build"],
        vec!["subgroups"],
        vec!["subgroups", "--source", "polarity"],
    ] {
        let o = run_v(with(&cmd, &[]));
        assert_eq!(o.status.code(), Some(0), "{cmd:?}: {}", stdout(&o));
    }
    let o = run_v(with(&["subgroups"], &[]));
    assert!(stdout(&o).contains("SUBGROUP sigma1 order=27 abelian=true"));
}

#[test]
fn suite_single_criterion() {
    let o = run(&["suite", "--quick", "--only", "1,5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("|  1 | PASS"));
    assert!(out.contains("|  5 | PASS"));
}
