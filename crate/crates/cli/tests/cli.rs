use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tsc(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tsc"));
    cmd.args(args).env_remove("TSC_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("TSC_CACHE_DIR", dir);
    }
    cmd.output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn graph_then_search_with_cache() {
    let dir = tempfile::tempdir().unwrap();
    let graph = path(dir.path(), "gp5.json");
    let out = tsc(&["graph", "gp", "--p", "3", "--r", "4", "--k", "5", "--out", &graph], None);
    assert!(out.status.success());
    let file = json(Path::new(&graph));
    assert_eq!(file["result"]["label"], "GP_5(3^4)");
    assert_eq!(file["manifest"]["outputs"][0], graph.as_str());

    let cert = path(dir.path(), "cert.json");
    let cache = dir.path().join("cache");
    let args = ["--threads", "1", "search", "transposition", &graph, "--colors", "1,2", "--out", &cert];
    let first = tsc(&args, Some(&cache));
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let v = json(Path::new(&cert));
    assert_eq!(v["result"]["certificate"]["outcome"], "EXHAUSTED");
    assert_eq!(v["result"]["certificate"]["leaf_space"], 4096);
    assert_eq!(v["result"]["cache_hit"], false);
    assert!(v["manifest"]["input_hashes"][&graph].is_string());

    let second = tsc(&args, Some(&cache));
    assert!(second.status.success());
    assert_eq!(json(Path::new(&cert))["result"]["cache_hit"], true);
    assert!(String::from_utf8_lossy(&second.stdout).contains("cached"));
}

#[test]
fn verify_g3_121_with_given_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let graph = path(dir.path(), "g3.json");
    assert!(tsc(&["graph", "g3-121", "--out", &graph], None).status.success());
    let out = path(dir.path(), "v.json");
    let res = tsc(
        &["verify", "tsc", &graph, "--triple", "6,3,1", "--matrix", "1,0;0,-1", "--matrix", "2,1;1,4", "--out", &out],
        None,
    );
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let v = json(Path::new(&out));
    assert_eq!(v["result"]["report"]["verdict"], "TOTALLY_SYMMETRIC");
    assert_eq!(v["result"]["report"]["color_group_order"], 6);
}

#[test]
fn iso_of_paley_and_peisert_on_81_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "pg.json");
    let b = path(dir.path(), "pgs.json");
    assert!(tsc(&["graph", "paley", "--p", "3", "--r", "4", "--out", &a], None).status.success());
    assert!(tsc(&["graph", "peisert", "--p", "3", "--r", "4", "--out", &b], None).status.success());
    let out = tsc(&["iso", &a, &b, "--permute-colors"], None);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["isomorphic"], false);
}

#[test]
fn foulser_and_replay_on_stdout() {
    let out = tsc(&["foulser", "--p", "7", "--r", "4", "--k", "5"], None);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["analysis"]["survivors"][0], serde_json::json!({"d": 5, "e": 0, "s": 4}));

    let out = tsc(&["--threads", "1", "replay", "--case", "3,4,5", "--case", "2,8,5"], None);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["cases"][0]["verdict"], "NOT_TSC");
    assert_eq!(v["result"]["skipped"][0], serde_json::json!([2, 8, 5]));
}

#[test]
fn errors_exit_with_code_2() {
    let out = tsc(&["replay", "--case", "13,2,3"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"label\": ").unwrap();
    let out = tsc(&["search", "cyclic", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));

    let out = tsc(&["field", "--p", "4", "--r", "1"], None);
    assert_eq!(out.status.code(), Some(2));
}
