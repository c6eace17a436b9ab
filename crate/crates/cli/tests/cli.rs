use std::process::{Command, Output};

use serde_json::Value;

fn av1324(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_av1324"))
        .args(args)
        .env_remove("AV1324_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = av1324(&all);
    (serde_json::from_slice(&o.stdout).expect("valid JSON"), o.status.code().unwrap())
}

fn check_names(doc: &Value) -> Vec<String> {
    doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn count_rows() {
    let o = av1324(&["count", "--pattern", "1324", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "n=4: 23"));

    let o = av1324(&["count", "--pattern", "132", "--n", "5", "--format", "csv"]);
    assert!(stdout(&o).lines().any(|l| l == "5,42"));

    let o = av1324(&["count", "--pattern", "1324", "--n", "0"]);
    assert_eq!(stdout(&o).trim(), "n=0: 1");
}

#[test]
fn count_json_lists_every_row() {
    let (doc, code) = json(&["count", "--n", "6"]);
    assert_eq!(code, 0);
    let rows = doc["outputs"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[6]["count"], 513);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["count", "--pattern", "13a4", "--n", "3"][..],
        &["count", "--pattern", "1324", "--n", "12"],
        &["count", "--pattern", "1134", "--n", "3"],
        &["encode", "3312"],
        &["encode", "banana"],
        &["verify", "--suite", "everything"],
        &["verify", "--n", "11"],
        &["pairs", "--n", "40"],
        &["segments", "ABX"],
        &["--threads", "0", "expand"],
        &["frobnicate"],
    ] {
        let o = av1324(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn count_cap_can_be_raised() {
    let o = av1324(&["count", "--pattern", "123", "--n", "12", "--cap", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n=12: 208012"));
}

#[test]
fn encode_examples() {
    let o = av1324(&["encode", "3612745", "--mode", "plain"]);
    assert!(stdout(&o).starts_with("w=ABABBCD z=ABACDBB"));
    let o = av1324(&["encode", "3612745", "--mode", "rule4prime"]);
    assert!(stdout(&o).starts_with("w=ABABDCD z=ABACDBD"));
    let o = av1324(&["encode", "1"]);
    assert_eq!(stdout(&o).trim(), "w=A z=A colors=R");
}

#[test]
fn encode_defaults_to_rule4prime() {
    let (doc, _) = json(&["encode", "3612745"]);
    assert_eq!(doc["inputs"]["mode"], "rule4prime");
    assert_eq!(doc["outputs"]["w"], "ABABDCD");
    assert_eq!(doc["outputs"]["overrides"][0]["position"], 5);
}

#[test]
fn json_is_deterministic_with_sorted_keys() {
    let a = stdout(&av1324(&["encode", "3612745", "--format", "json"]));
    let b = stdout(&av1324(&["encode", "3612745", "--format", "json"]));
    assert_eq!(a, b);
    let top: Vec<usize> = ["\"checks\"", "\"command\"", "\"inputs\"", "\"outputs\"", "\"timings\"", "\"version\""]
        .iter()
        .map(|k| a.find(k).unwrap())
        .collect();
    assert!(top.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn json_floats_have_at_most_ten_significant_digits() {
    let (doc, _) = json(&["roots", "--gf", "h"]);
    let mut floats = Vec::new();
    collect_floats(&doc, &mut floats);
    assert!(!floats.is_empty());
    for x in floats {
        let digits: String = format!("{x:e}").split('e').next().unwrap().replace(['.', '-'], "");
        assert!(digits.len() <= 10, "{x}");
    }
    let alpha = doc["outputs"]["growth_bound"]["alpha"]["value"].as_f64().unwrap();
    assert_eq!(alpha, 0.2695867676);
}

fn collect_floats(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Number(n) if n.is_f64() => out.push(n.as_f64().unwrap()),
        Value::Array(a) => a.iter().for_each(|x| collect_floats(x, out)),
        Value::Object(o) => o.values().for_each(|x| collect_floats(x, out)),
        _ => {}
    }
}

#[test]
fn verify_lemmas_reports_avoider_count() {
    let o = av1324(&["verify", "--suite", "lemmas", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("PASS  lemma.cab: 15793 avoiders checked at n=8"), "{out}");
    assert!(out.contains("PASS  lemma.cab_k: 15793 avoiders checked at n=8"), "{out}");
}

#[test]
fn verify_gf_and_roots_pass() {
    let (doc, code) = json(&["verify", "--suite", "gf", "--cap-pairs", "12"]);
    assert_eq!(code, 0, "{doc:#}");
    let names = check_names(&doc);
    for n in ["gf.h.matches_pairs", "gf.k.matches_pairs", "gf.t.matches_pairs", "gf.h.functional_equation"] {
        assert!(names.iter().any(|x| x == n), "{n} missing");
    }

    let (doc, code) = json(&["verify", "--suite", "roots"]);
    assert_eq!(code, 0, "{doc:#}");
    let names = check_names(&doc);
    for n in ["roots.h.bound", "roots.k.bound", "roots.t.bound", "roots.baseline.bound"] {
        assert!(names.iter().any(|x| x == n), "{n} missing");
    }
    assert!(doc["timings"]["suite.roots"].is_number());
}

#[test]
fn check_names_are_stable_across_runs_and_thread_counts() {
    let a = json(&["verify", "--suite", "all", "--n", "6", "--cap-pairs", "10", "--threads", "1"]).0;
    let b = json(&["verify", "--suite", "all", "--n", "6", "--cap-pairs", "10"]).0;
    assert_eq!(check_names(&a), check_names(&b));
    assert_eq!(a["checks"], b["checks"]);
    assert_eq!(a["outputs"], b["outputs"]);
}

#[test]
fn failed_assertion_exits_1() {
    let o = av1324(&["verify", "--suite", "roots", "--tol-alpha", "0.01"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL  roots.h.bound"));
}

#[test]
fn reproduce_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = av1324(&["reproduce", "--n", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("H ") && l.contains("13.7595074")));
    assert!(out.lines().any(|l| l.starts_with("baseline ") && l.contains("13.92820323")));

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "reproduce");
    let row = &doc["outputs"]["chain"][4];
    assert_eq!(row["n"], 5);
    assert_eq!(row["s"], 103);
    assert!(row["s"].as_u64() <= row["t"].as_u64());
    assert!(check_names(&doc).contains(&"reproduce.chain".to_string()));
}

#[test]
fn thread_count_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_av1324"))
        .args(["pairs", "--n", "8"])
        .env("AV1324_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_av1324"))
        .args(["pairs", "--n", "8"])
        .env("AV1324_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_av1324"))
        .args(["pairs", "--n", "8", "--threads", "1"])
        .env("AV1324_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "flag overrides the environment");
}

#[test]
fn word_operations() {
    let o = av1324(&["segments", "ABACDAB"]);
    assert_eq!(stdout(&o).trim(), "AB | ACD | AB");
    let o = av1324(&["check-pair", "ACAB", "AA", "--constraints", "iv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rejected"));
    let o = av1324(&["pairs", "--n", "4", "--constraints", "iv"]);
    assert_eq!(stdout(&o).trim(), "n=4 constraints={iv}: 26");
    let o = av1324(&["expand", "--gf", "h", "--n", "4", "--format", "csv"]);
    assert_eq!(stdout(&o).trim(), "n,h\n0,0\n1,0\n2,1\n3,6\n4,26");
}

#[test]
fn audit_reports_clean_permutation() {
    let o = av1324(&["audit", "4132"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS  encoder.audit"));
}
