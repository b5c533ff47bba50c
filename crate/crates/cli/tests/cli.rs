use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gcl").chain(args.iter().copied());
    let code = gcl_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json_lines(out: &str) -> Vec<Value> {
    out.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn seq_named_d() {
    let (code, out, err) = run(&["seq", "--spec", "named:D", "--count", "5"]);
    assert_eq!(code, 0);
    let values: Vec<String> = json_lines(&out).iter().map(|r| r["value"].as_str().unwrap().to_string()).collect();
    assert_eq!(values, ["1", "3", "19", "147", "1251"]);
    assert_eq!(err.trim(), "summary: total=5 pass=5 fail=0 skipped=0");
}

#[test]
fn seq_both_methods_and_bare_recurrences() {
    let (code, out, _) = run(&["seq", "--spec", "named:s18", "--count", "12", "--method", "both"]);
    assert_eq!(code, 0);
    assert_eq!(json_lines(&out).len(), 12);
    let (code, out, _) = run(&["seq", "--spec", "zagier:2,0,1", "--count", "3"]);
    assert_eq!(code, 0);
    let recs = json_lines(&out);
    assert_eq!(recs[2]["value"], "5/4");
    assert_eq!(recs[2]["integral"], false);
    let (code, _, err) = run(&["seq", "--spec", "apery3", "--method", "formula"]);
    assert_eq!(code, 2);
    assert!(err.contains("no closed form"));
}

#[test]
fn theorem1_hand_checked_case() {
    let (code, out, _) = run(&["verify-theorem1", "--p", "5", "--n", "1", "--m", "1", "--rst", "2,2,0", "--format", "json"]);
    assert_eq!(code, 0);
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert_eq!(r["pass"], true);
    assert!(r["achieved_exponent"].as_i64().unwrap() >= 4);
    assert_eq!(r["difference"], "819000");
    assert_eq!(r["correction"], "-14/3");
    assert_eq!(r["modulus"], "5^4");
    assert_eq!(r["bernoulli_provenance"], "exact");
}

#[test]
fn gauss_records_carry_parameters() {
    let (code, out, _) = run(&["verify-gauss", "--p", "5,7", "--n", "1", "--m", "1..2", "--rst", "2,1,0", "--rst", "4,0,0"]);
    assert_eq!(code, 0);
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 8);
    assert_eq!((recs[0]["r"].as_u64(), recs[0]["p"].as_u64(), recs[0]["m"].as_u64()), (Some(2), Some(5), Some(1)));
    assert_eq!(recs[1]["m"], 2);
    assert_eq!(recs[4]["r"], 4);
    assert_eq!(recs[0]["achieved_exponent"], 4);
}

#[test]
fn lemma_b7_sweep() {
    let (code, out, _) = run(&["verify-lemma", "--id", "b7", "--p", "5,7", "--m", "1,2", "--n", "0,1,2"]);
    assert_eq!(code, 0);
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 12);
    assert!(recs.iter().all(|r| r["pass"] == true && r["lemma"] == "b7"));
    assert_eq!(recs[0]["params"]["p"], 5);
}

#[test]
fn failing_points_set_exit_code_one() {
    let (code, out, err) = run(&["verify-lemma", "--id", "b14", "--p", "7", "--l", "0", "--n", "0"]);
    assert_eq!(code, 1);
    assert_eq!(json_lines(&out)[0]["status"], "fail");
    assert!(err.contains("fail=1"));
}

#[test]
fn degenerate_granville_points_are_skipped() {
    let (code, out, err) = run(&["verify-lemma", "--id", "b1", "--p", "5", "--n", "3", "--k", "1..3", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().last().unwrap().contains("skipped"));
    assert!(err.contains("skipped=1"));
}

#[test]
fn consistency_records() {
    let (code, out, _) = run(&["consistency", "--n", "1", "--rst", "2,2,0", "--p", "5,7,11,13", "--m", "1,2"]);
    assert_eq!(code, 0);
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 8);
    assert!(recs.iter().all(|r| r["outcome"] == "agree"));
    assert_eq!(recs[0]["expected"], "2");
}

#[test]
fn search_records_are_evidence_only() {
    let (code, out, _) = run(&["search", "--family", "cooper", "--range", "a=13", "--range", "b=4", "--range", "c=-27", "--range", "d=3"]);
    assert_eq!(code, 0);
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["classification"], "known:s7");
    assert_eq!(recs[0]["evidence_only"], true);
    assert_eq!(recs[0]["first_terms"][1], "4");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify-gauss", "--p", "9"][..],
        &["verify-gauss", "--p", "3"],
        &["verify-theorem1", "--rst", "1,0,0"],
        &["verify-gauss", "--p", "13", "--n", "2", "--m", "2", "--max-index", "100"],
        &["search", "--family", "cooper", "--budget", "10"],
        &["search", "--family", "zagier", "--range", "q=1..2"],
        &["verify-lemma", "--id", "b3"],
        &["seq", "--spec", "named:D", "--workers", "0"],
        &["bogus"],
    ] {
        let (code, out, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    let args = ["verify-theorem1", "--p", "5,7,11", "--n", "1,2", "--m", "1", "--format", "csv"];
    let (_, one, _) = run(&[&args[..], &["--workers", "1"]].concat());
    let (_, four, _) = run(&[&args[..], &["--workers", "4"]].concat());
    assert_eq!(one, four);
}

#[test]
fn binary_honours_environment() {
    let bin = env!("CARGO_BIN_EXE_gcl");
    let out = Command::new(bin)
        .args(["verify-gauss", "--p", "13", "--n", "2", "--m", "2", "--rst", "2,0,0"])
        .env("GCL_MAX_INDEX", "100")
        .env("GCL_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the index cap 100"));
    let out = Command::new(bin).args(["seq", "--spec", "named:A", "--count", "3", "--format", "text"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);
}
