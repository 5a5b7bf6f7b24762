use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

use adelic::arith::{rat, Place, Prime};
use adelic::binomial::binomial_series;
use adelic::series::{evaluate, Evaluation, Target};
use adelic::EngineConfig;
use adelic_cli::format::parse_padic;

fn adelic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adelic")).args(args).output().expect("spawn")
}

fn document(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn norm_of_25() {
    let out = adelic(&["norm", "-p", "5", "25"]);
    assert!(out.status.success());
    let doc = document(&out);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["payload"], "1/25");
}

#[test]
fn ord_of_50_over_49() {
    let out = adelic(&["ord", "-p", "7", "50/49"]);
    assert_eq!(document(&out)["payload"], "-2");
}

#[test]
fn binomial_sum_example() {
    let out = adelic(&["verify-thm47", "-p", "7", "-N", "2", "-u", "6", "-v", "1", "--prec", "10"]);
    assert!(out.status.success());
    let p = &document(&out)["payload"];
    assert_eq!(p["hensel_agrees"], true);
    assert_eq!(p["relation"], "equals -u/v");
    assert_eq!(p["series_value"], p["hensel_value"]);
    assert_eq!(p["series_value"], "…6 6 6 6 6 6 6 6 6 1 . (base 7) + O(7^10)");
}

#[test]
fn exit_codes() {
    assert_eq!(adelic(&["norm", "-p", "6", "1"]).status.code(), Some(2));
    assert_eq!(adelic(&["points", "-p", "5"]).status.code(), Some(2));
    let out = adelic(&["eval", "--family", "binomial:1/5", "-x", "5", "--place", "5", "--prec", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = document(&out);
    assert_eq!(doc["status"], "error");
    assert_eq!(doc["error"]["kind"], "domain");
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_error_names_the_flag() {
    let out = adelic(&["radius", "--family", "binomial:x", "-p", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = document(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("--family"), "{msg}");
}

#[test]
fn max_depth_variable() {
    let args = ["eval", "--family", "exp", "-x", "5", "--place", "5", "--prec", "30"];
    let ok = adelic(&args);
    assert!(ok.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_adelic"))
        .args(args)
        .env("PADIC_MAX_DEPTH", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(document(&out)["error"]["message"].as_str().unwrap().contains("depth exhausted"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["points", "-p", "7", "--height", "30"][..],
        &["eval", "--family", "binomial:1/2", "-x", "-3/4", "--place", "inf", "--tol", "1/1000000"][..],
        &["verify-sumform", "--gamma", "1", "--delta", "2", "--q", "1/2", "--N", "3", "--x", "1/2", "--place", "inf", "--depth", "10"][..],
    ] {
        let a = adelic(args);
        let b = adelic(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn adele_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.adele");
    let text = "{inf: 1/2, 3: …0 0 0 1 0 . (base 3) + O(3^5), 7: …0 0 1 0 . (base 7) + O(7^4), default: 0}";
    std::fs::write(&path, format!("# small at 3 and 7\n{text}\n")).unwrap();
    let out = adelic(&["adele-check", "--input", path.to_str().unwrap(), "--power", "3", "--idele"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let p = &document(&out)["payload"];
    assert_eq!(p["adele"], text);
    assert_eq!(p["power_check"]["is_idele"], true);
    assert_eq!(p["idele"]["is_idele"], true);
}

#[test]
fn rule_file_family() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alt.rule");
    std::fs::write(&path, "coefficients = 1, -1\ntail = periodic\n").unwrap();
    let out = adelic(&["radius", "--family", path.to_str().unwrap(), "-p", "inf"]);
    assert!(out.status.success());
    assert_eq!(document(&out)["payload"]["kind"], "empirical");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn eval_digits_parse_back(
        p in prop::sample::select(vec![3u64, 5, 7]),
        bn in -9i64..9, bd in 1i64..9,
        xn in -40i64..40, xd in 1i64..40,
        k in 1u32..12,
    ) {
        prop_assume!(bd % p as i64 != 0 && xd % p as i64 != 0 && xn != 0);
        let prime = Prime::new(p).unwrap();
        let x = rat(xn * p as i64, xd);
        let b = rat(bn, bd);
        let fam = format!("binomial:{b}");
        let xs = x.to_string();
        let ps = p.to_string();
        let ks = k.to_string();
        let out = adelic_cli::run(
            ["adelic", "eval", "--family", &fam, "-x", &xs, "--place", &ps, "--prec", &ks],
            None,
        );
        prop_assert_eq!(out.code, 0, "{}", out.stdout);
        let digits = out.result.unwrap().payload["value"].as_str().unwrap().to_string();
        let parsed = parse_padic(prime, &digits).unwrap();
        let direct = evaluate(&binomial_series(b), &x, Place::Finite(prime), &Target::Digits(k), &EngineConfig::default()).unwrap();
        prop_assert_eq!(Evaluation::Padic(parsed), direct);
    }
}
