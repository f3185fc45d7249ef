use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dnkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnkit")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dnkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn example(lambda: i64) -> String {
    // a_00 = a_22 = λ, a_01 = a_12 = −3λ²/2, a_02 = −λ³, a_11 = −2λ
    let l = lambda;
    format!(
        r#"{{"n":2,"entries":{{"0,0":"{a}","2,2":"{a}","0,1":"{b}/2","1,2":"{b}/2","0,2":"{c}","1,1":"{d}"}}}}"#,
        a = l,
        b = -3 * l * l,
        c = -l * l * l,
        d = -2 * l
    )
}

#[test]
fn construct_reproduces_the_worked_example() {
    let input = scratch("example.json", &example(1));
    let out = dnkit(&["construct", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["operator_text"], "t^3·∂^2 + 3·t^2·∂ + t - 1");
    assert_eq!(r["result"]["symmetry"], true);
    assert_eq!(r["result"]["adjoint"], true);
    assert_eq!(r["tool"], "dnkit");
    assert_eq!(r["config"]["seed"], 0);
}

#[test]
fn order_zero_and_asymmetric_inputs() {
    let zero = scratch("zero.json", r#"{"n":0,"entries":{"0,0":"5"}}"#);
    let r = report(&dnkit(&["construct", zero.to_str().unwrap()]));
    assert_eq!(r["result"]["operator_text"], "t - 5");

    let skew = scratch("skew.json", r#"{"n":1,"entries":{"0,0":"1","0,1":"2","1,1":"3"}}"#);
    let r = report(&dnkit(&["construct", skew.to_str().unwrap()]));
    assert_eq!(r["result"]["symmetry"], false);
    assert_eq!(r["result"]["adjoint"], false);
}

#[test]
fn construct_and_reconstruct_round_trip() {
    for (name, text) in [
        ("rt-example.json", example(2)),
        ("rt-zero.json", r#"{"n":0,"entries":{"0,0":"-1/3"}}"#.to_string()),
        ("rt-general.json", r#"{"n":2,"entries":{"0,0":"1","0,1":"2","0,2":"3/4","1,1":"-1","1,2":"5","2,2":"7"}}"#.to_string()),
    ] {
        let input = scratch(name, &text);
        let built = scratch(&format!("built-{name}"), "");
        let out = dnkit(&["construct", input.to_str().unwrap(), "--out", built.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let back = dnkit(&["reconstruct", built.to_str().unwrap()]);
        assert_eq!(back.status.code(), Some(0), "{}", String::from_utf8_lossy(&back.stderr));
        let original: Value = serde_json::from_str(&std::fs::read_to_string(&built).unwrap()).unwrap();
        assert_eq!(report(&back)["result"]["matrix"], original["result"]["matrix"], "{name}");
    }
}

#[test]
fn bare_operator_files_are_accepted() {
    let op = scratch("op.json", r#"{"terms":[{"y":1,"x":0,"re":"1"},{"y":0,"x":0,"re":"-2"}]}"#);
    let r = report(&dnkit(&["reconstruct", op.to_str().unwrap()]));
    assert_eq!(r["result"]["matrix"]["entries"]["0,0"], "2");
}

#[test]
fn input_errors_exit_with_two() {
    let missing = dnkit(&["construct", "/nonexistent/matrix.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad = scratch("bad.json", r#"{"n":1,"entries":{"1,0":"1"}}"#);
    assert_eq!(dnkit(&["construct", bad.to_str().unwrap()]).status.code(), Some(2));
    let garbage = scratch("garbage.json", "not json");
    assert_eq!(dnkit(&["analyze", garbage.to_str().unwrap()]).status.code(), Some(2));
    let ok = scratch("ok.json", &example(1));
    assert_eq!(dnkit(&["construct", ok.to_str().unwrap(), "--n", "3"]).status.code(), Some(2));
    assert_eq!(dnkit(&["construct", ok.to_str().unwrap(), "--tol-mono=0"]).status.code(), Some(2));
}

#[test]
fn degenerate_spectrum_is_a_field_in_analysis_and_fatal_in_monodromy() {
    let input = scratch("degenerate.json", &example(1));
    let out = dnkit(&["analyze", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["spectrum"]["status"], "error");
    assert_eq!(r["result"]["fuchs"]["value"]["finite"][0]["regular"], false);
    assert_eq!(dnkit(&["monodromy", input.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn analysis_of_the_order_one_example() {
    let input = scratch("n1.json", r#"{"n":1,"entries":{"0,1":"1"}}"#);
    let r = report(&dnkit(&["analyze", input.to_str().unwrap()]));
    for t in r["result"]["spectrum"]["value"]["structure"]["traces"].as_array().unwrap() {
        assert!((t[0].as_f64().unwrap() + 0.5).abs() < 1e-9);
    }
    assert_eq!(r["result"]["residues"]["value"]["infinity_residue"], "-1");
}

#[test]
fn monodromy_of_the_order_one_example() {
    let input = scratch("m1.json", r#"{"n":1,"entries":{"0,1":"1"}}"#);
    let out = dnkit(&["monodromy", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["verdict"]["passed"], true);
    let loops = r["result"]["report"]["loops"].as_array().unwrap();
    let reduced: Vec<f64> = loops.iter().map(|l| l["reduced"][0][0][0].as_f64().unwrap()).collect();
    assert_eq!(reduced.len(), 3);
    assert!((reduced[0] + 1.0).abs() < 1e-9 && (reduced[1] + 1.0).abs() < 1e-9 && (reduced[2] - 1.0).abs() < 1e-9);
    assert_eq!(r["result"]["report"]["polarization"]["symmetry"], "symmetric");
}

#[test]
fn order_two_polarization_is_skew() {
    let input = scratch("m2.json", r#"{"n":2,"entries":{"0,0":"1","0,1":"2","0,2":"-1","1,1":"3","1,2":"2","2,2":"1"}}"#);
    let r = report(&dnkit(&["monodromy", input.to_str().unwrap()]));
    assert_eq!(r["result"]["report"]["polarization"]["symmetry"], "skew");
    assert_eq!(r["result"]["report"]["polarization"]["dimension"], 1);
}

const SMALL: [&str; 6] = ["--sizes", "1,2", "--cases", "2", "--monodromy-cases", "1"];

#[test]
fn verify_is_reproducible_for_a_seed() {
    let run = |seed: &str| {
        let mut args = vec!["verify", "--seed", seed];
        args.extend(SMALL);
        dnkit(&args)
    };
    let (a, b) = (run("11"), run("11"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(report(&a)["config"]["seed"], 11);
}

#[test]
fn corrupted_symmetry_fails_only_the_symmetry_suite() {
    let mut args = vec!["verify", "--corrupt-symmetry"];
    args.extend(SMALL);
    let out = dnkit(&args);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    for s in r["result"]["suites"].as_array().unwrap() {
        let failed = s["failures"].as_u64().unwrap() > 0;
        assert_eq!(failed, s["name"] == "symmetry_adjoint", "{}", s["name"]);
    }
}
