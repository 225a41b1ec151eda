use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn snb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snb")).args(args).output().expect("run snb")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn eval_golden_values() {
    for (args, want) in [("x1;x2;th", "1"), ("x1;th;x2", "-1"), ("x1;x2;1", "0")] {
        let o = snb(&["eval", "--args", args]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), want, "{{{args}}}");
    }
    let o = snb(&["eval", "--bracket", "even_r12", "--args", "x;th1;th2"]);
    assert_eq!(stdout(&o).trim(), "1");
    let o = snb(&["eval", "--bracket", "antibracket_r11", "--args", "x;xi"]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn eval_field_and_expression() {
    let o = snb(&["eval", "--args", "x1;th", "--field"]);
    assert_eq!(stdout(&o), "X^x1 = 0\nX^x2 = -1\nX^th = 0\n");
    let o = snb(&["eval", "--expr", "th*x1*th", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"], "0");
    assert_eq!(v["parity"], "zero");
    let o = snb(&["eval", "--expr", "x1*th + th"]);
    assert!(stdout(&o).contains("parity: odd"));
}

#[test]
fn input_errors_exit_with_two() {
    let cases: [&[&str]; 5] = [
        &["eval", "--args", "x1;x2"],
        &["eval", "--args", "x1;th;y"],
        &["check", "--space", "x:b", "--suite", "skew"],
        &["dynamics", "--hamiltonians", "x2;th", "--order", "0"],
        &["lie", "--algebra", "nope"],
    ];
    for args in cases {
        let o = snb(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "), "{args:?}");
    }
}

#[test]
fn malformed_documents_are_input_errors() {
    let dir = std::env::temp_dir().join(format!("snb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{bad").unwrap();
    let bad = bad.to_string_lossy().into_owned();
    assert_eq!(snb(&["check", "--bracket", &bad, "--suite", "skew"]).status.code(), Some(2));
    assert_eq!(snb(&["lie", "--algebra", &bad]).status.code(), Some(2));
    assert_eq!(snb(&["lie", "--algebra", &data("so3.json"), "--tau", &bad]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn passing_and_failing_checks_set_the_exit_code() {
    let ok = snb(&["check", "--bracket", "antibracket_r11", "--suite", "all", "--samples", "5"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).lines().skip(1).all(|l| l.starts_with("PASS")));

    let mutated = snb(&["check", "--bracket", &data("odd_r21_mutated.json"), "--suite", "skew", "--samples", "5"]);
    assert_eq!(mutated.status.code(), Some(1));
    assert!(stdout(&mutated).contains("FAIL skew"));
}

#[test]
fn jacobian_fixture_passes_every_suite() {
    let jac = data("jacobian_r31.json");
    for suite in ["all", "bv", "field-commutator"] {
        let o = snb(&["check", "--bracket", &jac, "--suite", suite, "--samples", "3", "--json"]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn check_json_is_deterministic_and_seeded() {
    let run = |seed: &str| snb(&["check", "--suite", "leibniz", "--samples", "3", "--seed", seed, "--json"]).stdout;
    assert_eq!(run("5"), run("5"));
    let v: Value = serde_json::from_slice(&run("5")).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["bracket"], "odd_r21");
}

#[test]
fn dynamics_free_system() {
    let o = snb(&["dynamics", "--hamiltonians", "x2^2/2;th", "--quantities", "x1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("x1(t) = x1 + x2*t\n"));
    assert!(text.contains("x2(t) = x2\n"));
    assert!(text.contains("th(t) = th\n"));
    assert!(text.contains("d/dt (x1) = x2"));

    let o = snb(&["dynamics", "--hamiltonians", "x2^2/2;th", "--order", "3", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["flow"]["x1"], serde_json::json!(["x1", "x2", "0", "0"]));
}

#[test]
fn dynamics_degree_cap_is_an_input_error() {
    let o = snb(&["dynamics", "--hamiltonians", "x1^3 + x2^3;th", "--degree-cap", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lie_with_document_fixtures() {
    let o = snb(&["lie", "--algebra", &data("so3.json"), "--tau", &data("so3_tau_bracket.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS theorem1"));

    let o = snb(&["lie", "--algebra", &data("so3.json"), "--args", "e1;e1;e2"]);
    assert_eq!(stdout(&o).trim(), "-e2");

    let o = snb(&["lie", "--algebra", &data("so3_corrupted.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL validate_algebra"));
}

#[test]
fn lie_reading_flag() {
    assert_eq!(snb(&["lie", "--algebra", "super21"]).status.code(), Some(1));
    assert_eq!(snb(&["lie", "--algebra", "super21", "--reading", "before"]).status.code(), Some(0));
}

#[test]
fn restricted_fi_reports_a_witness() {
    let o = snb(&["check", "--suite", "restricted-fi", "--tail", "th", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.to_string().contains("witness"));
}
