use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn lgn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

#[test]
fn eval_of_the_puncture_loop_is_its_quantum_trace() {
    let o = lgn(&["eval", data("m1_loop.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-q^2 * M1[-,-] - q^-2 * M1[+,+]");
}

#[test]
fn eval_of_the_unknot_is_the_loop_value() {
    let o = lgn(&["eval", data("unknot.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-q^2 - q^-2");
}

#[test]
fn eval_with_states_gives_the_stated_value() {
    let f = data("m1_arc.json");
    let plain = lgn(&["eval", f.to_str().unwrap()]);
    let stated = lgn(&["eval", f.to_str().unwrap(), "--states", "++"]);
    assert_eq!(stdout(&plain).trim(), "-q^{5/2} * M1[-,-]");
    assert_eq!(stdout(&stated).trim(), "-q^{5/2} * M1[+,-]");
    let bad = lgn(&["eval", f.to_str().unwrap(), "--states", "+"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn malformed_diagram_exits_two_and_names_the_slice() {
    let o = lgn(&["eval", data("malformed.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("slice 0"));
    let missing = lgn(&["eval", data("no_such_file.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn mul_by_one_is_the_identity_and_mismatches_are_rejected() {
    let x = data("x.txt");
    let o = lgn(&["mul", data("one.txt").to_str().unwrap(), x.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let direct = lgn(&["mul", x.to_str().unwrap(), data("one.txt").to_str().unwrap()]);
    assert_eq!(stdout(&o), stdout(&direct));
    assert_eq!(stdout(&o).trim(), "-q^2 * M1[+,+] + M1[-,+] M1[+,-]");
    let bad = lgn(&[
        "mul",
        data("torus_a.json").to_str().unwrap(),
        data("disk_m.json").to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn relations_suite_on_the_torus() {
    let o = lgn(&["verify", "relations", "--g", "1", "--n", "0", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["suite"], "relations");
    assert_eq!(v["cases"], 50);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn iso_suite_on_the_disk() {
    let v = json(&lgn(&["verify", "iso", "--g", "0", "--n", "1", "--json"]));
    assert_eq!(v["cases"], 4);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    // the entry-by-entry table is off by a global sign
    let lit = lgn(&["verify", "iso", "--g", "0", "--n", "1", "--table", "literal", "--json"]);
    assert_eq!(lit.status.code(), Some(1));
    assert_eq!(json(&lit)["failures"].as_array().unwrap().len(), 4);
}

#[test]
fn torus_suite_reports_factor_dimensions() {
    let o = lgn(&["verify", "torus", "--p", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["details"]["factor_dims"], serde_json::json!([3, 1, 1]));
    let r = json(&lgn(&["torus", "--p", "3", "--json"]));
    assert_eq!(r["factor_dims"], serde_json::json!([4, 2, 2]));
    assert_eq!(r["composition_series"], true);
}

#[test]
fn randomized_suites_pass_and_are_deterministic() {
    for args in [
        &["verify", "isotopy", "--g", "1", "--n", "0", "--cases", "8", "--json"][..],
        &["verify", "stack", "--g", "1", "--n", "1", "--cases", "6", "--json"][..],
        &["verify", "vacuum", "--g", "1", "--cases", "4", "--json"][..],
    ] {
        let a = lgn(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stdout(&a));
        assert_eq!(stdout(&a), stdout(&lgn(args)), "{args:?}");
    }
}

#[test]
fn basis_enumeration_and_budget() {
    let v = json(&lgn(&["basis", "--g", "0", "--n", "1", "--p", "3", "--json"]));
    assert_eq!(v["count"], 54);
    assert_eq!(v["basis"][0], "1");
    let o = lgn(&["basis", "--g", "1", "--n", "1", "--p", "3", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lgn(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(lgn(&["verify", "vacuum", "--g", "0"]).status.code(), Some(2));
    assert_eq!(
        lgn(&["verify", "relations", "--g", "0", "--n", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(lgn(&["basis", "--p", "1"]).status.code(), Some(2));
}
