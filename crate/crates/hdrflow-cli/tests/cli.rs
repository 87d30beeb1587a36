use std::path::PathBuf;
use std::process::{Command, Output};

use hdrflow::cartier::weight_transition;
use serde_json::Value;

fn instance(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hdrflow-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdrflow")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn data_lines(s: &str) -> Vec<&str> {
    s.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn table1_rows_for_n2() {
    let v = json(&run(&["table1", "list", "--N", "2"]));
    let combos: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["fiber_combination"].as_str().unwrap()).collect();
    assert_eq!(combos, ["I_1I_1I_1I_3^*", "I_1I_1I_2I_2^*", "I_0^*I_4I_1I_1", "I_0^*I_2I_2I_2"]);
    let all = json(&run(&["table1", "list"]));
    assert_eq!(all["rows"].as_array().unwrap().len(), 20);
}

#[test]
fn selfmap_on_single_point_component() {
    let path = instance("single.json", r#"{"p": 11, "N": 5, "d": 3, "lambda": "4", "theta": ["1"]}"#);
    let v = json(&run(&["selfmap", path.to_str().unwrap()]));
    let d = v["image"]["component"][1].as_u64().unwrap() as u32;
    let wt = weight_transition(5, 3, 11).unwrap();
    assert_eq!(d.min(5 - d), wt.d_prime);
    assert_eq!(v["weights"], serde_json::json!([wt.pair.0.to_string(), wt.pair.1.to_string()]));
    assert!(v["checks"].as_object().unwrap().values().all(|x| x == true));
}

#[test]
fn scan_over_f49_examines_every_point() {
    let path = instance("n2.json", r#"{"p": 7, "N": 2, "d": 1, "lambda": "3"}"#);
    let v = json(&run(&["scan", path.to_str().unwrap(), "--ext", "2", "--format", "json"]));
    assert_eq!(v["examined"], 50);
    let csv = stdout(&run(&["scan", path.to_str().unwrap(), "--ext", "2"]));
    let lines = data_lines(&csv);
    assert_eq!(lines[0], "point,field_degree,period");
    assert_eq!(lines.len() - 1, v["periodic"].as_u64().unwrap() as usize);
}

#[test]
fn empty_scan_is_header_only() {
    let path = instance("leaving.json", r#"{"p": 7, "N": 5, "d": 1, "lambda": "3"}"#);
    let o = run(&["scan", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(data_lines(&stdout(&o)), ["point,field_degree,period"]);
}

#[test]
fn fixed_point_orbit_has_one_row() {
    let path = instance("fixed.json", r#"{"p": 7, "N": 2, "d": 1, "lambda": "3", "theta": ["2", "1"]}"#);
    let o = run(&["orbit", path.to_str().unwrap(), "--format", "csv"]);
    let s = stdout(&o);
    assert!(s.contains("# preperiod=0 period=1"));
    assert_eq!(data_lines(&s).len(), 2);
}

#[test]
fn outputs_are_byte_identical() {
    let path = instance("repeat.json", r#"{"p": 11, "N": 5, "d": 1, "lambda": "4", "theta": ["3", "1"], "seed": 9}"#);
    for args in [vec!["cartier", "--verify"], vec!["orbit"], vec!["scan", "--ext", "2", "--format", "json"]] {
        let mut a = args.clone();
        a.insert(1, path.to_str().unwrap());
        assert_eq!(run(&a).stdout, run(&a).stdout);
    }
}

#[test]
fn cartier_verification_block() {
    let path = instance("verify.json", r#"{"p": 7, "N": 1, "d": 1, "lambda": "3", "theta": ["1"]}"#);
    let v = json(&run(&["cartier", path.to_str().unwrap(), "--verify", "--transport"]));
    for key in ["log_valid", "p_curvature", "cocycle", "compatibility"] {
        assert_eq!(v["verification"][key], true, "{key}");
    }
    let degs: Vec<i64> = v["output"]["degrees"].as_array().unwrap().iter().map(|d| d.as_str().unwrap().parse().unwrap()).collect();
    assert_eq!(degs.iter().sum::<i64>(), 0);
    assert!(degs[0] < 7);
}

#[test]
fn usage_errors_exit_2_with_diagnostics() {
    let typo = instance("typo.json", r#"{"p": 7, "N": 2, "d": 1, "lamda": "3"}"#);
    let o = run(&["selfmap", typo.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["exit_code"], 2);
    let small = instance("small.json", r#"{"p": 3, "N": 2, "d": 1, "lambda": "2", "theta": ["1", "1"]}"#);
    assert_eq!(run(&["cartier", small.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn torsion_check_csv() {
    let s = stdout(&run(&["oracle", "torsion-check", "--p", "7", "--lambda", "3", "--n-max", "4", "--ext", "2"]));
    assert!(s.contains("curve=ordinary") || s.contains("curve=supersingular"));
    let lines = data_lines(&s);
    assert_eq!(lines[0], "z,order,period,preperiod,notes");
    assert!(lines[1..].iter().any(|l| l.starts_with("0,2,")));
}

#[test]
fn check_suite_passes() {
    let v = json(&run(&["check", "--suite", "algebra", "--seed", "3"]));
    assert_eq!(v["passed"], true);
}
