use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ruijsenaars"));
    c.env_remove("RUIJSENAARS_PRECISION");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn strip_times(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_time_ms");
            m.values_mut().for_each(strip_times);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_times),
        _ => {}
    }
}

const THETA: [&str; 8] = ["verify", "--identity", "theta-identity", "--n", "2", "--k", "1", "--seeds"];

#[test]
fn list_identities() {
    let o = run(&["list-identities"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for id in ["theta-identity", "rains", "grry", "qhqp", "qd-commutation", "residue", "phi-lemma"] {
        assert!(s.contains(id), "{id} missing");
    }
}

#[test]
fn passing_suite_writes_a_versioned_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[&THETA[..], &["2", "--out", out.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["summary"]["total"], 2);
    assert_eq!(v["summary"]["passed"], 2);
    let reports = v["runs"][0]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| r["pass"] == true));
    // high-precision numbers are decimal strings with their precision alongside
    assert!(reports[0]["lhs"]["re"].is_string());
    assert_eq!(reports[0]["lhs"]["precision_bits"], 128);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = run(&["verify", "--identity", "rains", "--n", "1", "--k", "1", "--seeds", "2", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        runs.push(read_json(&out));
    }
    let (mut va, mut vb) = (runs[0].clone(), runs[1].clone());
    strip_times(&mut va);
    strip_times(&mut vb);
    assert_eq!(serde_json::to_string(&va).unwrap(), serde_json::to_string(&vb).unwrap());
}

#[test]
fn identity_failure_exits_one() {
    let o = run(&[&THETA[..], &["1", "--threshold", "0"]].concat());
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["failed"], 1);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.toml");
    std::fs::write(&empty, "precision_bits = 128\n").unwrap();
    assert_eq!(code(&run(&["verify", "--config", empty.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&[&THETA[..], &["1", "--tol", "1e-40"]].concat())), 2);
    assert_eq!(code(&run(&["verify", "--identity", "nope"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["verify", "--identity", "phi-lemma", "--lambda", "0,1"])), 2);
    let bad = bin().args(&THETA).arg("1").env("RUIJSENAARS_PRECISION", "lots").output().unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn infrastructure_failure_exits_three() {
    // sixteen points per dimension cannot resolve the n = 2 kernel integral
    let o = run(&["verify", "--identity", "grry", "--n", "2", "--seeds", "1", "--quad", "16"]);
    assert_eq!(code(&o), 3);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["errors"], 1);
    assert!(v["runs"][0]["errors"][0]["message"].as_str().unwrap().contains("converge"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    std::fs::write(
        &cfg,
        "precision_bits = 192\nseeds = [5]\n\n[[identity]]\nid = \"theta-identity\"\nn = 3\nk = 2\n\n[[identity]]\nid = \"rains\"\nn = 1\nk = 1\n",
    )
    .unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["precision_bits"], 192);
    assert_eq!(v["runs"].as_array().unwrap().len(), 2);
    assert_eq!(v["runs"][0]["reports"][0]["seed"], 5);
    assert_eq!(v["runs"][0]["reports"][0]["precision_bits"], 192);
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--prec", "128"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["precision_bits"], 128);
}

#[test]
fn precision_from_environment() {
    let o = bin().args(&THETA).arg("1").env("RUIJSENAARS_PRECISION", "160").output().unwrap();
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["precision_bits"], 160);
}

#[test]
fn eval_commands() {
    let o = run(&["eval", "macdonald", "--lambda", "2,0", "--n", "2"]);
    assert_eq!(stdout(&o).trim(), "m[2,0] + ((1-t)(1+q)/(1-t*q))*m[1,1]");
    let o = run(&["eval", "emacdonald", "--lambda", "0,0", "--n", "2", "--order", "1"]);
    assert!(stdout(&o).contains("p^1: (q*(1-t)^2*(1+t)/(t*(1-q)(1-t*q)))*m[1,-1]"), "{}", stdout(&o));
    let o = run(&["eval", "gamma", "--p", "0.1", "--q", "0.2", "--x", "0.5"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.starts_with("2.31197611095325034225947162820003"), "{s}");
    assert!(s.contains("certified digits: "));
    let o = run(&["eval", "kernel-expand", "--m", "0", "--n", "2", "--order", "1"]);
    assert!(stdout(&o).contains("B[1,-1] = (q*(1-t)^2/(t*(1-q)^2))*p"));
    let o = run(&["eval", "apply", "--op", "ruijsenaars", "--k", "2", "--lambda", "1,0"]);
    assert_eq!(stdout(&o).trim(), "p^0: (q)*m[1,0]");
}

#[test]
fn eval_domain_errors() {
    let o = run(&["eval", "gamma", "--p", "0.1", "--q", "0.2", "--x", "0"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("x = 0"));
    let o = run(&["eval", "theta", "--p", "1.5", "--x", "0.3"]);
    assert_eq!(code(&o), 2);
    let o = run(&["eval", "kernel-expand", "--n", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("envelope"));
}
