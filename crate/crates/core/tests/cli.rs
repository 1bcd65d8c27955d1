use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_markovscope"));
    c.env_remove("MARKOVSCOPE_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn export(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let mut full = vec!["export"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", &p]);
    let o = run(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn check_transpose_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = export(dir.path(), "t.json", &["--model", "transpose"]);
    let o = run(&["check", &f]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("verdict: NO_HERMITIAN_LOG"), "{out}");
    assert!(out.contains("measure: 0\n"));
}

#[test]
fn check_dephasing_json_with_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let f = export(dir.path(), "d.json", &["--model", "dephasing", "--param", "t=1", "--basis", "pauli"]);
    let o = run(&["check", &f, "--json", "--dump-spectrum"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["report"]["verdict"], "MARKOVIAN");
    assert_eq!(v["report"]["measure"], 1.0);
    assert!(v["spectrum"].is_object());
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, "{ not json").unwrap();
    assert_eq!(run(&["check", f.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["check", "/nonexistent/file.json"]).status.code(), Some(1));
}

#[test]
fn non_channel_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("nc.json");
    // not trace preserving
    std::fs::write(
        &f,
        r#"{"dimension": 2, "representation": "transfer", "basis": "pauli",
            "data": [[0.5,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#,
    )
    .unwrap();
    assert_eq!(run(&["measure", f.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn measure_identity_and_transpose() {
    let o = run(&["measure", "--model", "identity"]);
    assert_eq!(stdout(&o), "measure: 1\nmu_min: 0\n");
    let o = run(&["measure", "--model", "transpose"]);
    assert!(stdout(&o).starts_with("measure: 0\n"));
}

#[test]
fn tdcheck_outputs() {
    let o = run(&["tdcheck", "--model", "rabi", "--param", "theta=0.3"]);
    assert!(stdout(&o).starts_with("td_markovian: true"));
    let o = run(&["tdcheck", "--model", "transpose", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["td_markovian"], false);
    assert!((v["det"].as_f64().unwrap() + 1.0 / 27.0).abs() < 1e-12);
    let o = run(&["tdcheck", "--model", "random", "--param", "d=3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("qubit"));
}

#[test]
fn scan_figure2a_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = run(&[
        "scan", "--model", "figure2a", "--sweep", "p", "--start", "0", "--stop", "1", "--step", "0.01", "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,markovian,mu_min,measure,td_markovian,det");
    assert_eq!(lines.len(), 102);
    let measure = |l: &str| l.split(',').nth(3).unwrap().parse::<f64>().unwrap();
    assert_eq!(measure(lines[1]), 1.0);
    assert_eq!(measure(lines[101]), 1.0);
    // thread count does not change the output
    let again = run(&["scan", "--model", "figure2a", "--sweep", "p", "--start", "0", "--stop", "1", "--step", "0.01", "--threads", "3"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn scan_single_point() {
    let o = run(&["scan", "--model", "jc", "--sweep", "t", "--start", "2", "--stop", "2", "--step", "0.1"]);
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn sample_summary() {
    let o = run(&["sample", "--d", "2", "--n", "1", "--seed", "5"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let m = v["fraction_markovian"].as_f64().unwrap();
    let td = v["fraction_td_markovian"].as_f64().unwrap();
    assert!(m == 0.0 || m == 1.0);
    assert!(td == 0.0 || td == 1.0);
    assert!(m <= td);
}

#[test]
fn power_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = export(dir.path(), "d1.json", &["--model", "dephasing", "--param", "t=1"]);
    let out = dir.path().join("p.json");
    let o = run(&["power", &f, "--s", "2", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    let two = markovscope::io::read_channel::<f64>(&out).unwrap();
    let expect = markovscope::zoo::dephasing_channel(2.0).unwrap();
    let expect = markovscope::channel::change_basis(&expect, two.basis()).unwrap();
    assert!(markovscope::linalg::max_abs(&(two.entries() - expect.entries())) < 1e-12);
    assert!(markovscope::channel::verify_channel(&two, 1e-9).is_channel());

    let one = dir.path().join("one.json");
    run(&["power", &f, "--s", "1", "--output", one.to_str().unwrap()]);
    let a = markovscope::io::read_channel::<f64>(&one).unwrap();
    let b = markovscope::io::read_channel::<f64>(Path::new(&f)).unwrap();
    assert!(markovscope::linalg::max_abs(&(a.entries() - b.entries())) < 1e-7);

    let t = export(dir.path(), "t.json", &["--model", "transpose"]);
    assert_eq!(run(&["power", &t, "--s", "0.5"]).status.code(), Some(2));
}

#[test]
fn kraus_and_choi_exports_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    for rep in ["kraus", "choi"] {
        let f = export(dir.path(), &format!("{rep}.json"), &["--model", "figure2a", "--param", "p=0.4", "--representation", rep]);
        let o = run(&["measure", &f, "--json"]);
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert!(v["measure"].as_f64().unwrap() < 1.0);
    }
}

#[test]
fn tolerance_env_override_is_read() {
    let o = bin().env("MARKOVSCOPE_TOL", "1e-6").args(["measure", "--model", "identity"]).output().unwrap();
    assert!(o.status.success());
}
