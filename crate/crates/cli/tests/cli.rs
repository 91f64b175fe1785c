use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fshadow(out_dir: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fshadow"));
    cmd.args(args);
    match out_dir {
        Some(dir) => cmd.env("FSHADOW_OUT_DIR", dir),
        None => cmd.env_remove("FSHADOW_OUT_DIR"),
    };
    cmd.output().expect("binary runs")
}

fn sh(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

fn json_ok(args: &[&str]) -> Value {
    let out = fshadow(None, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> (i32, Value) {
    let out = fshadow(None, args);
    let code = out.status.code().unwrap();
    let err = serde_json::from_slice(&out.stderr).unwrap_or(Value::Null);
    (code, err)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn envelope_carries_provenance() {
    let v = json_ok(&["povm", "--builtin", "mub", "--dim", "5", "--seed", "17"]);
    assert_eq!(v["tool"], "fshadow");
    assert_eq!(v["command"], "povm");
    assert_eq!(v["seed"], 17);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["povm"]["source"]["builtin"], "mub");
    assert_eq!(v["povm_hash"].as_str().unwrap().len(), 64);
    let r = &v["result"];
    assert_eq!(r["document"]["elements"].as_array().unwrap().len(), 30);
    assert_eq!(r["tightness"]["tight"], true);
    assert_eq!(r["informationally_complete"], true);
    assert_eq!(r["design2"]["passed"], true);
    assert_eq!(r["design3"]["passed"], false);
}

#[test]
fn appendix_h3_report() {
    let v = json_ok(&sh("analyze --builtin appendix-h3 --state pure:0 --observable pauli:Z"));
    let r = &v["result"];
    assert!((f(&r["exact"]) - 8.0).abs() < 1e-9);
    let values: Vec<f64> = r["estimator_values"].as_array().unwrap().iter().map(f).collect();
    for (a, b) in values.iter().zip([5.0, -1.0, -1.0, -1.0]) {
        assert!((a - b).abs() < 1e-9);
    }
    let v = json_ok(&sh(
        "analyze --builtin appendix-h3 --state pure:1 --observable pauli:X --show-dual",
    ));
    let r = &v["result"];
    assert!((f(&r["exact"]) - 5.0).abs() < 1e-9);
    assert!((f(&r["bounds"]["a_min"]) - 1.0).abs() < 1e-9);
    assert!((f(&r["bounds"]["a_max"]) - 9.0).abs() < 1e-9);
    assert_eq!(r["dual_elements"].as_array().unwrap().len(), 4);
}

#[test]
fn mub3_averaged_variance_for_normalized_observable() {
    let v = json_ok(&sh("analyze --builtin mub --dim 3 --purity 1 --seed 8"));
    assert!((f(&v["result"]["averaged"]) - 1.25).abs() < 1e-9);
}

#[test]
fn povm_output_round_trips_into_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = fshadow(
        Some(dir.path()),
        &sh("povm --builtin random --dim 2 --outcomes 6 --seed 4"),
    );
    assert!(out.status.success());
    let file = dir.path().join("povm.json");
    let env: Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    let path = file.to_str().unwrap();

    let a = json_ok(&["analyze", "--json", path, "--observable", "pauli:Y", "--state", "mixed"]);
    assert_eq!(a["povm_hash"], env["povm_hash"]);
    let s = json_ok(&["simulate", "--json", path, "--observable", "pauli:Y", "-n", "100"]);
    assert_eq!(s["povm_hash"], env["povm_hash"]);

    // A bare document works too.
    let bare = dir.path().join("bare.json");
    fs::write(&bare, env["result"]["document"].to_string()).unwrap();
    let mut cmd = sh("analyze --observable pauli:Y --state mixed --json");
    cmd.push(bare.to_str().unwrap());
    let b = json_ok(&cmd);
    assert_eq!(b["result"], a["result"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"dim":2,"elements":[[[[1.5,0],[0,0]],[[0,0],[0,0]]],[[[-0.5,0],[0,0]],[[0,0],[1,0]]]]}"#,
    )
    .unwrap();
    let (code, err) = exit_code(&["povm", "--json", bad.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(err["error"]["kind"], "validation");

    let (code, err) = exit_code(&["analyze", "--builtin", "appendix-non-ic", "--observable", "pauli:Z"]);
    assert_eq!(code, 4);
    assert_eq!(err["error"]["kind"], "math_domain");

    let missing = dir.path().join("missing.json");
    assert_eq!(exit_code(&["povm", "--json", missing.to_str().unwrap()]).0, 5);
    assert_eq!(exit_code(&["scan", "--dims", "2,6"]).0, 4);
    assert_eq!(exit_code(&["povm", "--builtin", "mub", "--json", "x.json"]).0, 2);
    assert_eq!(
        exit_code(&["analyze", "--builtin", "mub", "--dim", "2", "--observable", "nope"]).0,
        2
    );
    assert_eq!(
        exit_code(&["analyze", "--builtin", "mub", "--dim", "2", "--pseudo"]).0,
        2
    );
}

#[test]
fn pseudo_inverse_on_non_ic_povm() {
    let v = json_ok(&sh(
        "analyze --builtin appendix-non-ic --dual canonical --pseudo --observable pauli:Z --state pure:0",
    ));
    assert_eq!(v["result"]["informationally_complete"], false);
    assert_eq!(v["result"]["context"]["support_restricted"], true);
}

#[test]
fn out_dir_and_side_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = fshadow(
        Some(dir.path()),
        &sh("simulate --builtin appendix-h3 --observable pauli:Z -n 2000 --groups 8 --histogram hist.csv --pmf --growth growth.csv"),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("simulate.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["summary"]["groups"], 8);

    let hist = fs::read_to_string(dir.path().join("hist.csv")).unwrap();
    let mut lines = hist.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next().unwrap(), "low,high,count,density");
    let values: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(values, ["-1.0", "5.0"]);

    let growth = fs::read_to_string(dir.path().join("growth.csv")).unwrap();
    let last = growth.lines().last().unwrap();
    assert!(last.starts_with("2000,"));
}

#[test]
fn realizations_do_not_depend_on_worker_count() {
    let run = |workers: &str| {
        let mut cmd = sh("simulate --builtin mub --dim 3 --state random -n 100 --realizations 40 --workers");
        cmd.push(workers);
        json_ok(&cmd)["result"].clone()
    };
    assert_eq!(run("1"), run("5"));
}

#[test]
fn covariant_simulation() {
    let v = json_ok(&["simulate", "--covariant", "--dim", "2", "-n", "20000", "--seed", "2"]);
    let r = &v["result"];
    assert_eq!(r["measurement"], "covariant");
    let se = (f(&r["exact_variance"]) / 20000.0).sqrt();
    assert!((f(&r["summary"]["mean"]) - f(&r["expectation"])).abs() < 5.0 * se);
    assert_eq!(exit_code(&["simulate", "--covariant", "-n", "10"]).0, 2);
}

#[test]
fn single_dimension_scan() {
    let out = fshadow(None, &["scan", "--dims", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("2,6,"));
}
