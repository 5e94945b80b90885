use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn minlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minlab"))
        .args(args)
        .env_remove("MINLAB_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn enumerate_counts_and_cap() {
    let o = minlab(&["enumerate", "--k", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "25 DAGs, 11 classes");
    assert_eq!(
        stdout(&minlab(&["enumerate", "--k", "1"])).trim(),
        "1 DAG, 1 class"
    );
    let o = minlab(&["enumerate", "--k", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cap"));
}

#[test]
fn enumerate_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dags.json");
    assert!(
        minlab(&["enumerate", "--k", "2", "--out", out.to_str().unwrap()])
            .status
            .success()
    );
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["dags"].as_array().unwrap().len(), 3);
    assert_eq!(doc["classes"].as_array().unwrap().len(), 2);
}

#[test]
fn classify_fixtures() {
    let o = minlab(&["classify", "--fixture", "degenerate_edge"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["minimal"], false);
    assert_eq!(v["witness"]["edges"].as_array().unwrap().len(), 0);
    let o = minlab(&["classify", "--fixture", "generic_chain"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for flag in [
        "markov",
        "faithful",
        "minimal",
        "u_minimal",
        "quasi_faithful",
    ] {
        assert_eq!(v[flag], true, "{flag}");
    }
    assert_eq!(
        minlab(&["classify", "--fixture", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn classify_malformed_file_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        "{\n  \"dag\": {\"k\": 2,\n  \"edges\": [[0,1]]\n",
    );
    let o = minlab(&["classify", "--network", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn classify_rejects_non_markov_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "state.json",
        r#"{"dag":{"k":2,"edges":[]},"table":{"cards":[2,2],"probs":[0.5,0,0,0.5]}}"#,
    );
    let o = minlab(&["classify", "--state", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Markov"));
}

#[test]
fn sample_then_learn_and_test() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("chain.csv");
    let data = data.to_str().unwrap();
    let o = minlab(&[
        "sample",
        "--fixture",
        "generic_chain",
        "--n",
        "20000",
        "--seed",
        "11",
        "--out",
        data,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = minlab(&["learn", "--data", data]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let members = v["member_dags"].as_array().unwrap();
    assert!(members.contains(&serde_json::json!({"k":3,"edges":[[0,1],[1,2]]})));
    assert_eq!(v["iset"].as_array().unwrap().len(), 1);

    let cfg = write(
        dir.path(),
        "learner.json",
        r#"{"k":3,"order":"default","threshold_constant":1.0}"#,
    );
    let again = minlab(&["learn", "--data", data, "--config", &cfg]);
    assert_eq!(again.stdout, o.stdout);

    let o = minlab(&["ci-test", "--data", data, "--statement", "0|2||1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["accepted"], true);
    let o = minlab(&["ci-test", "--data", data, "--statement", "0|2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["accepted"], false);
    assert_eq!(
        minlab(&["ci-test", "--data", data, "--statement", "0|0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sample_requires_seed() {
    assert_eq!(
        minlab(&["sample", "--fixture", "point_mass", "--n", "5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn run_configs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = write(
        d,
        "classification.json",
        r#"{"schema":1,"experiment":"classification","seed":7,"fixtures":["generic_chain","degenerate_edge"],"n_grid":[1000,10000],"trials":50}"#,
    );
    let out = d.join("classification");
    let o = minlab(&["--jobs", "2", "run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("curves.csv")).unwrap();
    assert!(csv.starts_with("curve,n,trials,successes,rate,lo,hi\n"));
    let first = fs::read(out.join("report.json")).unwrap();

    let out1 = d.join("classification_single");
    assert!(minlab(&["run", &cfg, "--out", out1.to_str().unwrap()])
        .status
        .success());
    assert_eq!(fs::read(out1.join("report.json")).unwrap(), first);

    let no_seed = write(
        d,
        "noseed.json",
        r#"{"schema":1,"experiment":"classification"}"#,
    );
    let o = minlab(&["run", &no_seed, "--out", d.join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed missing"));

    let replay = write(
        d,
        "replay.json",
        r#"{"schema":1,"experiment":"nonminimal_replay","seed":1,"fixture":"generic_chain"}"#,
    );
    let o = minlab(&["run", &replay, "--out", d.join("y").to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("precondition: state is minimal"));
}

#[test]
fn run_reports_verdict_failure() {
    let dir = tempfile::tempdir().unwrap();
    // far too few samples for the collider to be recovered
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"schema":1,"experiment":"classification","seed":2,"fixtures":["generic_collider"],"n_grid":[10,20],"trials":20}"#,
    );
    let o = minlab(&["run", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fixtures_lists_names() {
    let text = stdout(&minlab(&["fixtures"]));
    for name in ["generic_chain", "degenerate_edge", "cancellation_collider"] {
        assert!(text.contains(name));
    }
}
