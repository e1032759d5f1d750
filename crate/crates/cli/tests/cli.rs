use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn iptlab(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_iptlab"));
    cmd.args(args).env_remove("IPTLAB_SEED");
    if let Some(s) = env_seed {
        cmd.env("IPTLAB_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

const SMALL: &str = r#"{"seed":4,"trials":3,"checkers":[
  {"checker":"landau_ui","dims":[1,3],"atoms":[1,4],"gauges":[{"kind":"schatten","p":2},{"ky_fan":"half"}]},
  {"checker":"trace_landau","dims":[1,3],"atoms":[1,4]}]}"#;

#[test]
fn verify_writes_a_summarised_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let out = dir.path().join("r.jsonl");
    let run = iptlab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap(), "--json-only"], None);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let summary: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(summary["total"], 9);
    let report = lines(&out);
    assert_eq!(report.len(), 1 + 9 + 1);
    assert_eq!(report[0]["type"], "header");
    assert_eq!(report[0]["seed"], 4);
    assert_eq!(report[1]["params"]["trial"], 0);
}

#[test]
fn empty_campaign_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"trials":0,"checkers":[{"checker":"landau_ui"}]}"#);
    let out = dir.path().join("r.jsonl");
    let run = iptlab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(lines(&out).len(), 2);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    for text in [
        r#"{"checkers":[{"checker":"no_such_checker"}]}"#,
        r#"{"checkers":[{"checker":"landau_ov","thetas":[]}]}"#,
        r#"{"checkers":[],"unknown":1}"#,
        "not json",
    ] {
        let cfg = write(dir.path(), "c.json", text);
        let run = iptlab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()], None);
        assert_eq!(run.status.code(), Some(2), "{text}");
    }
    let missing = dir.path().join("missing.json");
    let run = iptlab(&["verify", "--config", missing.to_str().unwrap()], None);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let out = dir.path().join("r.jsonl");
    let o = out.to_str().unwrap();
    iptlab(&["verify", "--config", &cfg, "--out", o], Some("11"));
    assert_eq!(lines(&out)[0]["seed"], 11);
    iptlab(&["verify", "--config", &cfg, "--out", o, "--seed", "12"], Some("11"));
    assert_eq!(lines(&out)[0]["seed"], 12);
    let run = iptlab(&["verify", "--config", &cfg, "--out", o], Some("eleven"));
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_apart_from_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    iptlab(&["verify", "--config", &cfg, "--out", a.to_str().unwrap()], None);
    iptlab(&["verify", "--config", &cfg, "--out", b.to_str().unwrap(), "--jobs", "1"], None);
    let body = |p: &Path| std::fs::read_to_string(p).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&a), body(&b));
}

#[test]
fn non_normal_fields_are_refused_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"trials":2,"checkers":[{"checker":"landau_ui","dims":[2,3],"atoms":[2,3],
            "field_kind":"general","gauges":[{"kind":"schatten","p":1}]}]}"#,
    );
    let out = dir.path().join("r.jsonl");
    let run = iptlab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(run.status.code(), Some(1));
    let report = lines(&out);
    assert_eq!(report[1]["error"], "hypothesis_violation");
    let failure = dir.path().join("r.jsonl.failures/landau_ui-c0-g0-t0.json");
    assert!(failure.exists());
    let f = failure.to_str().unwrap();

    let refused = iptlab(&["replay", f, "--json-only"], None);
    assert_eq!(refused.status.code(), Some(1));
    let explored = iptlab(&["replay", f, "--no-assert", "--json-only"], None);
    assert_eq!(explored.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&explored.stdout).unwrap();
    assert_eq!(r["asserted"], false);

    let run = iptlab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap(), "--no-assert"], None);
    assert_eq!(run.status.code(), Some(0));
}

#[test]
fn tightness_then_replay_with_gauge_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"seed":5,"tightness":{"restarts":2,"steps":10,"initial_step":0.25},
            "checkers":[{"checker":"landau_ui","coupling":"equal","dims":[1,3],"atoms":[2,4],
            "gauges":[{"kind":"schatten","p":2}]}]}"#,
    );
    let out = dir.path().join("t.jsonl");
    let run = iptlab(&["tightness", "--config", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(run.status.code(), Some(0));
    let report = lines(&out);
    assert_eq!(report.len(), 3);
    assert!((report[1]["best_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(!report[1]["seed_chain"].as_array().unwrap().is_empty());

    let best = report[1]["instance_file"].as_str().unwrap();
    let same: Value = serde_json::from_slice(&iptlab(&["replay", best, "--json-only"], None).stdout).unwrap();
    assert_eq!(same["params"]["reproduced"], true);
    let other = iptlab(&["replay", best, "--json-only", "--gauge", "ky_fan:1"], None);
    assert_eq!(other.status.code(), Some(0));
    let other: Value = serde_json::from_slice(&other.stdout).unwrap();
    assert_eq!(other["params"]["modified"], true);
    assert_eq!(other["params"]["gauge"], "ky_fan:1");

    let garbage = write(dir.path(), "bad.json", r#"{"format_version":7}"#);
    assert_eq!(iptlab(&["replay", &garbage], None).status.code(), Some(2));
}

#[test]
fn radius_of_a_field_file() {
    let dir = tempfile::tempdir().unwrap();
    let field = write(
        dir.path(),
        "f.json",
        r#"{"format_version":1,"is_probability":true,"atoms":[
            {"w":0.5,"op":{"dim":1,"entries":[[[0.0,0.0]]]}},
            {"w":0.5,"op":{"dim":1,"entries":[[[1.0,0.0]]]}}]}"#,
    );
    let run = iptlab(&["radius", &field], None);
    assert_eq!(run.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert!((r["radius"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(r["diameter"], 1.0);
}
