use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn programs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs")
}

fn purify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn analyze_json() {
    let f = programs().join("pair.pur");
    let o = purify(&["analyze", path(&f), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["v"], 1);
    assert_eq!(
        (v["span_src"].as_u64(), v["work_src"].as_u64()),
        (Some(1), Some(2))
    );
    assert_eq!(
        (v["span_opt"].as_u64(), v["work_opt"].as_u64()),
        (Some(1), Some(2))
    );
    assert_eq!(v["span_seq"].as_u64(), Some(2));
}

#[test]
fn check_prints_the_type() {
    let f = programs().join("two_chain.pur");
    let o = purify(&["check", path(&f)]);
    assert_eq!(stdout(&o).trim(), "Str");
}

#[test]
fn translation_output_is_a_program() {
    let dir = tempfile::tempdir().unwrap();
    let f = programs().join("two_chain.pur");
    for mode in ["opt", "naive", "seq"] {
        let o = purify(&["translate", path(&f), "--mode", mode, "--annotate"]);
        assert!(o.status.success(), "{mode}");
        let out = dir.path().join(format!("{mode}.pur"));
        std::fs::write(&out, o.stdout).unwrap();
        let c = purify(&["check", path(&out)]);
        assert_eq!(stdout(&c).trim(), "Eff Str", "{mode}");
    }
}

#[test]
fn run_under_trace_with_config_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"latency_ms":{"fetch":50}}"#).unwrap();
    let dot = dir.path().join("trace.dot");
    let f = programs().join("two_chain.pur");
    let o = purify(&[
        "run",
        path(&f),
        "--monad",
        "trace",
        "--mode",
        "opt",
        "--config",
        path(&cfg),
        "--dot",
        path(&dot),
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("dynamic span 2 work 4"), "{s}");
    assert!(s.contains("simulated latency 100 ms"), "{s}");
    assert!(std::fs::read_to_string(&dot)
        .unwrap()
        .starts_with("digraph"));
}

#[test]
fn run_under_option_with_absent_effect() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"behavior":{"fetch":{"kind":"absent"}}}"#).unwrap();
    let f = programs().join("pair.pur");
    let o = purify(&["run", path(&f), "--monad", "option", "--config", path(&cfg)]);
    assert!(stdout(&o).contains("result: none"), "{}", stdout(&o));
}

#[test]
fn diagnostics_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pur");
    std::fs::write(
        &bad,
        "effect fetch : Str -> Eff Str\npurify { fun x -> fetch(x)! }",
    )
    .unwrap();
    let o = purify(&["check", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda"));

    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"latency_ms":{"nosuch":1}}"#).unwrap();
    let f = programs().join("pair.pur");
    let o = purify(&["run", path(&f), "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn property_failures_exit_with_two() {
    let o = purify(&["suite", "baseline", "--monad", "broken", "--trials", "300"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["failures"].as_array().is_some_and(|f| !f.is_empty()));

    let o = purify(&["laws", "--monad", "writer", "--trials", "100"]);
    assert!(o.status.success());
}
