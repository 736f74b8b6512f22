use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_dss");

fn dss(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("DSS_OUTPUT_DIR");
    if let Some(p) = out_env {
        cmd.env("DSS_OUTPUT_DIR", p);
    }
    cmd.output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generated(dir: &Path, n: &str) {
    let out = dss(&["gen", "--seed", "3", "--n", n, "--out", path(dir)], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_codes_separate_usage_from_runtime_errors() {
    assert_eq!(dss(&["--help"], None).status.code(), Some(0));
    assert_eq!(dss(&["no-such-command"], None).status.code(), Some(2));
    assert_eq!(dss(&["screen", "--data", "/nonexistent/data.csv"], None).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    generated(dir.path(), "300");
    let data = dir.path().join("data.csv");
    let bad_terms = dss(&["fit", "--data", path(&data), "--terms", "Nope", "--out", path(dir.path())], None);
    assert_eq!(bad_terms.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_terms.stderr).contains("Nope"));
    let text = std::fs::read_to_string(&data).unwrap().replacen("Male", "Robot", 1);
    std::fs::write(&data, text).unwrap();
    assert_eq!(dss(&["screen", "--data", path(&data), "--out", path(dir.path())], None).status.code(), Some(2));
    // an output directory that cannot be created is a runtime failure
    let gen = dss(&["gen", "--n", "10", "--out", "/proc/forbidden/out"], None);
    assert_eq!(gen.status.code(), Some(1));
}

#[test]
fn output_dir_variable_overrides_flag() {
    let flag = tempfile::tempdir().unwrap();
    let env = tempfile::tempdir().unwrap();
    let out = dss(&["gen", "--n", "50", "--out", path(flag.path())], Some(env.path()));
    assert!(out.status.success());
    assert!(env.path().join("data.csv").exists());
    assert!(env.path().join("schema.json").exists());
    assert!(!flag.path().join("data.csv").exists());
}

#[test]
fn screen_select_fit_tree_rules_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generated(d, "4000");
    let data = d.join("data.csv");

    let screen = dss(&["screen", "--data", path(&data), "--out", path(d)], None);
    assert!(screen.status.success());
    let csv = String::from_utf8(screen.stdout).unwrap();
    assert!(csv.starts_with("attribute,chi_square,df,p_value,significant\n"));
    assert_eq!(csv.lines().count(), 9);
    assert_eq!(std::fs::read_to_string(d.join("screening.csv")).unwrap(), csv);

    let select = dss(&["select", "--data", path(&data), "--interactions", "none", "--out", path(d)], None);
    assert!(select.status.success(), "{}", String::from_utf8_lossy(&select.stderr));
    let trace: Value = serde_json::from_slice(&select.stdout).unwrap();
    assert_eq!(trace["steps"][0]["winner"]["attr"], "Type of Activity", "{}", trace["steps"][0]["winner"]);
    assert!(d.join("trace.csv").exists());

    let trace_path = d.join("trace.json");
    let fit = dss(&["fit", "--data", path(&data), "--trace", path(&trace_path), "--out", path(d)], None);
    assert!(fit.status.success());
    assert!(String::from_utf8_lossy(&fit.stdout).starts_with("deviance "));

    let tree = dss(&["tree", "--data", path(&data), "--trace", path(&trace_path), "--out", path(d)], None);
    assert!(tree.status.success(), "{}", String::from_utf8_lossy(&tree.stderr));
    let rules = dss(&["rules", "--tree", path(&d.join("tree.json")), "--schema", path(&d.join("schema.json")), "--out", path(d)], None);
    assert!(rules.status.success(), "{}", String::from_utf8_lossy(&rules.stderr));
    let text = std::fs::read_to_string(d.join("rules.txt")).unwrap();
    assert!(text.starts_with("Rule 1: Type of Activity=Permanently Employed"));
}
