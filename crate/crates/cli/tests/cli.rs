use std::path::Path;
use std::process::{Command, Output};

use hyperdomain::io::{DomainFile, SystemFile};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperdomain"))
        .args(args)
        .env_remove("HYPERDOMAIN_SEED")
        .output()
        .unwrap()
}

fn build(dir: &Path, name: &str, t: &str, labels: &str, extra: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_owned();
    let mut args = vec!["build", "--t", t, "--labels", labels, "--out", &p];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn build_prints_a_domain_file() {
    let out = run(&["build", "--t", "0,1,2", "--labels", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let f = DomainFile::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let d = f.to_domain().unwrap();
    assert_eq!(d.n(), 4);
    assert_eq!(d.num_hypersurfaces(), 8);
}

#[test]
fn invalid_input_exits_with_2() {
    assert_eq!(run(&["build", "--t", "1,1,2", "--labels", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--t", "0,1", "--labels", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["check", "/nonexistent/domain.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let lens = build(dir.path(), "lens.json", "-1,1", "0", &[]);
    assert_eq!(run(&["plot", &lens, "--factor", "3"]).status.code(), Some(2));
    assert_eq!(run(&["fiber", &lens, "--t", "0", "--d", "1,1,1"]).status.code(), Some(2));
    assert_eq!(run(&["plot", &lens, "--window", "1,0,-1,1"]).status.code(), Some(2));
}

#[test]
fn check_reports_the_literal_gap() {
    let dir = tempfile::tempdir().unwrap();
    let lit = build(dir.path(), "lit.json", "0,1,2", "0,1", &["--mode", "literal"]);
    let out = run(&["check", &lit, "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["conditions"][4]["status"], "fail");

    let min = build(dir.path(), "min.json", "0,1,2", "0,1", &[]);
    let out = run(&["check", &min, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["conditions"][4]["status"], "pass");
}

#[test]
fn lens_commands() {
    let dir = tempfile::tempdir().unwrap();
    let lens = build(dir.path(), "lens.json", "-1,1", "0", &[]);

    let v = json(&run(&["singular", &lens, "--d", "1", "--json"]));
    assert_eq!(v["predicted_values"], serde_json::json!([-1.0, 1.0]));

    let v = json(&run(&["image", &lens, "--d", "1", "--json"]));
    let img: Vec<f64> = serde_json::from_value(v["image"].clone()).unwrap();
    assert!((img[0] + 1.0).abs() <= 0.01 && (img[1] - 1.0).abs() <= 0.01);

    let out = run(&["fiber", &lens, "--d", "1,1", "--t", "0", "--eps", "0.3", "--json"]);
    let v = json(&out);
    assert_eq!(v["bounded"], true);
    assert_eq!(v["sampled_components"], 1);
}

#[test]
fn seeds_make_runs_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = build(dir.path(), "d.json", "-3,-1,0.5,4", "1,0,1", &[]);
    let a = run(&["fiber", &d, "--t", "2", "--k", "150", "--seed", "9", "--json"]);
    let b = run(&["fiber", &d, "--t", "2", "--k", "150", "--seed", "9", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_hyperdomain"))
        .args(["fiber", &d, "--t", "2", "--k", "150", "--json"])
        .env("HYPERDOMAIN_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(json(&a)["bounded"], false);
}

#[test]
fn exported_system_evaluates_its_probe() {
    let dir = tempfile::tempdir().unwrap();
    let d = build(dir.path(), "d.json", "0,1,2", "0,0", &[]);
    let out_path = dir.path().join("sys.json");
    let out = run(&["export-system", &d, "--d", "3", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let f = SystemFile::from_json(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    f.verify_probe().unwrap();
}

#[test]
fn plot_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let d = build(dir.path(), "d.json", "0,1,2", "0,0", &[]);
    let out = run(&["plot", &d, "--factor", "1", "--window", "-1,3,-2,2"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches(r#"class="branch""#).count(), 4);
}
