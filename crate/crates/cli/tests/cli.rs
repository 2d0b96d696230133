use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn plslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plslab"))
        .args(args)
        .env_remove("PLSLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(format!("{}-{name}", std::process::id()))
}

#[test]
fn octahedra_of_cyclic_four() {
    let out = plslab(&["count", "octahedra", "--gen", "cyclic:4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["value"], 1024);
    assert_eq!(v["result"]["method"], "hash-grouped");
}

#[test]
fn naive_and_fast_counts_agree() {
    let fast = json_of(&plslab(&["count", "octahedra", "--gen", "restrict:0.6:2:cyclic:6"]));
    let naive = json_of(&plslab(&["count", "octahedra", "--gen", "restrict:0.6:2:cyclic:6", "--method", "naive"]));
    assert_eq!(fast["result"]["value"], naive["result"]["value"]);
}

#[test]
fn groups_pass_quadrangle_check() {
    let out = plslab(&["qc", "check", "--gen", "cyclic:5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["ok"], true);
    assert_eq!(v["result"]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn figure_instance_fails_label_check_with_exit_two() {
    let out = plslab(&["qc", "check", "--gen", "fig1", "--kind", "label"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!json_of(&out)["result"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn word_distance_on_figure_instance() {
    let path = scratch("fig1.json");
    let gen = plslab(&["gen", "fig1", "--out", path.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0));
    let out = plslab(&["vk", "dist", "--in", path.to_str().unwrap(), "--w1", "d", "--w2", "d2", "--budget", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let d = &json_of(&out)["result"]["distance"];
    assert_eq!(d["status"], "proven-at-most");
    assert!(d["area"].as_u64().unwrap() <= 8);
    std::fs::remove_file(path).ok();
}

#[test]
fn malformed_instances_exit_one() {
    let path = scratch("bad.json");
    std::fs::write(&path, r#"{"dims":[2,2,2],"triples":[[0,0,0],[0,0,1]]}"#).unwrap();
    let out = plslab(&["count", "octahedra", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("agree in two coordinates"));

    let v = plslab(&["validate", "--in", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(2));
    assert_eq!(json_of(&v)["result"]["ok"], false);

    assert_eq!(plslab(&["count", "octahedra", "--gen", "cyclic:x"]).status.code(), Some(1));
    assert_eq!(plslab(&["count", "octahedra", "--in", "/nonexistent.json"]).status.code(), Some(1));
    std::fs::remove_file(path).ok();
}

#[test]
fn csv_instances_are_accepted() {
    let path = scratch("z3.csv");
    let gen = plslab(&["gen", "cyclic:3", "--csv", "--out", path.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0));
    let v = json_of(&plslab(&["count", "octahedra", "--in", path.to_str().unwrap()]));
    assert_eq!(v["result"]["value"], 243);
    std::fs::remove_file(path).ok();
}

#[test]
fn rotation_checks_emit_csv_with_config_header() {
    let out = plslab(&["so3", "verify", "--delta", "0.9", "--budget", "500", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# plslab "));
    assert!(head.contains("\"seed\":3"));
    assert_eq!(lines.next(), Some("metric,measured,bound,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn envelope_records_version_and_config() {
    let v = json_of(&plslab(&["count", "cycles", "--gen", "cyclic:3", "--r", "3", "--seed", "9"]));
    assert_eq!(v["tool"], "plslab");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["instance"], "gen:cyclic:3");
    assert_eq!(v["result"]["value"], 729);
}

#[test]
fn extraction_writes_trace_and_clean_output() {
    let trace = scratch("trace.json");
    let out = plslab(&["extract", "--gen", "restrict:0.8:1:quasigroup:5:4", "--trace", trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let inst = scratch("extracted.json");
    std::fs::write(&inst, v["result"]["instance"].to_string()).unwrap();
    assert_eq!(plslab(&["qc", "check", "--in", inst.to_str().unwrap()]).status.code(), Some(0));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(!t["result"]["stages"].as_array().unwrap().is_empty());
    std::fs::remove_file(trace).ok();
    std::fs::remove_file(inst).ok();
}

#[test]
fn entropy_on_a_cyclic_group() {
    let v = json_of(&plslab(&["entropy", "sigma", "--group", "cyclic:10", "--eps", "2", "--exact"]));
    assert_eq!(v["result"]["set"].as_array().unwrap().len(), 5);
    let c = json_of(&plslab(&["entropy", "cover", "--group", "discrete:5", "--points", "0,1,2,3,4", "--eps", "0.5"]));
    assert_eq!(c["result"]["verified"], true);
}

#[test]
fn saved_nets_reload() {
    let path = scratch("net.json");
    let p = path.to_str().unwrap();
    assert_eq!(plslab(&["so3", "net", "--delta", "0.9", "--budget", "300", "--out", p]).status.code(), Some(0));
    let built = json_of(&plslab(&["so3", "op", "--delta", "0.9", "--budget", "300", "--theta", "0.3"]));
    let loaded = json_of(&plslab(&["so3", "op", "--net", p, "--theta", "0.3"]));
    assert_eq!(built["result"]["defined"], loaded["result"]["defined"]);
    assert_eq!(loaded["result"]["injective"], true);
    std::fs::remove_file(path).ok();
}
