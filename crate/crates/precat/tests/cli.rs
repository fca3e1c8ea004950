use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.display().to_string()
}

fn precat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_precat")).args(args).env_remove("PRECAT_MAX_SEARCH").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn svk_on_the_circle_reports_odd_counts() {
    let out = precat(&["svk", "--x", &fixture("circle.json"), "--u", &fixture("arc_a.json"), "--v", &fixture("arc_b.json"), "--bound", "5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["endo_census"], serde_json::json!([1, 3, 5, 7, 9, 11]));
    assert_eq!(v["verdict"], "yes");
}

#[test]
fn fold_is_not_an_equivalence() {
    let out = precat(&["equiv", "--f", &fixture("fold.json")]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["verdict"], "no");
    assert!(v["witness"].is_string());
}

#[test]
fn properness_demo_is_not_fully_faithful() {
    let v = json(&precat(&["properness-demo"]));
    assert_eq!(v["fully_faithful"], false);
    assert_eq!(v["c_x0_x2"], 2);
    assert_eq!(v["d_x0_x2"], 1);
}

#[test]
fn cohomology_of_rp2_with_z2() {
    let v = json(&precat(&["cohomology", "--x", &fixture("rp2.json"), "--coeff", &fixture("bz2.json"), "--bound", "3"]));
    assert_eq!(v["classes"], 2);
    assert_eq!(v["pi1_census"], serde_json::json!([1, 2, 2, 2]));
}

#[test]
fn lift_against_the_spine_inclusion() {
    let v = json(&precat(&["lift", "--i", &fixture("phi_spine.json"), "--p", &fixture("h2_to_point.json"), "--square", &fixture("spine_square.json")]));
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["lift"][0], "0@(2) -> (2) : [012]");
}

#[test]
fn exit_codes() {
    assert_eq!(precat(&["cat", "--degree", "0", "--in", "x.json"]).status.code(), Some(2));
    assert_eq!(precat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(precat(&["eval", "--in", "/nonexistent/a.json"]).status.code(), Some(1));
    assert_eq!(precat(&["make", "jbar", "--n", "2"]).status.code(), Some(1));
    assert!(precat(&["make", "jbar", "--n", "1"]).status.success());
    let t = fixture("torus.json");
    let undecided = precat(&["svk", "--x", &t, "--u", &t, "--v", &t, "--bound", "2", "--require-decided"]);
    assert_eq!(undecided.status.code(), Some(1));
    let relaxed = precat(&["svk", "--x", &t, "--u", &t, "--v", &t, "--bound", "2"]);
    assert_eq!(relaxed.status.code(), Some(0));
    assert_eq!(json(&relaxed)["verdict"], "unknown");
}

#[test]
fn search_ceiling_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_precat"))
        .args(["cohomology", "--x", &fixture("circle.json"), "--coeff", &fixture("bz2.json")])
        .env("PRECAT_MAX_SEARCH", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("search space"));
    let bad = Command::new(env!("CARGO_BIN_EXE_precat")).args(["properness-demo"]).env("PRECAT_MAX_SEARCH", "lots").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reports_are_byte_stable_and_independent_of_jobs() {
    let args = ["bigcat", "--in", "", "--degree", "3", "--stages", "6"];
    let dir = tempfile::tempdir().unwrap();
    let spine = dir.path().join("spine.json");
    let made = precat(&["make", "upsilon", "--m", "2", "--k", "0", "--out", spine.to_str().unwrap()]);
    assert!(made.status.success());
    let mut a = args.to_vec();
    a[2] = spine.to_str().unwrap();
    let first = precat(&a);
    let second = precat(&a);
    a.extend(["--jobs", "4"]);
    let third = precat(&a);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, third.stdout);
    let census: Vec<u64> = json(&first)["census"].as_array().unwrap().iter().map(|l| l["size"].as_u64().unwrap()).collect();
    assert_eq!(census, vec![3, 6, 10, 15]);
}

#[test]
fn out_artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spine = dir.path().join("spine.json");
    let table = dir.path().join("cat.json");
    assert!(precat(&["make", "upsilon", "--m", "2", "--k", "0", "--out", spine.to_str().unwrap()]).status.success());
    let run = precat(&["cat", "--in", spine.to_str().unwrap(), "--degree", "3", "--out", table.to_str().unwrap()]);
    assert!(run.status.success());
    let reread = precat(&["eval", "--in", table.to_str().unwrap(), "--degree", "3"]);
    assert_eq!(json(&run)["census"], json(&reread)["census"]);
    // Categorifying the stored result changes nothing.
    let again = precat(&["cat", "--in", table.to_str().unwrap(), "--degree", "3"]);
    assert_eq!(json(&again)["stages"], 0);
    assert_eq!(json(&again)["census"], json(&run)["census"]);
}

#[test]
fn segal_on_the_spine_is_injective_only() {
    let dir = tempfile::tempdir().unwrap();
    let spine = dir.path().join("spine.json");
    assert!(precat(&["make", "upsilon", "--m", "2", "--k", "0", "--out", spine.to_str().unwrap()]).status.success());
    let v = json(&precat(&["segal", "--in", spine.to_str().unwrap(), "--m", "2", "--degree", "3"]));
    assert_eq!(v["kind"], "injective");
}

#[test]
fn dot_export() {
    let out = precat(&["export-dot", "--in", &fixture("circle.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("->").count(), 2);
}

#[test]
fn make_accepts_the_documented_sigma_invocation() {
    let out = precat(&["make", "sigma", "--M", "", "--m", "2", "--k", "-1", "--n", "1"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["format"], "precat-presentation/v1");
}
