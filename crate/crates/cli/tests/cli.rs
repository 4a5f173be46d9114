use std::io::Write;
use std::process::{Command, Output};

fn njk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_njk")).args(args).env_remove("NJK_SEED").output().unwrap()
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("njk-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path
}

const GOOD: &str = "\
chart M = (x, y)
tensor N on M = [[x, 0], [0, y]]
tensor B on M = [[y, 0], [0, 0]]
task torsion N
task torsion B expect fail
";

#[test]
fn passing_run_exits_zero() {
    let f = temp_file("good.njk", GOOD);
    let out = njk(&["run", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: PASS"), "{text}");
}

#[test]
fn unmet_expectation_exits_one() {
    let f = temp_file("mismatch.njk", "chart M = (x, y)\ntensor B on M = [[y, 0], [0, 0]]\ntask torsion B\n");
    let out = njk(&["run", f.to_str().unwrap(), "--report", "machine"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["tasks"][0]["met"], false);
    assert_eq!(v["schema"], "njk-report/1");
}

#[test]
fn input_errors_exit_two() {
    let f = temp_file("bad.njk", "chart M = (x)\ntensor N on Q = [[x]]\n");
    let out = njk(&["run", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("2:13: unresolved reference"), "{err}");

    assert_eq!(njk(&["run", "/nonexistent/file.njk"]).status.code(), Some(2));
    assert_eq!(njk(&["catalog", "no_such_entry"]).status.code(), Some(2));
    assert_eq!(njk(&["catalog", "tm_plus", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(njk(&["frobnicate"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_njk")).args(["catalog", "tm_plus"]).env("NJK_SEED", "seven").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn catalog_commands() {
    let out = njk(&["catalog", "--list"]);
    assert_eq!(out.status.code(), Some(0));
    let list = String::from_utf8(out.stdout).unwrap();
    assert!(list.contains("pair_groupoid") && list.contains("broken_nijenhuis"), "{list}");

    assert_eq!(njk(&["catalog", "broken_nijenhuis"]).status.code(), Some(0));

    // the written document runs clean and parses back to itself
    let out = njk(&["catalog", "pair_groupoid", "--dsl"]);
    assert_eq!(out.status.code(), Some(0));
    let f = temp_file("pair.njk", &String::from_utf8(out.stdout).unwrap());
    assert_eq!(njk(&["run", f.to_str().unwrap()]).status.code(), Some(0));
    let a = njk(&["parse", f.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    let g = temp_file("pair2.njk", &String::from_utf8(a.stdout.clone()).unwrap());
    assert_eq!(njk(&["parse", g.to_str().unwrap()]).stdout, a.stdout);
}

#[test]
fn output_file_gets_the_machine_report() {
    let f = temp_file("out.njk", GOOD);
    let dest = f.with_extension("json");
    let out = njk(&["run", f.to_str().unwrap(), "--output", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(v["summary"]["tasks"], 2);
}
