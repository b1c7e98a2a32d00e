use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use sumradii::rat::{frac, parse, Rat};

const LINE5: &str = r#"{"k":2,"dist":[["0","1","2","10","11"],["1","0","1","9","10"],["2","1","0","8","9"],["10","9","8","0","1"],["11","10","9","1","0"]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumradii")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn exact(v: &Value) -> Rat {
    parse(v["exact"].as_str().unwrap()).unwrap()
}

#[test]
fn oracle_values_on_line5() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line5.json", LINE5);
    for (obj, want) in [("msr", 2), ("msd", 3), ("mssr", 2)] {
        let v = json(&run(&["oracle", "--input", &input, "--objective", obj]));
        assert_eq!(exact(&v["value"]), Rat::from_integer(want.into()), "{obj}");
    }
}

#[test]
fn solve_within_factor_of_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line5.json", LINE5);
    let out = dir.path().join("solved.json");
    let status = run(&["solve", "--input", &input, "--objective", "msr", "--output", out.to_str().unwrap()]);
    assert!(status.status.success());
    let solved: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let opt = exact(&json(&run(&["oracle", "--input", &input]))["value"]);
    let cost = exact(&solved["cost"]);
    assert!(cost >= opt && cost <= opt * frac(288, 85));
    assert!(solved["solution"].as_array().unwrap().len() <= 2);
    assert_eq!(solved["cost"]["decimal"], "2");
    assert_eq!(solved["audit"]["passed"], true);
}

#[test]
fn k_override_and_msd_clusters() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line5.json", LINE5);
    let v = json(&run(&["solve", "--input", &input, "--objective", "msd", "--k", "3"]));
    assert_eq!(v["k"], 3);
    assert_eq!(v["kind"], "clusters");
    let mut seen: Vec<u64> = v["solution"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()))
        .collect();
    seen.sort_unstable();
    assert_eq!(seen, vec![0, 1, 2, 3, 4]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["solve", "--input", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", r#"{"k":2,"dist":[["0","1"],["2","0"]]}"#);
    assert_eq!(run(&["validate", "--input", &bad]).status.code(), Some(2));
    let tri = write(dir.path(), "tri.json", r#"{"k":2,"dist":[["0","1","5"],["1","0","1"],["5","1","0"]]}"#);
    let out = run(&["solve", "--input", &tri]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangle"));
    let big = run(&["gen", "--n", "17", "--k", "2", "--seed", "3"]);
    let big = write(dir.path(), "big.json", &String::from_utf8(big.stdout).unwrap());
    assert_eq!(run(&["oracle", "--input", &big]).status.code(), Some(4));
}

#[test]
fn svg_needs_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line5.json", LINE5);
    let svg = dir.path().join("x.svg");
    let out = run(&["solve", "--input", &input, "--svg", svg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(!svg.exists());

    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/euclidean2d-n5-k2-s7.json");
    let out = run(&["solve", "--input", fixture, "--objective", "msd", "--svg", svg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("<polygon") && text.contains("stroke-dasharray"));
}

#[test]
fn gen_is_deterministic_and_valid() {
    let a = run(&["gen", "--n", "7", "--k", "3", "--seed", "11"]);
    let b = run(&["gen", "--n", "7", "--k", "3", "--seed", "11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let fixture = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/euclidean2d-n5-k2-s7.json")).unwrap();
    let out = run(&["gen", "--n", "5", "--k", "2", "--seed", "7", "--space", "euclidean2d"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), fixture.trim_end());

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    for space in ["random-metric", "euclidean2d"] {
        assert!(run(&["gen", "--n", "9", "--k", "2", "--seed", "1", "--count", "4", "--space", space, "--out", &d]).status.success());
    }
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 8);
    for f in files {
        let out = run(&["validate", "--input", f.to_str().unwrap()]);
        assert!(out.status.success(), "{}", f.display());
    }
}

#[test]
fn compare_batches() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let csv = dir.path().join("empty.csv");
    let out = run(&["compare", "--dir", empty.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&csv).unwrap(), "");

    let batch = dir.path().join("batch");
    fs::create_dir(&batch).unwrap();
    write(&batch, "a-line5.json", LINE5);
    let big = run(&["gen", "--n", "17", "--k", "2", "--seed", "3"]);
    write(&batch, "b-big.json", &String::from_utf8(big.stdout).unwrap());
    let csv = dir.path().join("rows.csv");
    let out = run(&["compare", "--dir", batch.to_str().unwrap(), "--objective", "msd", "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(lines[0], "instance,objective,k,g,alg_cost,opt_cost,ratio,audit_pass");
    assert!(lines[1].starts_with("a-line5,msd,2,1,"));
    assert_eq!(lines[2], "b-big,msd,2,1,,,skipped,");
}

#[test]
fn trace_and_lp_dump() {
    let dir = tempfile::tempdir().unwrap();
    let gen = run(&["gen", "--n", "9", "--k", "3", "--seed", "3", "--space", "euclidean2d"]);
    let input = write(dir.path(), "e.json", &String::from_utf8(gen.stdout).unwrap());
    let trace = dir.path().join("t.json");
    let dump = dir.path().join("d.txt");
    let out = run(&[
        "solve", "--input", &input, "--trace", trace.to_str().unwrap(), "--lp-dump", dump.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let t: Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(!t["bipoint"]["steps"].as_array().unwrap().is_empty());
    assert!(fs::read_to_string(&dump).unwrap().contains("tableau"));
}
