use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const O1: &str = "OBJECTONE999999999999999999999999999999999999999999999999999999999999999999999999";
const O2: &str = "OBJECTTWO999999999999999999999999999999999999999999999999999999999999999999999999";

fn hyperkube(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperkube"))
        .args(args)
        .env_remove("HYPERKUBE_OUT")
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.records().map(Result::unwrap).collect()
}

fn write_fixture(dir: &Path) -> String {
    let path = dir.join("fixture.jsonl");
    fs::write(
        &path,
        format!(
            "{{\"keywords\":[\"a\",\"b\"],\"root\":\"{O1}\"}}\n\n{{\"keywords\":[\"Bologna\",\"Temperature\"],\"root\":\"{O2}\"}}\n"
        ),
    )
    .unwrap();
    path.to_str().unwrap().to_owned()
}

fn query_json(args: &[&str]) -> Value {
    let out = hyperkube(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn objects(v: &Value) -> Vec<&str> {
    v["objects"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o.as_str().unwrap())
        .collect()
}

#[test]
fn run_smoke_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "run",
        "--r",
        "3",
        "--objects",
        "10",
        "--search",
        "superset",
        "--limit",
        "10",
        "--reps",
        "2",
        "--seed",
        "1",
        "--out",
        out,
        "--emit-traces",
    ];
    let res = hyperkube(&args);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let results = csv_rows(&dir.path().join("results.csv"));
    assert_eq!(results.len(), 2);
    let summary = csv_rows(&dir.path().join("summary.csv"));
    assert_eq!(summary.len(), 1);
    assert_eq!(&summary[0][0], "8");
    assert_eq!(&summary[0][2], "superset");
    let mean: f64 = summary[0][3].parse().unwrap();
    let (low, high): (f64, f64) = (summary[0][5].parse().unwrap(), summary[0][6].parse().unwrap());
    assert!(low <= mean && mean <= high);

    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["configs"][0]["seed"], 1);
    let traces = fs::read_to_string(dir.path().join("traces.jsonl")).unwrap();
    assert_eq!(traces.lines().count(), 2);
    for line in traces.lines() {
        let t: Value = serde_json::from_str(line).unwrap();
        assert!(t["trace"]["total_hops"].as_u64().is_some());
    }
}

#[test]
fn pin_run_near_half_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = hyperkube(&[
        "run",
        "--r",
        "7",
        "--objects",
        "10000",
        "--search",
        "pin",
        "--reps",
        "50",
        "--seed",
        "42",
        "--out",
        out,
    ]);
    assert!(res.status.success());
    let summary = csv_rows(&dir.path().join("summary.csv"));
    let mean: f64 = summary[0][3].parse().unwrap();
    assert!((mean - 3.5).abs() < 1.0, "{mean}");
}

#[test]
fn invalid_flags_exit_2() {
    for args in [
        &["run", "--r", "0", "--objects", "10"][..],
        &["run", "--r", "4", "--objects", "10", "--limit", "0"],
        &["run", "--r", "4", "--objects", "10", "--reps", "1"],
        &["run", "--r", "4", "--objects", "10", "--search", "fuzzy"],
        &["run", "--r", "4", "--objects", "10", "--bogus"],
        &["sweep", "--r-list", "7,x"],
        &["verify", "--r", "9"],
    ] {
        let out = hyperkube(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn sweep_pin_grid_has_21_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = hyperkube(&["sweep", "--search", "pin", "--reps", "3", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let summary = csv_rows(&dir.path().join("summary.csv"));
    assert_eq!(summary.len(), 21);
    assert_eq!(csv_rows(&dir.path().join("results.csv")).len(), 21 * 3);
    let nodes: Vec<&str> = summary.iter().step_by(3).map(|r| r.get(0).unwrap()).collect();
    assert_eq!(nodes, ["128", "256", "512", "1024", "2048", "4096", "8192"]);
}

#[test]
fn sweep_both_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = hyperkube(&[
        "sweep",
        "--r-list",
        "3,4",
        "--objects-list",
        "5,50",
        "--reps",
        "2",
        "--out",
        out,
    ]);
    assert!(res.status.success());
    let summary = csv_rows(&dir.path().join("summary.csv"));
    assert_eq!(summary.len(), 8);
    assert_eq!(summary.iter().filter(|r| &r[2] == "superset").count(), 4);
}

#[test]
fn outputs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        let res = hyperkube(&[
            "sweep",
            "--r-list",
            "5,6",
            "--objects-list",
            "50,500",
            "--reps",
            "4",
            "--queries",
            "3",
            "--out",
            out,
        ]);
        assert!(res.status.success());
    }
    for name in ["results.csv", "summary.csv", "metadata.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn out_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let res = Command::new(env!("CARGO_BIN_EXE_hyperkube"))
        .args(["run", "--r", "3", "--objects", "10", "--reps", "2"])
        .env("HYPERKUBE_OUT", &target)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(res.status.success());
    assert!(target.join("summary.csv").exists());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn query_pin_and_superset() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write_fixture(dir.path());

    let pin = query_json(&["query", "--fixture", &fixture, "--keywords", "a,b", "--search", "pin"]);
    assert_eq!(objects(&pin), [O1]);
    assert_eq!(pin["search"], "pin");
    let path = pin["trace"]["path"].as_array().unwrap();
    assert_eq!(path.last().unwrap(), &pin["responsible"]);

    let sup = query_json(&[
        "query",
        "--fixture",
        &fixture,
        "--keywords",
        "a",
        "--search",
        "superset",
        "--limit",
        "10",
    ]);
    assert_eq!(objects(&sup), [O1]);

    let empty = query_json(&["query", "--fixture", &fixture, "--keywords", "zzz"]);
    assert!(objects(&empty).is_empty());
}

#[test]
fn query_from_fixed_start() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write_fixture(dir.path());
    let v = query_json(&[
        "query",
        "--fixture",
        &fixture,
        "--keywords",
        "Bologna,Temperature",
        "--r",
        "4",
        "--start",
        "0000",
    ]);
    assert_eq!(v["responsible"], "0010");
    assert_eq!(v["trace"]["total_hops"], 1);
    assert_eq!(objects(&v), [O2]);
}

#[test]
fn query_fixture_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"keywords\":[\"a\"],\"root\":\"TOOSHORT\"}\n").unwrap();
    let out = hyperkube(&["query", "--fixture", bad.to_str().unwrap(), "--keywords", "a"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let missing = hyperkube(&["query", "--fixture", "/nonexistent/fixture.jsonl", "--keywords", "a"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn verify_passes_and_mutation_fails() {
    let ok = hyperkube(&["verify", "--r", "4", "--objects", "200", "--seed", "7"]);
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(ok.status.success(), "{stdout}");
    assert!(stdout.lines().count() >= 4);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")), "{stdout}");

    let bad = hyperkube(&["verify", "--r", "4", "--objects", "200", "--seed", "7", "--mutate"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));
}
