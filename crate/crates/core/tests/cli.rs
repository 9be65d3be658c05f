use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use progfree::cli::report::{RunReport, SWEEP_HEADER};
use progfree::cli::setfile;

fn progfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_progfree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn verify_file(dir: &Path, name: &str, body: &str) -> Output {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    progfree(&["verify", path.to_str().unwrap()])
}

#[test]
fn construct_twice_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for (path, threads) in [(&a, "1"), (&b, "2")] {
        let out = progfree(&[
            "construct", "--n", "1000", "--seed", "7", "--trials", "64", "--threads", threads, "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let report = RunReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
        assert_eq!(report.n, 1000);
        assert_eq!(report.trials, 64);
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let set = setfile::parse_set(&String::from_utf8(ta).unwrap()).unwrap();
    assert_eq!(set.n_limit(), 1000);
    assert_eq!(progfree(&["verify", a.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn construct_csv_report() {
    let out = progfree(&["construct", "--n", "500", "--trials", "4", "--report", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let report = RunReport::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.command, "construct");
    assert!(report.size >= 1);
    assert!(report.size <= report.raw_size);
}

#[test]
fn construct_with_dimension_override() {
    let out = progfree(&["construct", "--n", "2000", "--trials", "4", "--d-override", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let report = RunReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.d, 3);
}

#[test]
fn construct_usage_errors() {
    let out = progfree(&["construct"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(progfree(&["construct", "--n", "4"]).status.code(), Some(2));
    assert_eq!(progfree(&["construct", "--n", "abc"]).status.code(), Some(2));
    assert_eq!(progfree(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify_file(dir.path(), "bad.txt", "1\n2\n3\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(1, 2, 3)"));

    assert_eq!(verify_file(dir.path(), "good.txt", "1\n2\n4\n5\n").status.code(), Some(0));

    let out = verify_file(dir.path(), "unsorted.txt", "2\n1\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsorted"));

    let out = verify_file(dir.path(), "dup.txt", "1\n1\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate"));

    let out = verify_file(dir.path(), "range.txt", "# n_limit=3\n1\n4\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range"));

    assert_eq!(verify_file(dir.path(), "junk.txt", "1\nfoo\n").status.code(), Some(2));
    assert_eq!(progfree(&["verify", "/nonexistent/set.txt"]).status.code(), Some(2));
}

#[test]
fn sweep_rows_and_determinism() {
    let args = ["sweep", "--n-list", "1000,10000,100000", "--trials", "8", "--seed", "3"];
    let first = progfree(&args);
    assert_eq!(first.status.code(), Some(0));
    let text = String::from_utf8(first.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], SWEEP_HEADER);
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 9);
        assert!(cols[4].parse::<u64>().unwrap() >= 1);
        assert!(cols[5].parse::<u64>().unwrap() >= 1);
    }
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "2"]);
    assert_eq!(progfree(&threaded).stdout, first.stdout);
    assert_eq!(progfree(&["sweep", "--n-list", "1000;2000"]).status.code(), Some(2));
}

#[test]
fn oracle_command_reports_witness() {
    let out = progfree(&["oracle", "--n", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["r3"], 9);
    assert_eq!(v["witness"].as_array().unwrap().len(), 9);
}
