use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn innerpave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_innerpave")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn run_in(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    innerpave(&args)
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["--bench", "parabola", "--eps", "0.25", "--svg", "a,c"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("paving.json")).unwrap()).unwrap();
    assert_eq!(json["vars"], serde_json::json!(["a", "b", "c", "t"]));
    assert_eq!(json["quantifier"]["var"], "t");
    assert_eq!(json["config"]["algo"], "ipabc");
    assert!(!json["inner"].as_array().unwrap().is_empty());
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("bench,algo,eps,omega,contractor,strategy,schedule,n_inner"));
    assert!(lines[1].starts_with("parabola,ipabc,0.25,"));
    let svg = fs::read_to_string(dir.path().join("paving.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains(r#"class="inner""#));
    assert!(fs::read_dir(dir.path()).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn same_seed_same_paving() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["--bench", "robot", "--eps", "0.2", "--strategy", "preparse", "--seed", "7"];
    assert_eq!(code(&run_in(a.path(), &args)), 0);
    assert_eq!(code(&run_in(b.path(), &args)), 0);
    let read = |d: &Path| fs::read(d.join("paving.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn first_only_on_unquantified() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["--bench", "garloffgraf1", "--first-only"]);
    assert_eq!(code(&o), 0);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("paving.json")).unwrap()).unwrap();
    assert!(json["quantifier"].is_null());
    assert!(json["config"]["first_only"].as_bool().unwrap());
}

#[test]
fn problem_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("disk.txt");
    fs::write(&file, "# unit disk\nvar x in [-1, 1]\nvar y in [-1, 1]\nx^2 + y^2 <= 1\n").unwrap();
    let o = run_in(dir.path(), &["--problem", file.to_str().unwrap(), "--algo", "sivia", "--eps", "0.1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("disk:"));
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["--bench", "nope"])), 1);
    assert_eq!(code(&run_in(dir.path(), &["--bench", "parabola", "--frobnicate"])), 1);
    assert_eq!(code(&run_in(dir.path(), &["--bench", "parabola", "--svg", "a,zz"])), 1);
    assert_eq!(code(&run_in(dir.path(), &["--bench", "parabola", "--algo", "sivia"])), 1);
    assert_eq!(code(&run_in(dir.path(), &["--bench", "parabola", "--eps", "0"])), 1);
    assert_eq!(code(&run_in(dir.path(), &[])), 1);
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "var x in [0, 1]\nx <= \n").unwrap();
    let o = run_in(dir.path(), &["--problem", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.txt:"));
    assert!(!dir.path().join("paving.json").exists());
    assert_eq!(code(&innerpave(&["--help"])), 0);
}

#[test]
fn infeasible_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("none.txt");
    fs::write(&file, "var x in [0, 1]\nx >= 2\n").unwrap();
    let o = run_in(dir.path(), &["--problem", file.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(dir.path().join("paving.json").exists());
}

fn compare_rows(args: &[&str]) -> Vec<Vec<String>> {
    let mut all = vec!["compare"];
    all.extend_from_slice(args);
    let o = innerpave(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn compare_adds_ratio_column() {
    let rows = compare_rows(&["--benches", "parabola,robot", "--eps-list", "0.1", "--first-only"]);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0].last().unwrap(), "jla_ipabc_ratio");
    for r in &rows[1..] {
        assert!(r.last().unwrap().parse::<f64>().unwrap() > 0.0);
        // omega follows eps by default
        assert_eq!(r[3], "0.1");
    }
    let single = compare_rows(&["--benches", "parabola", "--algos", "ipabc", "--eps-list", "0.2"]);
    assert_eq!(single.len(), 2);
    assert_eq!(single[1].last().unwrap(), "");
}

#[test]
fn compare_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = innerpave(&[
        "compare", "--benches", "garloffgraf1", "--eps-list", "0.5", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv, String::from_utf8(o.stdout).unwrap());
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipping jla"));
}

#[test]
fn finer_slices_test_more() {
    let calls = |omega: &str| -> u64 {
        let rows = compare_rows(&["--benches", "circle2", "--algos", "jla", "--eps-list", "0.2", "--omega", omega]);
        rows[1][14].parse().unwrap()
    };
    assert!(calls("0.05") > calls("0.5"));
}

#[test]
fn jla_finer_slices_on_parabola() {
    let calls = |omega: &str| -> u64 {
        let dir = tempfile::tempdir().unwrap();
        let o = run_in(
            dir.path(),
            &["--bench", "parabola", "--algo", "jla", "--eps", "1e-3", "--omega", omega, "--max-iterations", "300"],
        );
        assert_eq!(code(&o), 0);
        let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
        csv.lines().nth(1).unwrap().split(',').nth(14).unwrap().parse().unwrap()
    };
    assert!(calls("0.05") > calls("0.5"));
}

#[test]
fn report_counts_match_paving() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["--bench", "circle1", "--eps", "0.3"])), 0);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("paving.json")).unwrap()).unwrap();
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    for (col, key) in [(7, "inner"), (8, "outer"), (9, "undecided")] {
        assert_eq!(row[col].parse::<usize>().unwrap(), json[key].as_array().unwrap().len(), "{key}");
    }
    let (first, total): (f64, f64) = (row[11].parse().unwrap(), row[12].parse().unwrap());
    assert!(first <= total);
}

#[test]
fn timeout_sentinel() {
    let rows = compare_rows(&["--benches", "pointpath", "--eps-list", "0.5", "--timeout", "0.2"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][1], "jla");
    assert_eq!(rows[1][12], "TIMEOUT");
    assert_eq!(rows[1].last().unwrap(), "TIMEOUT");
}
