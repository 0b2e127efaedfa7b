//! Benchmark builders against the problem files in `bench/`.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the files from the builders.

use std::fs;
use std::path::PathBuf;

use innerpave::bench::{build, NAMES};
use innerpave::parse;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../bench")
        .join(format!("{name}.txt"))
}

#[test]
fn builders_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for name in NAMES {
        let text = build(name).unwrap().problem.to_string();
        let path = golden(name);
        if update {
            fs::write(&path, &text).unwrap();
        }
        let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(text, expected, "{name}");
    }
}

#[test]
fn golden_files_parse_to_builder_output() {
    for name in NAMES {
        let text = fs::read_to_string(golden(name)).unwrap();
        let parsed = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parsed, build(name).unwrap().problem, "{name}");
    }
}

#[test]
fn golden_formulas() {
    let read = |n: &str| fs::read_to_string(golden(n)).unwrap();
    assert_eq!(
        read("parabola"),
        "var a in [0, 1];\nvar b in [0, 1];\nvar c in [0, 1];\nforall t in [0, 2]:\na * t^2 + b * t + c >= 2 * t - 1\n"
    );
    assert_eq!(
        read("garloffgraf1"),
        "var v in [2, 10];\nvar w in [40, 50];\n-(5 * v^2) - 13 * v + v * w - w > 0\n"
    );
    assert!(read("circle1").contains("sqrt((2.5 * sin(t) - x)^2 + (2.5 * cos(t) - y)^2) >= 0.5"));
}
