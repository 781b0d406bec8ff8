use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spherefree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherefree")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn construct(dir: &Path, args: &[&str]) -> Output {
    let mut all = vec!["construct"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", dir.to_str().unwrap()]);
    spherefree(&all)
}

#[test]
fn inspect_worked_example() {
    let out = spherefree(&["inspect", "--d", "2", "--p", "13", "--mode", "full"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("f_1 = 1 + 3*t + 1*t^2 (mod 13)"), "{text}");
    assert!(text.contains("f_2 = 5 + 8*t + 1*t^2 (mod 13)"), "{text}");
    assert!(text.contains("g = g_2 = 0 + 1*t (mod 13)"), "{text}");
    assert!(text.contains("h = 8 + 7*t + 9*t^2 + 2*t^3 (mod 13)"), "{text}");
    assert!(text.contains("all 4 checks pass"), "{text}");
}

#[test]
fn inspect_banded_matrix_in_dimension_six() {
    let out = spherefree(&["inspect", "--d", "6", "--n", "1", "--mode", "full"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let p: u64 = text.split("p = ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    let alpha: u64 = text.split("alpha = ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(p, 5077);
    let rows: Vec<Vec<u64>> = text
        .lines()
        .skip_while(|l| !l.starts_with("matrix A"))
        .skip(1)
        .take(6)
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    for (i, row) in rows.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            let expected = if i == j {
                1
            } else if i == j + 1 {
                alpha
            } else if i == 0 && j == 5 {
                assert!(a == alpha || a == p - alpha);
                a
            } else {
                0
            };
            assert_eq!(a, expected, "entry ({i}, {j})");
        }
    }
}

#[test]
fn inspect_strict_reports_the_collapse() {
    let out = spherefree(&["inspect", "--d", "2", "--p", "13", "--mode", "strict", "--tweak", "standard"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("DegenerateTweak at p = 13"));
    let out = spherefree(&["inspect", "--d", "2", "--p", "13", "--mode", "strict"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("DegenerateTweak at p = 13") && text.contains("all 5 checks pass"), "{text}");
}

#[test]
fn unit_circle_is_rejected_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("circle.csv");
    std::fs::write(&path, "1,0\n0,1\n-1,0\n0,-1\n").unwrap();
    let out = spherefree(&["verify", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("witness: (1,0) (0,1) (-1,0) (0,-1)"), "{text}");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "1,2\n3,4\n5,oops\n").unwrap();
    let out = spherefree(&["verify", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn small_grid_uses_thirteen() {
    let dir = tempfile::tempdir().unwrap();
    let out = construct(dir.path(), &["--d", "2", "--n", "10", "--mode", "full"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["p"], 13);
    assert_eq!(manifest["alpha"], 5);
    assert_eq!(manifest["system"]["f"][0], serde_json::json!([1, 3, 1]));
    assert!(manifest["verification"]["passed"].as_bool().unwrap());
    assert!(manifest.get("elapsed_ms").is_none());
}

#[test]
fn strict_output_has_no_three_on_a_plane() {
    let dir = tempfile::tempdir().unwrap();
    let out = construct(dir.path(), &["--d", "3", "--n", "60", "--mode", "strict"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for (file, ring) in [("points.csv", "int"), ("modular.json", "modp")] {
        let path = dir.path().join(file);
        let out = spherefree(&["verify", "--in", path.to_str().unwrap(), "--ring", ring, "--plane-only"]);
        assert_eq!(out.status.code(), Some(0), "{file}: {}", stdout(&out));
    }
}

#[test]
fn json_points_round_trip_and_supply_the_prime() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(construct(dir.path(), &["--d", "2", "--n", "30"]).status.code(), Some(0));
    let json: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("points.json")).unwrap()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("points.csv")).unwrap();
    let from_json: Vec<String> = json["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_array().unwrap().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(from_json, csv.lines().collect::<Vec<_>>());
    let report = dir.path().join("report.json");
    let out = spherefree(&[
        "verify",
        "--in",
        dir.path().join("points.json").to_str().unwrap(),
        "--ring",
        "modp",
        "--mode",
        "fast",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(report["p"], 37);
    assert_eq!(report["ring"], "modp");
}

#[test]
fn unverified_output_does_not_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = construct(dir.path(), &["--d", "2", "--n", "20", "--skip-verify"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(dir.path().join("points.csv").exists());
}

#[test]
fn oversized_self_check_suggests_skipping() {
    let dir = tempfile::tempdir().unwrap();
    let out = construct(dir.path(), &["--d", "2", "--n", "50", "--verify-budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--skip-verify"));
}

#[test]
fn thread_count_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_spherefree"))
        .args(["construct", "--d", "2", "--n", "40", "--out", dir.path().to_str().unwrap()])
        .env("SPHEREFREE_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_spherefree"))
        .args(["construct", "--d", "2", "--n", "40", "--out", dir.path().to_str().unwrap()])
        .env("SPHEREFREE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
