use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::process::{Command, Output};

use revlink_core::clairaut::{ClairautConfig, ClairautMap};
use revlink_core::diagram::{sample_closed_geodesic, write_diagram, MultiCurve};
use revlink_core::profile::write_profile_samples;
use revlink_core::ProfileSurface;
use serde_json::Value;

fn revlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revlink")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn link_prints_exact_half_integers() {
    for (args, expected) in [
        (vec!["link", "--equator", "plus", "--type", "8,1"], "3\n"),
        (vec!["link", "--equator", "minus", "--type", "2,1"], "-1\n"),
        (vec!["link", "--type", "3,1", "--type", "-2,1", "--outer", "first"], "-3\n"),
        (vec!["link", "--equator", "plus", "--type", "0,1"], "-1/2\n"),
        (vec!["link", "--equator", "plus", "--equator", "minus"], "-1/2\n"),
    ] {
        let out = revlink(&args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stdout(&out), expected, "{args:?}");
    }
}

#[test]
fn invalid_input_exits_one() {
    for args in [
        vec!["link", "--equator", "plus", "--type", "0,2"],
        vec!["link", "--type", "3,1"],
        vec!["analyze", "--surface", "torus"],
        vec!["sweep", "--range", "b=3..1"],
        vec!["sweep", "--range", "c=1..2:0.5"],
        vec!["analyze", "--surface", "sphere", "--tol", "-1"],
        vec!["no-such-command"],
    ] {
        assert_eq!(code(&revlink(&args)), 1, "{args:?}");
    }
}

#[test]
fn analyze_reports_verdicts_through_exit_codes() {
    let out = revlink(&["analyze", "--surface", "ellipsoid:b=1.5"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["report"]["verdict"]["status"], "LeftHanded");
    let margin = r["report"]["verdict"]["margin"].as_f64().unwrap();
    assert!((margin - 0.5 * PI).abs() < 1e-6, "{margin}");
    assert_eq!(r["header"]["config"]["surface"], "ellipsoid:b=1.5");
    assert!(r["header"]["version"].is_string());

    let out = revlink(&["analyze", "--surface", "ellipsoid:b=2.5"]);
    assert_eq!(code(&out), 3);
    let w = &json(&out)["report"]["verdict"]["witness"];
    assert_eq!(w["type"], "(2,1)");
    assert!(w["closure_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(w["crossings_per_period"], 2);

    let out = revlink(&["analyze", "--surface", "sdelta:delta=0.25,eps=0.1"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["report"]["verdict"]["asymptotic"], true);
}

#[test]
fn non_convex_profile_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dumbbell.csv");
    let rows: Vec<(f64, f64, f64)> = (0..=400)
        .map(|k| {
            let v = -FRAC_PI_2 + PI * k as f64 / 400.0;
            (v, (v.cos() * (1.0 - 0.8 * v.cos().powi(2))).max(0.0), v.sin())
        })
        .collect();
    write_profile_samples(File::create(&path).unwrap(), &rows).unwrap();
    let spec = format!("file:{}", path.display());
    assert_eq!(code(&revlink(&["analyze", "--surface", &spec])), 2);
}

#[test]
fn sweep_flips_between_two_and_two_and_a_half() {
    let out = revlink(&["sweep", "--range", "b=1.0..3.0:0.5", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 5);
    let verdicts: Vec<&str> = rows.iter().map(|r| r[3].as_str()).collect();
    assert_eq!(verdicts, ["LeftHanded", "LeftHanded", "NotLeftHanded", "NotLeftHanded", "NotLeftHanded"]);
    for r in &rows {
        let b: f64 = r[0].parse().unwrap();
        let limit: f64 = r[2].parse().unwrap();
        assert!((limit - PI * b).abs() < 1e-3, "b = {b}: {limit}");
    }
}

#[test]
fn critical_b_is_rounded_to_its_tolerance_and_repeatable() {
    let args = ["critical-b", "--b-tol", "1e-2", "--format", "csv"];
    let first = revlink(&args);
    assert_eq!(code(&first), 0);
    assert!(stdout(&first).contains("b_critical,2.00\n"), "{}", stdout(&first));
    assert_eq!(first.stdout, revlink(&args).stdout);
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let base = ["oracle", "--surface", "ellipsoid:b=2.5", "--max-p", "4", "--max-q", "2", "--format", "csv"];
    let one = revlink(&[&base[..], &["--workers", "1"]].concat());
    let four = revlink(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(code(&one), 0, "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    assert!(text.contains("e+,\"2,1\",0,0,true"), "{text}");
}

#[test]
fn out_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let to_file = revlink(&["analyze", "--surface", "sphere", "--grid", "128", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&to_file), 0);
    assert!(to_file.stdout.is_empty());
    let printed = revlink(&["analyze", "--surface", "sphere", "--grid", "128"]);
    assert_eq!(std::fs::read(&path).unwrap(), printed.stdout);
}

#[test]
fn oracle_checks_supplied_diagrams() {
    let s = ProfileSurface::ellipsoid(2.5).unwrap();
    let map = ClairautMap::new(&s, ClairautConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for (p, q) in [(2, 1), (3, 2)] {
        let c = map.find_closed_geodesic(p, q).unwrap().unwrap().c;
        let curve = sample_closed_geodesic(&s, c, 96).unwrap();
        let path = dir.path().join(format!("g{p}{q}.txt"));
        write_diagram(File::create(&path).unwrap(), &MultiCurve::single(curve)).unwrap();
        paths.push(path);
    }
    let good = revlink(&["oracle", "--diagram", paths[0].to_str().unwrap(), "--type", "2,1"]);
    assert_eq!(code(&good), 0, "{}", stdout(&good));

    // A (3,2) diagram passed off as a figure-eight.
    let bad = revlink(&["oracle", "--diagram", paths[1].to_str().unwrap(), "--type", "2,1"]);
    assert_eq!(code(&bad), 5);
    assert!(String::from_utf8_lossy(&bad.stderr).contains(paths[1].to_str().unwrap()));

    let missing = revlink(&["oracle", "--diagram", "/nonexistent/diagram.txt", "--type", "2,1"]);
    assert_eq!(code(&missing), 1);
}
