use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn resist(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_resist"));
    cmd.args(args).env_remove("RESIST_SEED").env("RUST_BACKTRACE", "0");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn resist")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn cube() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/cube.off")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn stretch_example_is_affine() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("st");
    let o = resist(
        &["--out", s(&out), "stretch", "--body", s(&cube()), "--apex", "0.5,0.5,1.5", "--law", "classical", "--s", "0:0.1:1"],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&out.join("report.json"));
    assert!(rep["fit"]["max_residual"].as_f64().unwrap() <= 1e-9);
    let csv = std::fs::read_to_string(out.join("family.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "s,F,area_near,area_V,closure_defect");
    assert_eq!(lines.len(), 12);
    // Unit-slope cone over the top face: F(s) = 1 − s/2.
    for line in &lines[1..] {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cols[1] - (1.0 - cols[0] / 2.0)).abs() < 1e-12, "{line}");
    }
}

#[test]
fn manifest_lists_every_file_with_its_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("frames");
    let o = resist(
        &["--out", s(&out), "stretch", "--body", s(&cube()), "--apex", "0.5,0.5,1.5", "--s", "0:0.25:1", "--frames"],
        &[],
    );
    assert_eq!(code(&o), 0);
    let man = json(&out.join("manifest.json"));
    assert_eq!(man["command"], "stretch");
    let listed: BTreeSet<String> = man["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| {
            let name = f["path"].as_str().unwrap();
            let bytes = std::fs::read(out.join(name)).unwrap();
            assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
            assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
            name.to_string()
        })
        .collect();
    let on_disk: BTreeSet<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n != "manifest.json")
        .collect();
    assert_eq!(listed, on_disk);
    assert!(on_disk.contains("frame_004.off"));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let out = tmp.path().join(tag);
        let o = resist(
            &[
                "--out", s(&out), "--seed", "5", "solve-2d", "--omega", "poly:0,0;1,0;1,1;0,1", "--M", "0.6",
                "--rings", "4", "--starts", "2", "--refine", "1", "--max-iter", "40", "--no-polish",
            ],
            &[],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let (ca, cb) = (csv_files(&a), csv_files(&b));
    assert_eq!(ca.len(), 2);
    assert_eq!(ca, cb);
    assert_eq!(std::fs::read(a.join("field.off")).unwrap(), std::fs::read(b.join("field.off")).unwrap());
}

#[test]
fn seed_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("env");
    let o = resist(&["--out", s(&out), "verify", "--suite", "trivial"], &[("RESIST_SEED", "42")]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&out.join("manifest.json"))["seed"], 42);
    let o = resist(&["--out", s(&out), "--seed", "3", "verify", "--suite", "trivial"], &[("RESIST_SEED", "42")]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&out.join("manifest.json"))["seed"], 3);
    let o = resist(&["--out", s(&out), "verify", "--suite", "trivial"], &[("RESIST_SEED", "x")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn configuration_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{"M": 1, "colour": "red"}"#).unwrap();
    let out = tmp.path().join("o");
    let body = cube();
    for args in [
        vec!["--config", s(&bad), "solve-radial"],
        vec!["--out", s(&out), "verify", "--suite", "nonexistent"],
        vec!["--out", s(&out), "verify"],
        vec!["--out", s(&out), "stretch", "--apex", "1,1,1"],
        vec!["--out", s(&out), "stretch", "--body", s(&body), "--apex", "1,1"],
        vec!["--out", s(&out), "stretch", "--body", s(&body), "--apex", "0.5,0.5,1.5", "--s", "0:0.3:1"],
        vec!["--out", s(&out), "solve-radial", "--M", "-1"],
        vec!["--out", s(&out), "--law", "rear", "solve-radial"],
        vec!["--out", s(&out), "--law", "nope", "solve-2d"],
        vec!["--out", s(&out), "solve-2d", "--omega", "ring:3"],
        vec!["frobnicate"],
    ] {
        let o = resist(&args, &[]);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cfg");
    let cfg = tmp.path().join("run.json");
    let body = cube();
    std::fs::write(
        &cfg,
        serde_json::json!({"body": body, "apex": [0.5, 0.5, 1.5], "s": "0:0.5:1", "law": "area", "seed": 11})
            .to_string(),
    )
    .unwrap();
    let o = resist(&["--config", s(&cfg), "--out", s(&out), "--law", "classical", "stretch"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let man = json(&out.join("manifest.json"));
    assert_eq!(man["seed"], 11);
    assert_eq!(man["config"]["law"], "classical");
    assert_eq!(json(&out.join("report.json"))["law"], "classical");
    let csv = std::fs::read_to_string(out.join("family.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn requested_verification_failure_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("coarse");
    // Eight rings are too coarse for the slope-band threshold.
    let args = ["--out", s(&out), "--verify", "solve-radial", "--N", "400", "--rings", "8"];
    let o = resist(&args, &[]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(out.join("manifest.json").exists());
    let o = resist(&args[..2].iter().chain(&args[3..]).copied().collect::<Vec<_>>(), &[]);
    assert_eq!(code(&o), 0);
}

#[test]
fn appendix_suite_passes_for_seed_seven() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("app");
    let o = resist(&["--out", s(&out), "verify", "--suite", "appendix", "--seed", "7"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(out.join("suite.csv")).unwrap();
    assert!(csv.starts_with("check,value,lower,upper,strict,passed\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn solve_radial_example_reports_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rad");
    let o = resist(&["--out", s(&out), "--verify", "solve-radial", "--M", "1", "--L", "1", "--N", "2000"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let rep = json(&out.join("report.json"));
    let r = rep["resistance"].as_f64().unwrap();
    assert!(r > 0.18 && r < 0.19, "{r}");
    let names: Vec<&str> = rep["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"p2-violation-fraction") && names.contains(&"boundary-max"));
    let profile = std::fs::read_to_string(out.join("profile.csv")).unwrap();
    assert_eq!(profile.lines().count(), 2002);
}

#[test]
fn probe_runs_on_cap_and_on_solver_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("probe");
    let o = resist(&["--out", s(&out), "--verify", "probe", "--bump", "polynomial"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("probe.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "tau,first,second,q");
    assert_eq!(csv.lines().count(), 4);

    let field = tmp.path().join("f2d");
    let o = resist(
        &["--out", s(&field), "solve-2d", "--omega", "disc:1:16", "--M", "0.8", "--rings", "4", "--starts", "1", "--refine", "1", "--max-iter", "20", "--no-polish"],
        &[],
    );
    assert_eq!(code(&o), 0);
    let o = resist(&["--out", s(&out), "probe", "--field", s(&field.join("field.off")), "--bump", "wobbly"], &[]);
    assert_eq!(code(&o), 2);
    let o = resist(&["--out", s(&out), "probe", "--field", s(&field.join("missing.off"))], &[]);
    assert_eq!(code(&o), 2);
}

#[test]
fn tabulated_law_is_loaded_by_name() {
    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("law.csv");
    let mut text = String::from("theta,phi,p\n");
    for i in 0..=8 {
        let theta = std::f64::consts::PI * i as f64 / 8.0;
        for j in 0..4 {
            let phi = std::f64::consts::FRAC_PI_2 * j as f64;
            text.push_str(&format!("{theta},{phi},{}\n", theta.cos().max(0.0).powi(2)));
        }
    }
    std::fs::write(&table, &text).unwrap();
    let out = tmp.path().join("tab");
    let body = cube();
    let args = ["--out", s(&out), "--law", "tabbed", "--law-table", s(&table), "stretch", "--body", s(&body), "--apex", "0.5,0.5,1.5"];
    let o = resist(&args, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&out.join("report.json"))["law"], "tabbed");
    let o = resist(&["--out", s(&out), "--law", "classical", "--law-table", s(&table), "stretch", "--body", s(&body), "--apex", "0.5,0.5,1.5"], &[]);
    assert_eq!(code(&o), 2);
}
