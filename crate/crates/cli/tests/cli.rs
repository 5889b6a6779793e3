use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use zakfrft::{ReportBundle, VerificationReport};

fn zakfrft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zakfrft"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn coeffs_table_for_three_fifths() {
    let o = zakfrft(&["coeffs", "--p", "3", "--q", "5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,re,im,abs"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let abs: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((abs - 5f64.sqrt().recip()).abs() < 1e-12);
    }
}

#[test]
fn non_coprime_slope_is_input_error() {
    let o = zakfrft(&["coeffs", "--p", "2", "--q", "4"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("2/4"));
}

#[test]
fn missing_subcommand_prints_usage() {
    let o = zakfrft(&[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn unknown_flag_and_bad_values_are_rejected() {
    assert_eq!(code(&zakfrft(&["coeffs", "--p", "1", "--q", "2", "--bogus"])), 2);
    assert_eq!(code(&zakfrft(&["frft", "--alpha", "1", "--signal", "circle"])), 2);
    assert_eq!(code(&zakfrft(&["frft", "--alpha", "1", "--xi-range", "1:0:3"])), 2);
    assert_eq!(code(&zakfrft(&["counterexample", "--n", "2", "--phases", "0"])), 2);
}

#[test]
fn oblique_check_gaussian_passes() {
    let o = zakfrft(&["oblique-check", "--p", "1", "--q", "1", "--signal", "gaussian", "--xi-range", "-3:3:121"]);
    assert_eq!(code(&o), 0);
    let bundle: ReportBundle = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(bundle.reports.len(), 1);
    assert!(bundle.reports[0].pass);
}

#[test]
fn tightened_tolerance_file_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let tol = dir.path().join("tol.json");
    std::fs::write(&tol, r#"{"oblique": 1e-300}"#).unwrap();
    let tol = tol.to_str().unwrap();
    let o = zakfrft(&["--tol-file", tol, "oblique-check", "--p", "2", "--q", "1", "--signal", "box"]);
    assert_eq!(code(&o), 1);
    std::fs::write(dir.path().join("bad.json"), r#"{"obliq": 1e-3}"#).unwrap();
    let bad = dir.path().join("bad.json");
    let o = zakfrft(&["--tol-file", bad.to_str().unwrap(), "coeffs", "--p", "1", "--q", "1"]);
    assert_eq!(code(&o), 2);
    let missing = dir.path().join("missing.json");
    let o = zakfrft(&["--tol-file", missing.to_str().unwrap(), "coeffs", "--p", "1", "--q", "1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    std::fs::write(&file, "x").unwrap();
    let out = file.join("sub");
    let o = zakfrft(&["coeffs", "--p", "1", "--q", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn unreachable_epsilon_exits_one_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let targets = dir.path().join("targets.json");
    std::fs::write(&targets, r#"[{"shape": "triangle"}, {"shape": "box", "a": -1, "b": 1}]"#).unwrap();
    let out = dir.path().join("run");
    let o = zakfrft(&[
        "approx-pauli",
        "--targets",
        targets.to_str().unwrap(),
        "--angles",
        "0,pi/2",
        "--epsilon",
        "1e-4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let bundle = read_json(&out.join("reports.json"));
    assert_eq!(bundle["reports"][0]["pass"], Value::Bool(false));
    assert!(bundle["reports"][0]["metadata"]["error"].as_str().unwrap().contains("scan range"));
    assert!(out.join("config.json").exists());
}

#[test]
fn approx_pauli_writes_solution() {
    let dir = tempfile::tempdir().unwrap();
    let targets = dir.path().join("targets.json");
    std::fs::write(&targets, r#"[{"shape": "triangle"}, {"shape": "box", "a": -1, "b": 1}]"#).unwrap();
    let out = dir.path().join("run");
    let o = zakfrft(&[
        "approx-pauli",
        "--targets",
        targets.to_str().unwrap(),
        "--angles",
        "0,pi/2",
        "--T",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sol = read_json(&out.join("solution.json"));
    assert_eq!(sol["components"].as_array().unwrap().len(), 2);
    for k in 0..2 {
        assert!(out.join(format!("modulus_{k}.csv")).exists());
    }
}

#[test]
fn empty_and_single_bundles_serialize() {
    assert_eq!(ReportBundle::default().to_json_compact(), r#"{"reports":[]}"#);
    let one = ReportBundle::new(vec![VerificationReport::new("x", 0.0, 1.0)]);
    assert!(one.to_json_compact().contains(r#""pass":true"#));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "oblique-check".to_string(),
            "--p".into(),
            "3".into(),
            "--q".into(),
            "2".into(),
            "--signal".into(),
            "bump".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let v = args(out);
        let o = zakfrft(&v.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code(&o), 0);
    }
    for name in ["oblique.csv", "reports.json"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    // config echoes the output directory, so it differs only there
    let (ca, cb) = (read_json(&a.join("config.json")), read_json(&b.join("config.json")));
    assert_eq!(ca["tolerances"], cb["tolerances"]);
    assert_eq!(ca["command"]["p"], 3);
}

#[test]
fn counterexample_artifacts_exist_and_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cx");
    let o = zakfrft(&[
        "counterexample",
        "--angles",
        "1/1,2/1,1/2",
        "--n",
        "2",
        "--phases",
        "0,pi/3",
        "--xi-range",
        "-1:1:201",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["config.json", "family.json", "supports.json", "reports.json", "traces/f1_slope2_1.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let bundle: ReportBundle = serde_json::from_str(&std::fs::read_to_string(out.join("reports.json")).unwrap()).unwrap();
    assert!(bundle.all_pass());
}

#[test]
fn selftest_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = zakfrft(&["selftest", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(a.join("reports.json")).unwrap(), std::fs::read(b.join("reports.json")).unwrap());
}
