//! The `landau` command line driven in-process.

use std::io::Write;

use landau_automorphic::cli::execute;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("landau").chain(args.iter().copied());
    let code = execute(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("stdout is one JSON document")
}

#[test]
fn check_passes_for_the_weierstrass_square() {
    let (code, out, _) = run(&["check"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "check");
    assert_eq!(v["passed"], true);
    assert_eq!(v["result"]["valid"], true);
}

#[test]
fn check_reports_the_violating_pair() {
    let (code, out, _) = run(&["check", "--nu", "pi/2"]);
    assert_eq!(code, 1);
    let v = json(&out);
    let viol = &v["result"]["violations"][0];
    assert_eq!((viol["j"].as_u64(), viol["k"].as_u64()), (Some(0), Some(1)));
}

#[test]
fn unknown_character_is_a_config_error() {
    let (code, out, err) = run(&["check", "--character", "nonsense"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("weierstrass") && err.contains("trivial"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["dimension", "--l", "4..1"]).0, 2);
}

#[test]
fn negative_nu_is_rejected_not_misparsed() {
    let (code, _, err) = run(&["check", "--nu", "-1"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn dimension_csv_has_headers_and_unit_traces() {
    let (code, out, _) = run(&["dimension", "--l", "0..3", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# schema: 1\n# config: {"));
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(out.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "l");
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let trace: f64 = row[1].parse().unwrap();
        assert!((trace - 1.0).abs() < 1e-5, "{trace}");
        assert_eq!(&row[4], "true");
    }
}

#[test]
fn kernel_csv_samples_the_section() {
    let (code, out, _) = run(&["kernel", "--level", "1", "--samples", "8"]);
    assert_eq!(code, 0);
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(out.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["t1", "t2", "z_re", "z_im", "k_re", "k_im", "k_abs"]
    );
    assert_eq!(reader.records().count(), 64);
}

#[test]
fn outputs_are_reproducible() {
    for args in [&["selberg", "--l-max", "4"][..], &["dimension", "--l", "0..2"][..], &["kernel", "--samples", "4"][..]]
    {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1, "{args:?}");
        assert!(!a.1.contains("runtime_seconds"));
    }
    let (_, timed, _) = run(&["--timings", "dimension", "--l", "0"]);
    assert!(timed.contains("runtime_seconds"));
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let mut f = std::fs::File::create(&cfg).unwrap();
    write!(f, r#"{{"schema": 1, "nu": {{"pi_multiple": 2.0}}, "lattice": "square", "character": "trivial", "levels": [0, 1]}}"#).unwrap();
    let target = dir.path().join("out.json");
    let (code, out, _) = run(&["--config", cfg.to_str().unwrap(), "--output", target.to_str().unwrap(), "dimension"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v = json(&std::fs::read_to_string(&target).unwrap());
    assert_eq!(v["config"]["character"]["kind"], "trivial");
    let reports = v["result"]["reports"].as_array().unwrap();
    let traces: Vec<f64> = reports.iter().map(|r| r["metrics"]["trace"].as_f64().unwrap()).collect();
    assert_eq!(traces.len(), 2);
    assert!(traces.iter().all(|t| (t - 2.0).abs() < 1e-5), "{traces:?}");
}

#[test]
fn unknown_config_key_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"nu": 3.14, "gird": 32}"#).unwrap();
    let (code, _, err) = run(&["--config", cfg.to_str().unwrap(), "check"]);
    assert_eq!(code, 2);
    assert!(err.contains("gird"), "{err}");
}

#[test]
fn missing_config_file_is_an_io_error() {
    let (code, _, err) = run(&["--config", "/nonexistent/landau.json", "check"]);
    assert_eq!(code, 2);
    assert!(err.contains("error"), "{err}");
}

#[test]
fn report_runs_every_check() {
    let (code, out, err) = run(&["--grid", "48", "report"]);
    let v = json(&out);
    let names: Vec<&str> = v["result"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"rdq_gate") && names.contains(&"selberg_identity") && names.contains(&"fd_spectrum"));
    assert_eq!(code, if v["passed"] == true { 0 } else { 1 }, "{err}");
    assert!(!err.is_empty());
}
