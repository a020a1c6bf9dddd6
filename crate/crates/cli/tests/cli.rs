use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const IDENTITY: &str = r#"{"v":1,"s":[1.0],"s_tilde":[0.0],
  "psi":[{"phase":0.0,"zeros":[{"re":0.0,"im":0.0}],"atoms":[]}],"psi_tilde":[]}"#;

const RATIONAL: &str = r#"{"s":[2.0],"s_tilde":[1.0],
  "psi":[{"phase":0.0,"zeros":[],"atoms":[]}],
  "psi_tilde":[{"phase":0.0,"zeros":[],"atoms":[]}]}"#;

const CONSTANT: &str = r#"{"s":[0.5],"s_tilde":[0.0],
  "psi":[{"phase":1.0,"zeros":[],"atoms":[]}],"psi_tilde":[]}"#;

fn hst(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hst"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn hst");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn error_kind(out: &Output) -> String {
    // Log lines (HST_LOG) may precede it; the error JSON is the last line.
    let text = String::from_utf8_lossy(&out.stderr);
    let v: Value = serde_json::from_str(text.lines().last().unwrap_or("")).expect("error JSON on stderr");
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<[f64; 4]> {
    let mut lines = text.split('\n');
    assert_eq!(lines.next(), Some("t,re,im,abs"));
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [f[0], f[1], f[2], f[3]]
        })
        .collect()
}

#[test]
fn synthesize_writes_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "lambda.json", IDENTITY);
    let out = dir.path().join("coeffs.json");
    let trace = dir.path().join("trace.csv");
    let o = hst(
        &[
            "synthesize",
            "--in",
            &input,
            "--order",
            "16",
            "--out",
            out.to_str().unwrap(),
            "--boundary-trace",
            trace.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["v"], 1);
    let coeffs = v["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 16);
    for (n, c) in coeffs.iter().enumerate() {
        let want = if n == 1 { 1.0 } else { 0.0 };
        assert!((c["re"].as_f64().unwrap() - want).abs() < 1e-12);
        assert!(c["im"].as_f64().unwrap().abs() < 1e-12);
    }
    assert!(v["tail"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["boundary_trace"].as_str().unwrap(), trace.to_str().unwrap());
    assert_eq!(csv_rows(&std::fs::read_to_string(&trace).unwrap()).len(), 64);
}

#[test]
fn synthesize_reads_stdin() {
    let o = hst(&["synthesize", "--in", "-", "--order", "32"], Some(RATIONAL));
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let c2 = v["coefficients"][2]["re"].as_f64().unwrap();
    assert!((c2 - 3.0 / 8.0).abs() < 1e-12);
    // Too few coefficients for the decay of 3/(2 - z).
    let o = hst(&["synthesize", "--in", "-", "--order", "8"], Some(RATIONAL));
    assert_eq!(error_kind(&o), "TailTooLarge");
    assert_eq!(String::from_utf8_lossy(&o.stderr).lines().count(), 1);
}

#[test]
fn analyze_recovers_the_rational_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "lambda.json", RATIONAL);
    let coeffs = dir.path().join("c.json");
    let o = hst(
        &["synthesize", "--in", &input, "--order", "64", "--keep-section", "--out", coeffs.to_str().unwrap()],
        None,
    );
    assert!(o.status.success());
    let o = hst(&["analyze", "--in", coeffs.to_str().unwrap(), "--order", "64"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["sigma_h"][0]["level"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((v["sigma_k"][0]["level"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["levels"][0]["dominance"], "H");
    assert_eq!(v["levels"][1]["dominance"], "K");
}

#[test]
fn analyze_rejects_the_zero_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "empty-coeffs.json", r#"{"coefficients": []}"#);
    let o = hst(&["analyze", "--in", &input], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "EmptySpectrum");
    let o = hst(&["analyze", "--in", "-"], Some(r#"[{"re":0.0,"im":0.0}]"#));
    assert_eq!(error_kind(&o), "EmptySpectrum");
}

#[test]
fn roundtrip_reports_small_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "lambda.json", RATIONAL);
    let o = hst(&["roundtrip", "--in", &input, "--order", "64"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["s_error"].as_f64().unwrap() <= 1e-6);
    assert!(v["secular_error"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn sample_identity_on_four_points() {
    let o = hst(&["sample", "--in", "-", "--points", "4"], Some(IDENTITY));
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(!text.contains('\r'));
    let rows = csv_rows(&text);
    let want = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
    assert_eq!(rows.len(), 4);
    for (r, (re, im)) in rows.iter().zip(want) {
        assert!((r[1] - re).abs() < 1e-15 && (r[2] - im).abs() < 1e-15);
        assert!((r[3] - 1.0).abs() < 1e-15);
    }
    // 17 significant digits.
    assert!(text.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,1.0000000000000000e0,"));
}

#[test]
fn sample_constant_and_rational() {
    let o = hst(&["sample", "--in", "-", "--points", "7"], Some(CONSTANT));
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    for r in &rows {
        assert!((r[1] - 0.5 * 1f64.cos()).abs() < 1e-15 && (r[2] - 0.5 * 1f64.sin()).abs() < 1e-15);
    }
    let o = hst(&["sample", "--in", "-", "--points", "16", "--offset", "0.1"], Some(RATIONAL));
    for r in csv_rows(&String::from_utf8(o.stdout).unwrap()) {
        let z = (r[0].cos(), r[0].sin());
        let den = ((2.0 - z.0).powi(2) + z.1 * z.1) / 3.0;
        assert!((r[1] - (2.0 - z.0) / den).abs() < 1e-13);
        assert!((r[2] - z.1 / den).abs() < 1e-13);
    }
}

#[test]
fn sample_from_coefficients() {
    let o = hst(&["sample", "--in", "-", "--points", "4"], Some(r#"[{"re":0.0,"im":0.0},{"re":1.0,"im":0.0}]"#));
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert!((rows[1][2] - 1.0).abs() < 1e-15);
}

#[test]
fn sample_hitting_an_atom_fails() {
    let data = r#"{"s":[1.0],"s_tilde":[0.0],
      "psi":[{"phase":0.0,"zeros":[],"atoms":[{"angle":0.0,"mass":1.0}]}],"psi_tilde":[]}"#;
    let o = hst(&["sample", "--in", "-", "--points", "4"], Some(data));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "AtomSingularity");
}

#[test]
fn verify_small_suite() {
    let o = hst(
        &["verify", "--seed", "42", "--trials", "2", "--max-n", "3", "--max-degree", "2", "--max-order", "64"],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 42);
    assert!(v["results"].as_array().unwrap().len() >= 19);
    let o = hst(&["verify", "--trials", "0"], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "InvalidArgument");
}

#[test]
fn cauchy_report_is_seeded() {
    let a = hst(&["cauchy-report", "--seed", "9", "--samples", "200"], None);
    let b = hst(&["cauchy-report", "--seed", "9", "--samples", "200"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["residuals"]["explicit_inverse"].as_f64().unwrap() < 1e-9);
    assert!(v["certification"]["min_sigma"].as_f64().unwrap() > 0.0);

    let o = hst(&["cauchy-report", "--in", "-", "--samples", "50"], Some(r#"{"s":[2.0],"s_tilde":[1.0]}"#));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["weights"]["kappa_sq"][0].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(hst(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(hst(&["synthesize"], None).status.code(), Some(2));
    let o = hst(&["synthesize", "--in", "-"], Some("{not json"));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "InvalidInput");
    let o = hst(&["synthesize", "--in", "/nonexistent/lambda.json"], None);
    assert_eq!(error_kind(&o), "Io");
    let o = hst(&["synthesize", "--in", "-", "--order", "12"], Some(IDENTITY));
    assert_eq!(error_kind(&o), "InvalidOrder");
}
