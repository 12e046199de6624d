use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;

use serde_json::Value;
use wedge_casimir::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("casimir-wedge").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let (code, out, err) = call(&a);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn num(v: &Value, row: usize, col: &str) -> f64 {
    v["rows"][row][col].as_f64().unwrap_or_else(|| panic!("no {col} in {v}"))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn tensor_right_angle_value() {
    let v = json(&["tensor", "--p", "2", "--eps", "1", "--mu", "1", "--r", "1"]);
    assert!((num(&v, 0, "thetatheta") + 1.8998e-2).abs() < 1e-6);
    let c = 1.0 / (16.0 * PI * PI);
    assert!(rel(num(&v, 0, "rr"), c) < 1e-11);
    assert_eq!(v["meta"]["schema_version"], 1);
}

#[test]
fn tensor_half_space_row_is_zero() {
    let v = json(&["tensor", "--p", "1", "--r", "0.7"]);
    for col in ["rr", "thetatheta", "zz", "w"] {
        assert_eq!(num(&v, 0, col), 0.0);
    }
}

#[test]
fn tensor_medium_divides_by_index() {
    let vac = json(&["tensor", "--p", "3", "--r", "1"]);
    let diel = json(&["tensor", "--p", "3", "--eps", "2.25", "--mu", "1", "--r", "1"]);
    for col in ["rr", "thetatheta", "zz", "w"] {
        assert!(rel(num(&diel, 0, col) * 1.5, num(&vac, 0, col)) < 1e-11);
    }
}

#[test]
fn tensor_oracle_reports_deviation() {
    let v = json(&["tensor", "--p", "3", "--r", "0.5,1", "--oracle"]);
    for row in 0..2 {
        assert!(num(&v, row, "rel_dev") < 1e-6);
        assert!(rel(num(&v, row, "oracle_thetatheta"), num(&v, row, "thetatheta")) < 1e-6);
    }
    assert_eq!(v["meta"]["route"], "images");
}

#[test]
fn force_in_cgs_and_medium() {
    let v = json(&["force", "--alpha", "1e-4", "--r", "1cm", "--units", "cgs"]);
    let sigma = num(&v, 0, "sigma");
    assert!(rel(sigma, 0.0043) < 0.05, "{sigma}");
    assert!(rel(num(&v, 0, "plate_ratio"), 1.0 / 3.0) < 0.10);
    let d = json(&["force", "--alpha", "1e-4", "--r", "10mm", "--units", "cgs", "--eps", "4", "--mu", "1"]);
    assert!(rel(num(&d, 0, "sigma"), 0.5 * sigma) < 1e-11);
}

#[test]
fn natural_force_is_the_radial_stress() {
    let f = json(&["force", "--alpha", "pi/2", "--r", "1", "--units", "natural"]);
    let t = json(&["tensor", "--p", "2", "--r", "1"]);
    let sigma = num(&f, 0, "sigma");
    assert!(rel(sigma, -num(&t, 0, "thetatheta") / 3.0) < 1e-11);
    assert!(rel(sigma, num(&t, 0, "rr")) < 1e-11);
}

#[test]
fn polder_midplane_and_plate() {
    let v = json(&["polder", "--p", "2", "--theta-frac", "0.5"]);
    assert!(num(&v, 0, "force_theta").abs() < 1e-12);
    let v = json(&["polder", "--p", "1", "--theta", "pi/2", "--r", "2"]);
    let law = -3.0 / (32.0 * PI * PI * 16.0);
    assert!(rel(num(&v, 0, "u"), law) < 1e-11);
}

#[test]
fn polder_oracle_agrees() {
    let v = json(&["polder", "--p", "3", "--theta-frac", "0.3333333333,0.5", "--oracle"]);
    for row in 0..2 {
        assert!(num(&v, row, "rel_dev") < 1e-3);
    }
}

#[test]
fn string_analogy_and_conversion() {
    let v = json(&["string", "--beta", "1", "--r", "1"]);
    for col in ["rr", "thetatheta", "zz", "w"] {
        assert_eq!(num(&v, 0, col), 0.0);
    }
    let v = json(&["string", "--beta", "3", "--eps", "2", "--mu", "2", "--r", "0.5:2:4"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    for row in 0..4 {
        assert!(num(&v, row, "rel_dev") < 1e-12);
    }
    let g = json(&["string", "--g-mu", "0.1"]);
    assert!((g["meta"]["g_mu"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert!((g["meta"]["beta"].as_f64().unwrap() - 1.0 / 0.6).abs() < 1e-11);
}

#[test]
fn csv_has_header_and_fixed_digits() {
    let (code, out, _) = call(&["sweep", "--quantity", "tensor", "--p", "2,3", "--r", "1:2:2"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "p,alpha,r,rr,thetatheta,zz,w");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("2,1.57079632679e0,1.00000000000e0,"));
    assert!(lines[4].starts_with("3,"));
}

#[test]
fn sweep_output_is_deterministic() {
    let args = [
        "sweep", "--quantity", "polder", "--p", "2,3", "--r", "0.5:2:4:log", "--theta-frac",
        "0.2,0.5", "--oracle", "--format", "json",
    ];
    let (c1, a, _) = call(&args);
    let (c2, b, _) = call(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    // Input order: p outermost, then r, then theta.
    assert_eq!(rows[0]["p"], 2);
    assert_eq!(rows[15]["p"], 3);
    assert!(num(&v, 1, "theta") > num(&v, 0, "theta"));
}

#[test]
fn config_file_precedence() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# wedge\np = 3\neps = 4\nr = 2\nformat = json").unwrap();
    let path = f.path().to_str().unwrap();
    let (code, out, err) = call(&["--config", path, "tensor"]);
    assert_eq!(code, 0, "{err}");
    let from_file: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(num(&from_file, 0, "r"), 2.0);
    assert_eq!(from_file["meta"]["eps"], 4.0);
    let (_, out, _) = call(&["tensor", "--config", path, "--eps", "1", "--p", "2"]);
    let flags: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(flags["meta"]["eps"], 1.0);
    assert_eq!(flags["rows"][0]["p"], 2);
    assert_eq!(num(&flags, 0, "r"), 2.0);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["tensor"],
        vec!["tensor", "--p", "2", "--alpha", "pi/2"],
        vec!["tensor", "--alpha", "0.3", "--oracle"],
        vec!["polder", "--alpha", "pi/2"],
        vec!["polder", "--p", "2", "--theta", "0"],
        vec!["force", "--p", "2", "--r", "1cm"],
        vec!["tensor", "--p", "2", "--r", "1,3,2"],
        vec!["tensor", "--p", "0"],
        vec!["string"],
        vec!["sweep", "--p", "2"],
        vec!["tensor", "--p", "2", "--eps", "-1"],
        vec!["frobnicate"],
        vec!["--config", "/nonexistent/file", "tensor", "--p", "2"],
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn numerical_failure_exits_two() {
    let (code, _, err) = call(&[
        "tensor", "--p", "3", "--oracle", "--max-subdivisions", "1", "--rel-tol", "1e-15",
        "--abs-tol", "1e-300",
    ]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("converge"), "{err}");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("sweep"));
}

#[test]
fn validate_passes() {
    let (code, out, err) = call(&["validate", "--p-set", "2,3", "--format", "csv"]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.lines().skip(1).all(|l| l.contains(",true,")), "{out}");
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_casimir-wedge");
    let ok = Command::new(exe).args(["tensor", "--p", "2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("-1.900e-2"));
    let bad = Command::new(exe).args(["tensor"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
