use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nctorus::fit::log_log_fit;
use nctorus::toroidal::{build_kernel, restrict, DEFAULT_MARGIN};
use nctorus::symbols::JapaneseBracket;
use nctorus::{AlgebraElement, MultiIndex, ThetaMatrix};
use num_complex::Complex64;
use serde_json::Value;
use std::sync::Arc;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nctorus")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn theta() -> Arc<ThetaMatrix> {
    Arc::new(ThetaMatrix::two_dim(0.25))
}

#[test]
fn verify_algebra_passes_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let out = run(&["verify", "algebra", "--seed", "7", "--out", s(&a)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(code(&run(&["verify", "algebra", "--seed", "7", "--out", s(&b)])), 0);
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());

    let report: Value = serde_json::from_slice(&first).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert!(rows.len() >= 5);
    for row in rows {
        assert_eq!(row["pass"], Value::Bool(true), "{row}");
        assert!(!row["reference"].as_str().unwrap().is_empty());
        assert!(row["max_discrepancy"].as_f64().unwrap() <= row["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn verify_default_seed_prints_report() {
    let out = run(&["verify", "algebra"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 0);
    assert_eq!(report["suite"], "algebra");
}

#[test]
fn unattainable_tolerance_fails() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["verify", "algebra", "--tol", "1e-30", "--out", s(&path)]);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["pass"] == Value::Bool(false)));
    assert!(rows.iter().all(|r| r["tolerance"].as_f64() == Some(1e-30)));
}

#[test]
fn tiny_quadrature_budget_is_reported_per_row() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["verify", "oscint", "--quad-points", "10", "--out", s(&path)]);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    for row in rows {
        assert_eq!(row["pass"], Value::Bool(false));
        assert!(row["max_discrepancy"].is_null());
        assert!(row["error"].as_str().unwrap().contains("budget"), "{row}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["verify", "everything"])), 2);
    assert_eq!(code(&run(&["verify", "algebra", "--theta", "0.1,zz"])), 2);
    assert_eq!(code(&run(&["verify", "algebra", "--n", "3", "--theta", "0.1"])), 2);
    assert_eq!(code(&run(&["verify"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

fn apply(dir: &TempDir, op: &str, u: &AlgebraElement) -> (Output, PathBuf) {
    let op = put(dir, "op.json", op);
    let input = put(dir, "u.json", &u.to_json());
    let out = dir.path().join("v.json");
    (run(&["apply", "--op", s(&op), "--input", s(&input), "--out", s(&out)]), out)
}

#[test]
fn flat_laplacian_on_a_basis_vector() {
    let dir = TempDir::new().unwrap();
    let u = AlgebraElement::basis(theta(), [2, 1].into());
    let (out, path) = apply(&dir, r#"{"kind": "flat_laplacian"}"#, &u);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = AlgebraElement::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v.coeff(&[2, 1].into()), Complex64::new(5.0, 0.0));
    let csv = fs::read_to_string(dir.path().join("v.decay.csv")).unwrap();
    assert!(csv.starts_with("shell_radius,max_abs\n"));
}

#[test]
fn identity_copies_the_input() {
    let dir = TempDir::new().unwrap();
    let u = AlgebraElement::from_fn(theta(), 2, |k| Complex64::new(k.get(0) as f64 + 0.5, -(k.get(1) as f64)));
    let (out, path) = apply(&dir, r#"{"kind": "identity"}"#, &u);
    assert_eq!(code(&out), 0);
    assert_eq!(AlgebraElement::from_json(&fs::read_to_string(&path).unwrap()).unwrap(), u);
}

fn sidecar_order(path: &Path) -> f64 {
    let pts: Vec<(f64, f64)> = fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (r, m) = l.split_once(',').unwrap();
            (r.parse().unwrap(), m.parse().unwrap())
        })
        .collect();
    log_log_fit(&pts).unwrap().slope
}

#[test]
fn bessel_multiplier_lowers_the_decay_order() {
    let dir = TempDir::new().unwrap();
    // shell maxima exactly 1 + r
    let u = AlgebraElement::from_fn(theta(), 16, |k| Complex64::new(1.0 + k.sup_norm() as f64, 0.0));
    let (out, _) = apply(&dir, r#"{"kind": "identity"}"#, &u);
    assert_eq!(code(&out), 0);
    let before = sidecar_order(&dir.path().join("v.decay.csv"));
    let (out, _) = apply(&dir, r#"{"kind": "lambda", "s": -4}"#, &u);
    assert_eq!(code(&out), 0);
    let after = sidecar_order(&dir.path().join("v.decay.csv"));
    assert!((before - after - 4.0).abs() <= 0.3, "{before} -> {after}");
}

#[test]
fn differential_descriptor_with_coefficients() {
    let dir = TempDir::new().unwrap();
    let b = AlgebraElement::basis(theta(), [0, 1].into());
    let op = format!(r#"{{"kind": "differential", "terms": [{{"alpha": [1, 0], "coeff": {}}}]}}"#, b.to_json());
    let u = AlgebraElement::basis(theta(), [3, 0].into());
    let (out, path) = apply(&dir, &op, &u);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = AlgebraElement::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v, b.multiply(&u).unwrap().scale_real(3.0));
}

#[test]
fn parse_failures_exit_two_with_location() {
    let dir = TempDir::new().unwrap();
    let u = AlgebraElement::one(theta());
    let (out, _) = apply(&dir, "{\n  \"kind\": \"flat_laplacian\",\n  oops\n}", &u);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
    let (out, _) = apply(&dir, r#"{"kind": "no_such_operator"}"#, &u);
    assert_eq!(code(&out), 2);

    let other = AlgebraElement::one(Arc::new(ThetaMatrix::two_dim(0.1)));
    let op = format!(r#"{{"kind": "differential", "terms": [{{"alpha": [0, 0], "coeff": {}}}]}}"#, other.to_json());
    let (out, _) = apply(&dir, &op, &u);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn spectrum_of_the_flat_laplacian() {
    let dir = TempDir::new().unwrap();
    let op = put(&dir, "op.json", r#"{"kind": "flat_laplacian"}"#);
    let out_path = dir.path().join("spec.csv");
    let out = run(&["spectrum", "--op", s(&op), "--radius", "2", "--out", s(&out_path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut got: Vec<f64> = fs::read_to_string(&out_path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (re, im) = l.split_once(',').unwrap();
            assert_eq!(im.parse::<f64>().unwrap(), 0.0);
            re.parse().unwrap()
        })
        .collect();
    got.sort_by(f64::total_cmp);
    let mut expected: Vec<f64> = (-2i64..=2).flat_map(|a| (-2i64..=2).map(move |b| (a * a + b * b) as f64)).collect();
    expected.sort_by(f64::total_cmp);
    assert_eq!(got, expected);
}

fn bracket_table_1d(k: i64) -> String {
    let th = Arc::new(ThetaMatrix::zero(1));
    restrict(&JapaneseBracket::real(th, 2.0), k).unwrap().to_json().unwrap()
}

fn extend(dir: &TempDir, points: &str) -> (Output, PathBuf) {
    let table = put(dir, "table.json", &bracket_table_1d(12));
    let pts = put(dir, "points.json", points);
    let out = dir.path().join("samples.json");
    (run(&["extend", "--n", "1", "--table", s(&table), "--points", s(&pts), "--out", s(&out)]), out)
}

fn sample_values(path: &Path) -> Vec<(f64, f64)> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| {
            let e: AlgebraElement = AlgebraElement::from_json(&s["element"].to_string()).unwrap();
            (s["xi"][0].as_f64().unwrap(), e.coeff(&MultiIndex::zeros(1)).re)
        })
        .collect()
}

#[test]
fn extension_reproduces_lattice_values() {
    let dir = TempDir::new().unwrap();
    let inner = 12 - DEFAULT_MARGIN;
    let pts: Vec<Vec<f64>> = (-inner..=inner).map(|k| vec![k as f64]).collect();
    let (out, path) = extend(&dir, &serde_json::to_string(&pts).unwrap());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for (xi, v) in sample_values(&path) {
        assert!((v - (1.0 + xi * xi)).abs() < 1e-7, "{xi}: {v}");
    }
}

#[test]
fn empty_sample_list() {
    let dir = TempDir::new().unwrap();
    let (out, path) = extend(&dir, "[]");
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(path).unwrap(), "[]");
}

#[test]
fn out_of_window_points_are_listed() {
    let dir = TempDir::new().unwrap();
    let (out, path) = extend(&dir, "[[0.5], [11.5], [-30.0]]");
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("#1") && err.contains("#2") && !err.contains("#0"), "{err}");
    assert!(!path.exists());
}

/// Midpoint values against the neighbouring lattice values. With `c` the mean
/// of the two neighbours, `ρ̃(ξ) - c = Σ_j φ_1(ξ-j)(ρ_j - c)` bounds how far the
/// extension can leave the interval between them.
#[test]
fn midpoints_stay_between_neighbours_up_to_overshoot() {
    let dir = TempDir::new().unwrap();
    let inner = 12 - DEFAULT_MARGIN;
    let pts: Vec<Vec<f64>> = (-inner..inner).map(|k| vec![k as f64 + 0.5]).collect();
    let (out, path) = extend(&dir, &serde_json::to_string(&pts).unwrap());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let kernel = build_kernel(32).unwrap();
    let rho = |j: i64| if j.abs() <= 12 { 1.0 + (j * j) as f64 } else { 0.0 };
    let mut worst_excess: f64 = 0.0;
    for (xi, v) in sample_values(&path) {
        let k = xi.floor() as i64;
        let (lo, hi) = (rho(k).min(rho(k + 1)), rho(k).max(rho(k + 1)));
        let c = 0.5 * (lo + hi);
        let spread: f64 = (-12..=12).map(|j| kernel.phi1(xi - j as f64).abs() * (rho(j) - c).abs()).sum();
        let bound = spread - 0.5 * (hi - lo) + 1e-9;
        let excess = (lo - v).max(v - hi).max(0.0);
        worst_excess = worst_excess.max(excess);
        assert!(excess <= bound, "ξ = {xi}: value {v}, neighbours [{lo}, {hi}], overshoot bound {bound}");
    }
    println!("largest midpoint overshoot: {worst_excess:e}");
}
