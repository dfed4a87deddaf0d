use std::path::PathBuf;
use std::process::{Command, Output};

use kissing::report::Report;

fn kissing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kissing")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Report {
    Report::parse(&String::from_utf8_lossy(&out.stdout)).expect("structured report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kissing-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn expand_builtin_is_exact_and_deterministic() {
    let a = kissing(&["expand", "--builtin", "f4"]);
    let b = kissing(&["expand", "--builtin", "f4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r.get("c.2"), Some("153/25"));
    assert_eq!(r.get("c.9"), Some("21/20"));
    assert!(r.get("tool").unwrap().starts_with("kissing "));
}

#[test]
fn certify_names_the_failing_stage() {
    let p = scratch("linear.txt");
    std::fs::write(&p, "# 1 + t\n1\n1 1\n").unwrap();
    let out = kissing(&["certify", "--poly", p.to_str().unwrap(), "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out).get("failed_stage"), Some("certify_phi_star"));
}

#[test]
fn invalid_input_exit_code() {
    assert_eq!(kissing(&["certify", "--builtin", "f4", "--z", "3/2"]).status.code(), Some(3));
    assert_eq!(kissing(&["certify", "--builtin", "nope"]).status.code(), Some(3));
    assert_eq!(kissing(&["certify", "--poly", "/nonexistent/poly.txt", "--n", "4"]).status.code(), Some(3));
    let out = kissing(&["hbound", "--builtin", "f4", "--m", "7"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn search_with_constant_polynomial_is_infeasible() {
    let out = kissing(&["search", "--n", "4", "-d", "0", "--grid", "100"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn search_writes_polynomial_and_trace() {
    let poly = scratch("found.txt");
    let log = scratch("trace.txt");
    let rep = scratch("search.txt");
    let out = kissing(&[
        "search",
        "--n",
        "4",
        "-d",
        "9",
        "--poly-out",
        poly.to_str().unwrap(),
        "--log",
        log.to_str().unwrap(),
        "-o",
        rep.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.get("assumption.z"), Some("1/2 (minimal angle 60 degrees)"));
    assert_eq!(r.get("config.shift"), Some("1/1000000"));
    let e = r.get_f64("E").unwrap();
    assert!(e > 24.5 && e < 25.0, "{e}");
    assert!(r.get("refined.E").is_some());
    assert_eq!(std::fs::read(&rep).unwrap(), out.stdout);
    let f = kissing::polyalg::Polynomial::parse_text(&std::fs::read_to_string(&poly).unwrap()).unwrap();
    assert_eq!(f.degree(), 9);
    assert!(std::fs::read_to_string(&log).unwrap().lines().count() > 10);
}

#[test]
fn t0_scan_table() {
    let out = kissing(&["search", "--n", "4", "-d", "9", "--grid", "300", "--scan-t0", "0.55:0.65:0.005"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let rows: Vec<f64> = r
        .entries()
        .iter()
        .filter(|(k, _)| k.starts_with("E."))
        .filter_map(|(_, v)| v.parse().ok())
        .collect();
    assert_eq!(rows.len(), 21);
}

#[test]
fn hbound_small_m() {
    let out = kissing(&["hbound", "--builtin", "f4", "--m", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out).get("h.0.exact"), Some("9387/500"));
    let out = kissing(&["hbound", "--builtin", "f4", "--m", "1"]);
    assert_eq!(report(&out).get("h.1.exact"), Some("612/25"));
}

#[test]
fn hbound_five_and_six() {
    let out = kissing(&["hbound", "--builtin", "f4", "--m", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r.get_f64("h.5.value").unwrap() - 24.6856).abs() < 1e-2);
    assert!((r.get_f64("h.5.maximizer.alpha_deg").unwrap() - 60.0).abs() < 1.0);

    let out = kissing(&["hbound", "--builtin", "f4", "--m", "6", "--theta0-prime", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r.get_f64("h.6.value").unwrap() - 24.7762).abs() < 1e-2);
    assert_eq!(r.get("config.theta0_prime_deg"), Some("50"));
}
