use std::process::{Command, Output};

fn polarcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let o = polarcalc(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn polygon_slopes() {
    let o = polarcalc(&["polygon", "x^3 - y^4 + y^5", "--arc", "x = y^(4/3)"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("tan_theta = 4/3"), "{s}");
    assert!(s.contains("tan_theta = 7/3"), "{s}");
}

#[test]
fn json_header() {
    let v = json(&[
        "--seed",
        "7",
        "--field",
        "real",
        "lojasiewicz",
        "x^3 + 3*x*y^3",
    ]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "lojasiewicz");
    assert_eq!(v["field"], "real");
    assert_eq!(v["seed"], 7);
    assert!(v["input"].is_object() || v["input"].is_string());
    assert_eq!(v["L"], "7/9");
}

#[test]
fn leading_minus_is_a_polynomial() {
    let o = polarcalc(&["lojasiewicz", "-3*x^4 + y^4 - x*y^5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn output_is_byte_stable() {
    let args = [
        "--format",
        "json",
        "--seed",
        "3",
        "quotients",
        "(x^2 - y^2)*(x^2 - y^4)",
    ];
    let a = polarcalc(&args);
    let b = polarcalc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(polarcalc(&["bounds", "x^2 - y^3"]).status.code(), Some(0));
    // syntax, unit, tangent arc, bad option value
    assert_eq!(polarcalc(&["roots", "x^"]).status.code(), Some(2));
    assert_eq!(polarcalc(&["lojasiewicz", "1 + x"]).status.code(), Some(2));
    let tangent = polarcalc(&["estimate", "x^2 - y^3", "--arc", "x = y^(1/2)"]);
    assert_eq!(tangent.status.code(), Some(2));
    assert!(!tangent.stderr.is_empty());
    assert_eq!(
        polarcalc(&["--depth", "-1", "roots", "x^2 - y^3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn imult_reports_infinity() {
    let s = stdout(&polarcalc(&["imult", "x^2 - y^3", "x^2 - y^3"]));
    assert!(s.to_lowercase().contains("inf"), "{s}");
}
