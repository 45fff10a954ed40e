use polar_core::rat::{fmt_rat, int, rat};
use polar_core::{
    degree_bounds, ell_of_arc, expand_roots, format_arc, gradient_exponent_complex,
    gradient_exponent_real, intersection_multiplicity, parse_arc, parse_poly, polar_quotients,
    relative_diagram, slide_to_stability, Error, ExtRat, NumericContext, Route, Settings,
};

fn s() -> Settings {
    Settings::default()
}

#[test]
fn parse_polygon_slide_ell() {
    let f = parse_poly("x^3 - y^4 + y^5").unwrap();
    let phi = parse_arc("x = y^(4/3)").unwrap();
    let d = relative_diagram(&f, &phi).unwrap();
    assert_eq!(d.h0, ExtRat::Finite(int(5)));
    let tans: Vec<String> = d.edges.iter().map(|e| fmt_rat(&e.tan_theta)).collect();
    assert_eq!(tans, ["4/3", "7/3"]);

    let (prefix, h0) = slide_to_stability(&f, &parse_arc("x = 2*y").unwrap()).unwrap();
    assert!(h0 >= int(3));
    assert!(ell_of_arc(&f, &prefix).is_ok());
}

#[test]
fn roots_of_a_cusp_are_conjugate() {
    let f = parse_poly("x^2 - y^3").unwrap();
    let set = expand_roots(&f, &int(4), NumericContext::default()).unwrap();
    let mut arcs: Vec<String> = set.branches.iter().map(|b| format_arc(&b.series)).collect();
    arcs.sort();
    assert_eq!(arcs, ["x = -y^(3/2)", "x = y^(3/2)"]);
}

#[test]
fn routes_agree_on_sextic() {
    let f = parse_poly("1/6*x^6 + 1/4*x^4*y^4 - 1/5*x^5*y - 1/3*x^3*y^5").unwrap();
    let a = polar_quotients(&f, Route::PolarBranches, &s()).unwrap();
    let b = polar_quotients(&f, Route::Approximations, &s()).unwrap();
    assert_eq!(a.values, b.values);
    assert!(polar_quotients(&f, Route::Both, &s()).is_ok());
}

#[test]
fn complex_and_real_reports() {
    let f = parse_poly("x^3 + 3*x*y^3").unwrap();
    let r = gradient_exponent_real(&f, &s()).unwrap();
    assert_eq!(r.l, rat(7, 9));
    assert!(r.bounds.satisfied);
    let c = gradient_exponent_complex(&f, &s()).unwrap();
    assert!(c.l >= r.l);
    let j = r.to_json();
    for key in [
        "L",
        "L_plus",
        "L_minus",
        "quotients",
        "bounds",
        "seed",
        "shear",
    ] {
        assert!(j.get(key).is_some(), "{key}");
    }
}

#[test]
fn smooth_curve_has_zero_exponent() {
    let r = gradient_exponent_complex(&parse_poly("x + y^2").unwrap(), &s()).unwrap();
    assert_eq!(r.l, int(0));
}

#[test]
fn bounds_table() {
    let b = degree_bounds(6, &rat(10, 11));
    assert_eq!(b.gradient, rat(25, 26));
    assert!(b.satisfied);
}

#[test]
fn intersection_numbers() {
    let f = parse_poly("x^2 - y^3").unwrap();
    let i = |g: &str| intersection_multiplicity(&f, &parse_poly(g).unwrap(), &s()).unwrap();
    assert_eq!(i("x"), ExtRat::Finite(int(3)));
    assert_eq!(i("y"), ExtRat::Finite(int(2)));
    assert_eq!(i("x^2 - y^3"), ExtRat::Infinity);
    assert_eq!(i("1 + x"), ExtRat::Finite(int(0)));
}

#[test]
fn input_errors() {
    assert!(matches!(
        gradient_exponent_complex(&parse_poly("1 + x").unwrap(), &s()),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(parse_poly("x^"), Err(Error::Syntax { .. })));
    assert!(matches!(
        parse_poly("x^(1/2)"),
        Err(Error::FractionalExponentInPolynomial { .. })
    ));
    let f = parse_poly("x^2 - y^3").unwrap();
    assert!(matches!(
        ell_of_arc(&f, &parse_arc("x = y^(1/2)").unwrap()),
        Err(Error::TangentArc)
    ));
}
