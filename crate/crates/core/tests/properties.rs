use num_traits::One;
use polar_core::rat::{int, rat};
use polar_core::{
    expand_roots, gradient_exponent_complex, parse_poly, polar_quotients, relative_diagram,
    roots::nonzero_roots, slide, BivarPoly, Coefficient, ExtRat, NumericContext, PuiseuxSeries,
    Rat, Route, Settings,
};
use proptest::prelude::*;

/// `(x - P(y))^q - b y^p`: one branch `x = P(y) + b^(1/q) y^(p/q)` with its conjugates.
fn branch_factor(prefix: usize, b: i64, p: u32, q: u32) -> BivarPoly {
    let prefixes: [&[(u32, i64)]; 3] = [&[], &[(1, 1)], &[(1, -1), (2, 2)]];
    let mut xp = BivarPoly::x();
    for (e, c) in prefixes[prefix] {
        xp = xp.sub(&BivarPoly::monomial(Coefficient::from(*c), 0, *e));
    }
    xp.pow(q)
        .sub(&BivarPoly::monomial(Coefficient::from(b), 0, p))
}

#[derive(Debug, Clone)]
struct Spec {
    prefix: usize,
    b: i64,
    p: u32,
    q: u32,
    m: u32,
}

fn spec() -> impl Strategy<Value = Spec> {
    (
        0..3usize,
        prop_oneof![-3i64..=-1, 1i64..=3],
        1..=3u32,
        0..3u32,
        1..=2u32,
    )
        .prop_map(|(prefix, b, q, k, m)| {
            // smallest p >= q + k coprime to q
            let mut p = q + k;
            while num_integer::gcd(p, q) != 1 {
                p += 1;
            }
            Spec { prefix, b, p, q, m }
        })
}

fn product(specs: &[Spec]) -> BivarPoly {
    specs
        .iter()
        .fold(BivarPoly::constant(Coefficient::one()), |f, s| {
            f.mul(&branch_factor(s.prefix, s.b, s.p, s.q).pow(s.m))
        })
}

fn settings(seed: u64) -> Settings {
    Settings {
        seed,
        ..Settings::default()
    }
}

proptest! {
    // no source file to anchor a regressions directory next to
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn multiplicities_add_up(specs in prop::collection::vec(spec(), 1..=3)) {
        let f = product(&specs);
        let set = expand_roots(&f, &int(4), NumericContext::default()).unwrap();
        let total: u32 = set.branches.iter().map(|b| b.multiplicity).sum();
        prop_assert_eq!(total, f.x_degree());
        prop_assert_eq!(set.m, f.x_degree());
        for b in &set.branches {
            prop_assert!(b.series.order() >= ExtRat::Finite(Rat::one()));
        }
    }

    #[test]
    fn exact_roots_annihilate(specs in prop::collection::vec(spec(), 1..=3)) {
        let f = product(&specs);
        let set = expand_roots(&f, &int(4), NumericContext::default()).unwrap();
        for b in set.branches.iter().filter(|b| b.series.is_exact()) {
            prop_assert!(f.substitute(&b.series).is_zero());
        }
    }

    #[test]
    fn routes_agree(specs in prop::collection::vec(spec(), 2..=3)) {
        let f = product(&specs);
        let a = polar_quotients(&f, Route::PolarBranches, &settings(1)).unwrap();
        let b = polar_quotients(&f, Route::Approximations, &settings(1)).unwrap();
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn unit_does_not_change_exponent(specs in prop::collection::vec(spec(), 1..=2)) {
        let f = product(&specs);
        let u = parse_poly("1 + x + y").unwrap();
        let a = gradient_exponent_complex(&f, &settings(0)).unwrap();
        let b = gradient_exponent_complex(&f.mul(&u), &settings(0)).unwrap();
        prop_assert_eq!(a.l, b.l);
    }

    #[test]
    fn shear_does_not_change_exponent(specs in prop::collection::vec(spec(), 1..=2), c in 1i64..=3) {
        let f = product(&specs);
        let a = gradient_exponent_complex(&f, &settings(0)).unwrap();
        let b = gradient_exponent_complex(&f.shear(&Coefficient::from(rat(c, 2))), &settings(0)).unwrap();
        prop_assert_eq!(a.l, b.l);
    }

    #[test]
    fn output_is_deterministic(specs in prop::collection::vec(spec(), 1..=2), seed in 0u64..1000) {
        let f = product(&specs);
        let a = gradient_exponent_complex(&f, &settings(seed)).unwrap().to_json().to_string();
        let b = gradient_exponent_complex(&f, &settings(seed)).unwrap().to_json().to_string();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn exponent_within_bounds(specs in prop::collection::vec(spec(), 1..=3)) {
        let f = product(&specs);
        let r = gradient_exponent_complex(&f, &settings(0)).unwrap();
        let m = r.m as i64;
        prop_assert!(r.l >= rat(m - 1, m));
        prop_assert!(r.l < Rat::one());
        prop_assert!(r.bounds.satisfied);
    }

    #[test]
    fn sliding_never_lowers_height(specs in prop::collection::vec(spec(), 1..=2), a in 1i64..=5, e in 1i64..=3) {
        let f = product(&specs);
        let phi = PuiseuxSeries::monomial(Coefficient::from(rat(a, 7)), int(e));
        let d = relative_diagram(&f, &phi).unwrap();
        prop_assume!(!d.h0.is_infinite());
        let Some(edge) = d.highest_edge() else { return Ok(()) };
        let (roots, _) = nonzero_roots(&edge.poly, NumericContext::default());
        // sliding is defined for exact roots only
        for r in roots.iter().filter(|r| r.value.is_exact()) {
            let next = slide(&f, &phi, &r.value).unwrap();
            let h = relative_diagram(&f, &next).unwrap().h0;
            prop_assert!(h > d.h0);
        }
    }
}
