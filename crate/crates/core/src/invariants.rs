//! Polar quotients, gradient exponents, intersection multiplicities and
//! degree bounds.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::approx::NumericContext;
use crate::error::{Error, Result};
use crate::expr::format_arc;
use crate::generic::{GenericConstant, GenericSampler};
use crate::newton::certified_heights;
use crate::poly::BivarPoly;
use crate::puiseux::{
    approximation, approximation_constant, depth_cap, ell_from, expand_roots, mini_regularize,
    polar_branches, real_polar_branches, start_depth, Branch, BranchSet,
};
use crate::rat::{fmt_rat, int, ExtRat, Rat};
use crate::series::PuiseuxSeries;
use crate::squarefree::gcd_x;

/// Knobs shared by every invariant computation.
#[derive(Clone, Debug)]
pub struct Settings {
    pub ctx: NumericContext,
    pub seed: u64,
    /// Starting expansion depth; deepened automatically.
    pub depth: Option<Rat>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            ctx: NumericContext::default(),
            seed: 0,
            depth: None,
        }
    }
}

impl Settings {
    fn depth(&self) -> Rat {
        self.depth.clone().unwrap_or_else(start_depth)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    PolarBranches,
    Approximations,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Witness {
    Branch(Branch),
    /// Roots `i < j` and their approximation.
    Pair {
        i: usize,
        j: usize,
        arc: PuiseuxSeries,
    },
}

impl Witness {
    pub fn to_json(&self) -> Value {
        match self {
            Witness::Branch(b) => json!({"polar_branch": format_arc(&b.series)}),
            Witness::Pair { i, j, arc } => {
                json!({"roots": [i, j], "approximation": format_arc(arc)})
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuotientSet {
    pub values: Vec<Rat>,
    pub witnesses: BTreeMap<Rat, Witness>,
    pub route: Route,
}

impl QuotientSet {
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.values
                .iter()
                .map(|v| {
                    json!({
                        "value": fmt_rat(v),
                        "witness": self.witnesses.get(v).map(Witness::to_json),
                    })
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeBounds {
    pub gradient: Rat,
    pub classical: Rat,
    pub classical_via_l: Rat,
    pub satisfied: bool,
}

/// Bounds for a degree-`d` polynomial with gradient exponent `l < 1`.
pub fn degree_bounds(d: u32, l: &Rat) -> DegreeBounds {
    let d1 = int(d as i64 - 1);
    let classical = &d1 * &d1 + Rat::one();
    let gradient = Rat::one() - classical.recip();
    let classical_via_l = (Rat::one() - l).recip();
    let satisfied = l <= &gradient && classical_via_l <= classical;
    DegreeBounds {
        gradient,
        classical,
        classical_via_l,
        satisfied,
    }
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub field: Field,
    pub m: u32,
    pub d: u32,
    pub shear: GenericConstant,
    pub quotients: QuotientSet,
    pub l: Rat,
    pub l_plus: Option<Rat>,
    pub l_minus: Option<Rat>,
    pub witness: Option<Branch>,
    pub bounds: DegreeBounds,
    pub certificates: Vec<String>,
    pub tolerance_decisions: usize,
}

impl InvariantReport {
    pub fn to_json(&self) -> Value {
        let opt = |r: &Option<Rat>| r.as_ref().map(fmt_rat);
        json!({
            "field": self.field.name(),
            "seed": self.shear.seed,
            "shear": self.shear.value.to_string(),
            "m": self.m,
            "d": self.d,
            "quotients": self.quotients.to_json(),
            "L": fmt_rat(&self.l),
            "L_plus": opt(&self.l_plus),
            "L_minus": opt(&self.l_minus),
            "witness": self.witness.as_ref().map(|b| format_arc(&b.series)),
            "bounds": {
                "gradient": fmt_rat(&self.bounds.gradient),
                "classical": fmt_rat(&self.bounds.classical),
                "classical_via_L": fmt_rat(&self.bounds.classical_via_l),
                "satisfied": self.bounds.satisfied,
            },
            "certificates": self.certificates,
            "tolerance_decisions": self.tolerance_decisions,
        })
    }
}

fn validate(f: &BivarPoly) -> Result<()> {
    if !f.is_exact() {
        return Err(Error::NonExactInput);
    }
    if f.is_zero() {
        return Err(Error::InvalidInput("f is the zero polynomial".into()));
    }
    if !f.vanishes_at_origin() {
        return Err(Error::InvalidInput(
            "f does not vanish at the origin".into(),
        ));
    }
    Ok(())
}

/// `min((h0-1)/h0, h1/h0)` along `phi`.
pub fn ell_of_arc(f: &BivarPoly, phi: &PuiseuxSeries) -> Result<Rat> {
    if phi.order() < ExtRat::Finite(Rat::one()) {
        return Err(Error::TangentArc);
    }
    let h = certified_heights(f, phi);
    let h0 = match h.h0 {
        Ok(ExtRat::Finite(h0)) => h0,
        Ok(ExtRat::Infinity) => return Err(Error::PhiIsRoot),
        Err(fl) => {
            return Err(Error::TruncationTooShallow(format!(
                "ord f along the arc is not certified below y^{}",
                fmt_rat(&fl)
            )))
        }
    };
    ell_from(&h0, &h.h1)
        .ok_or_else(|| Error::TruncationTooShallow("ord f_x along the arc is not certified".into()))
}

/// `sum_k m_k min(contact(i,k), contact(j,k))`.
fn pair_value(roots: &BranchSet, i: usize, j: usize) -> Rat {
    let mut v = Rat::zero();
    for (k, b) in roots.branches.iter().enumerate() {
        let c = roots.contact[i][k].clone().min(roots.contact[j][k].clone());
        let c = c.into_finite().expect("distinct roots have finite contact");
        v += c * int(b.multiplicity as i64);
    }
    v
}

/// Records the smallest serialized witness per value.
fn add_witness(map: &mut BTreeMap<Rat, Witness>, v: Rat, w: Witness, key: String) {
    let old = map.get(&v).map(|w| match w {
        Witness::Branch(b) => format_arc(&b.series),
        Witness::Pair { arc, .. } => format_arc(arc),
    });
    if old.is_none_or(|o| key < o) {
        map.insert(v, w);
    }
}

/// Everything the complex route needs, computed once in the regularized
/// coordinates.
struct Complex {
    f: BivarPoly,
    shear: GenericConstant,
    m: u32,
    polar: BranchSet,
    roots: BranchSet,
    sampler: GenericSampler,
}

impl Complex {
    fn new(f: &BivarPoly, s: &Settings) -> Result<Self> {
        validate(f)?;
        let mut sampler = GenericSampler::new(s.seed);
        let (fs, shear, m) = mini_regularize(f, &mut sampler)?;
        let polar = polar_branches(&fs, &s.depth(), s.ctx)?;
        let roots = expand_roots(&fs, &s.depth(), s.ctx)?;
        Ok(Complex {
            f: fs,
            shear,
            m,
            polar,
            roots,
            sampler,
        })
    }

    fn by_polar(&self) -> QuotientSet {
        let mut witnesses = BTreeMap::new();
        for b in &self.polar.branches {
            let v = b.ord_f.clone().expect("polar branches carry ord f");
            add_witness(
                &mut witnesses,
                v,
                Witness::Branch(b.clone()),
                format_arc(&b.series),
            );
        }
        QuotientSet {
            values: witnesses.keys().cloned().collect(),
            witnesses,
            route: Route::PolarBranches,
        }
    }

    /// Pair values, each checked by substituting a fresh approximation.
    fn by_approximations(&mut self) -> Result<QuotientSet> {
        let mut witnesses = BTreeMap::new();
        let n = self.roots.len();
        for i in 0..n {
            for j in i + 1..n {
                let v = pair_value(&self.roots, i, j);
                let (bi, bj) = (&self.roots.branches[i], &self.roots.branches[j]);
                let g = approximation_constant(&self.f, bi, bj, &mut self.sampler)?;
                let arc = approximation(bi, bj, &g)?;
                let direct = certified_heights(&self.f, &arc).h0;
                if direct != Ok(ExtRat::Finite(v.clone())) {
                    let seen = match direct {
                        Ok(h) => h.to_text(),
                        Err(fl) => format!("uncertified below {}", fmt_rat(&fl)),
                    };
                    return Err(Error::RouteMismatch {
                        polar: vec![format!("substitution into {}: {seen}", format_arc(&arc))],
                        approximations: vec![fmt_rat(&v)],
                    });
                }
                let key = format_arc(&arc);
                add_witness(&mut witnesses, v, Witness::Pair { i, j, arc }, key);
            }
        }
        Ok(QuotientSet {
            values: witnesses.keys().cloned().collect(),
            witnesses,
            route: Route::Approximations,
        })
    }

    fn both(&mut self) -> Result<QuotientSet> {
        let p = self.by_polar();
        let a = self.by_approximations()?;
        if p.values != a.values {
            return Err(Error::RouteMismatch {
                polar: p.values.iter().map(fmt_rat).collect(),
                approximations: a.values.iter().map(fmt_rat).collect(),
            });
        }
        Ok(QuotientSet {
            route: Route::Both,
            ..p
        })
    }

    fn decisions(&self) -> usize {
        self.polar.tolerance_decisions + self.roots.tolerance_decisions
    }
}

/// The set of polar quotients of `f`.
pub fn polar_quotients(f: &BivarPoly, route: Route, s: &Settings) -> Result<QuotientSet> {
    let mut c = Complex::new(f, s)?;
    match route {
        Route::PolarBranches => Ok(c.by_polar()),
        Route::Approximations => c.by_approximations(),
        Route::Both => c.both(),
    }
}

/// Largest `ell` over branches, ties toward the smallest serialized arc.
fn best_branch<'a>(
    branches: impl Iterator<Item = &'a Branch>,
) -> Result<Option<(Rat, &'a Branch)>> {
    let mut best: Option<(Rat, &Branch)> = None;
    for b in branches {
        let l = b
            .ell
            .clone()
            .ok_or_else(|| Error::Internal("branch without a certified ell".into()))?;
        let better = match &best {
            None => true,
            Some((bl, bb)) => {
                l > *bl || (l == *bl && format_arc(&b.series) < format_arc(&bb.series))
            }
        };
        if better {
            best = Some((l, b));
        }
    }
    Ok(best)
}

fn lower_bound(m: u32) -> Rat {
    Rat::new(int(m as i64 - 1).to_integer(), int(m as i64).to_integer())
}

/// Gradient exponent over the complex numbers, cross-checked through root
/// pairs.
pub fn gradient_exponent_complex(f: &BivarPoly, s: &Settings) -> Result<InvariantReport> {
    let mut c = Complex::new(f, s)?;
    let m = c.m;
    let floor = lower_bound(m);
    for b in &c.polar.branches {
        let h0 = b.ord_f.clone().expect("certified");
        let l = b.ell.clone().expect("certified");
        if l != Rat::one() - h0.recip() || l < floor {
            return Err(Error::Internal(format!(
                "ell {} along {} breaks 1 - 1/ord f",
                fmt_rat(&l),
                format_arc(&b.series)
            )));
        }
    }
    let best = best_branch(c.polar.branches.iter())?;
    let (l, witness) = match best {
        Some((l, b)) => (l, Some(b.clone())),
        None => (floor.clone(), None),
    };
    let quotients = c.both()?;
    let mut certificates = vec![
        format!("shear c = {}, order m = {}", c.shear.value, m),
        format!("{} polar branches not dividing f", c.polar.len()),
        format!("{} distinct roots", c.roots.len()),
    ];
    if c.roots.len() >= 2 {
        let via_pairs = quotients
            .values
            .iter()
            .map(|q| Rat::one() - q.recip())
            .max()
            .expect("nonempty for two roots");
        if via_pairs != l {
            return Err(Error::ExponentMismatch(format!(
                "polar branches give {}, root pairs give {}",
                fmt_rat(&l),
                fmt_rat(&via_pairs)
            )));
        }
        certificates.push(format!("root-pair route agrees: {}", fmt_rat(&via_pairs)));
    } else if !c.polar.is_empty() {
        return Err(Error::ExponentMismatch(
            "single root but nonempty polar quotient set".into(),
        ));
    }
    let d = f.degree();
    Ok(InvariantReport {
        field: Field::Complex,
        m,
        d,
        shear: c.shear.clone(),
        quotients,
        bounds: degree_bounds(d, &l),
        l,
        l_plus: None,
        l_minus: None,
        witness,
        certificates,
        tolerance_decisions: c.decisions(),
    })
}

/// `max((m-1)/m, ell over real polar branches)`.
fn l_plus(
    f: &BivarPoly,
    m: u32,
    s: &Settings,
    sampler: &mut GenericSampler,
) -> Result<(Rat, Option<Branch>, BranchSet)> {
    let set = real_polar_branches(f, &s.depth(), sampler, s.ctx)?;
    let floor = lower_bound(m);
    let (l, w) = match best_branch(set.branches.iter())? {
        Some((l, b)) if l >= floor => (l, Some(b.clone())),
        _ => (floor, None),
    };
    Ok((l, w, set))
}

/// Gradient exponent over the reals: the larger of the two half-plane values.
pub fn gradient_exponent_real(f: &BivarPoly, s: &Settings) -> Result<InvariantReport> {
    validate(f)?;
    if !f.is_real() {
        return Err(Error::InvalidInput(
            "real mode needs real coefficients".into(),
        ));
    }
    let mut c = Complex::new(f, s)?;
    let quotients = c.both()?;
    let mut sampler = GenericSampler::new(s.seed);
    let (fs, shear, m) = mini_regularize(f, &mut sampler)?;
    let (lp, wp, plus) = l_plus(&fs, m, s, &mut sampler)?;
    let (lm, wm, minus) = l_plus(&fs.reflect_y(), m, s, &mut sampler)?;
    let (l, witness) = if lm > lp {
        (lm.clone(), wm)
    } else {
        (lp.clone(), wp)
    };
    let mut certificates = vec![
        format!("shear c = {}, order m = {}", shear.value, m),
        format!("{} real polar branches for y > 0", plus.len()),
        format!("{} real polar branches for y < 0", minus.len()),
    ];
    if !(plus.reality_certified && minus.reality_certified) {
        certificates.push("reality of some coefficients decided by tolerance".into());
    }
    let d = f.degree();
    Ok(InvariantReport {
        field: Field::Real,
        m,
        d,
        shear,
        quotients,
        bounds: degree_bounds(d, &l),
        l,
        l_plus: Some(lp),
        l_minus: Some(lm),
        witness,
        certificates,
        tolerance_decisions: c.decisions() + plus.tolerance_decisions + minus.tolerance_decisions,
    })
}

/// `i(f, g)`: the order of `g` along the roots of `f`, with multiplicity.
pub fn intersection_multiplicity(f: &BivarPoly, g: &BivarPoly, s: &Settings) -> Result<ExtRat> {
    validate(f)?;
    if !g.is_exact() {
        return Err(Error::NonExactInput);
    }
    if g.is_zero() {
        return Ok(ExtRat::Infinity);
    }
    if !g.vanishes_at_origin() {
        return Ok(ExtRat::zero());
    }
    let mut sampler = GenericSampler::new(s.seed);
    let (fs, c, _) = mini_regularize(f, &mut sampler)?;
    let gs = g.shear(&c.value);
    let h = gcd_x(&fs, &gs)?;
    if h.x_degree() > 0 && h.vanishes_at_origin() {
        return Ok(ExtRat::Infinity);
    }
    let cap = depth_cap(&fs);
    let mut depth = s.depth();
    'deepen: loop {
        let roots = expand_roots(&fs, &depth, s.ctx)?;
        let mut total = Rat::zero();
        for b in &roots.branches {
            match certified_heights(&gs, &b.series).h0 {
                Ok(ExtRat::Finite(h)) => total += h * int(b.multiplicity as i64),
                Ok(ExtRat::Infinity) => {
                    return Err(Error::Internal(
                        "root of f is a root of g without a common factor".into(),
                    ))
                }
                Err(_) if depth < cap => {
                    depth = (depth * int(2)).min(cap.clone());
                    continue 'deepen;
                }
                Err(_) => {
                    return Err(Error::TruncationTooShallow(format!(
                        "ord g along {}",
                        format_arc(&b.series)
                    )))
                }
            }
        }
        return Ok(ExtRat::Finite(total));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_arc, parse_poly};
    use crate::rat::rat;

    const EX42: &str = "1/6*x^6 + 1/4*x^4*y^4 - 1/5*x^5*y - 1/3*x^3*y^5";

    fn p(s: &str) -> BivarPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn ell_examples() {
        let f = p(EX42);
        assert_eq!(
            ell_of_arc(&f, &parse_arc("x = y").unwrap()).unwrap(),
            rat(5, 6)
        );
        assert_eq!(
            ell_of_arc(&f, &parse_arc("x = i*y^2").unwrap()).unwrap(),
            rat(10, 11)
        );
        let g = p("x^3 + 3*x*y^3");
        assert_eq!(
            ell_of_arc(&g, &parse_arc("x = 2*y^(3/2)").unwrap()).unwrap(),
            rat(2, 3)
        );
        assert!(matches!(
            ell_of_arc(&f, &parse_arc("x = y^(1/2)").unwrap()),
            Err(Error::TangentArc)
        ));
    }

    #[test]
    fn quotients_by_both_routes() {
        let s = Settings::default();
        let q = polar_quotients(&p(EX42), Route::Both, &s).unwrap();
        assert_eq!(q.values, vec![int(6), int(11)]);
        let q = polar_quotients(&p("(x^2 - y^2)*(x^2 - y^4)"), Route::Both, &s).unwrap();
        assert_eq!(q.values, vec![int(4), int(6)]);
        let q = polar_quotients(&p("x^5"), Route::Both, &s).unwrap();
        assert!(q.values.is_empty());
    }

    #[test]
    fn complex_exponents() {
        let s = Settings::default();
        let r = gradient_exponent_complex(&p(EX42), &s).unwrap();
        assert_eq!(r.l, rat(10, 11));
        assert_eq!(r.d, 8);
        assert_eq!(r.bounds.gradient, rat(49, 50));
        assert!(r.bounds.satisfied);
        assert_eq!(
            gradient_exponent_complex(&p("x^3 + y^3"), &s).unwrap().l,
            rat(2, 3)
        );
        assert_eq!(
            gradient_exponent_complex(&p("x^4"), &s).unwrap().l,
            rat(3, 4)
        );
        assert_eq!(
            gradient_exponent_complex(&p("x"), &s).unwrap().l,
            Rat::zero()
        );
        assert_eq!(
            gradient_exponent_complex(&p("(x^2 - y^2)*(x^2 - y^4)"), &s)
                .unwrap()
                .l,
            rat(5, 6)
        );
    }

    #[test]
    fn real_exponents() {
        let s = Settings::default();
        let r = gradient_exponent_real(&p("x^3 + 3*x*y^3"), &s).unwrap();
        assert_eq!(r.l_plus, Some(rat(2, 3)));
        assert_eq!(r.l_minus, Some(rat(7, 9)));
        assert_eq!(r.l, rat(7, 9));
        assert_eq!(r.bounds.classical_via_l, rat(9, 2));
        assert_eq!(
            gradient_exponent_real(&p("x^2 - y^3"), &s).unwrap().l,
            rat(2, 3)
        );
        assert_eq!(
            gradient_exponent_real(&p("x^2 - y^5"), &s).unwrap().l,
            rat(4, 5)
        );
    }

    #[test]
    fn intersections() {
        let s = Settings::default();
        let f = p("x^2 - y^3");
        assert_eq!(
            intersection_multiplicity(&f, &p("y"), &s).unwrap(),
            ExtRat::Finite(int(2))
        );
        assert_eq!(
            intersection_multiplicity(&p("x"), &p("y"), &s).unwrap(),
            ExtRat::Finite(int(1))
        );
        assert_eq!(
            intersection_multiplicity(&f, &f, &s).unwrap(),
            ExtRat::Infinity
        );
        assert_eq!(
            intersection_multiplicity(&f, &p("1 + x"), &s).unwrap(),
            ExtRat::zero()
        );
    }

    #[test]
    fn bounds_for_degree_six() {
        let b = degree_bounds(6, &rat(10, 11));
        assert_eq!(b.gradient, rat(25, 26));
        assert!(b.satisfied);
    }

    #[test]
    fn bounds_for_a_line() {
        let b = degree_bounds(1, &Rat::zero());
        assert_eq!(b.gradient, Rat::zero());
        assert!(b.satisfied);
    }
}
