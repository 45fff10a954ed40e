//! Newton-Puiseux expansion by sliding, polar branches, approximations and
//! real polar branches.
//!
//! Roots are expanded per squarefree factor in `x`, so multiplicities come
//! from exact algebra. Each factor is walked as a tree: a node is an arc
//! together with the columns of `f(X + arc, Y)` and the number `k` of roots
//! still attached to it. Nodes with `k = 1` follow a single chain.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::approx::NumericContext;
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::expr::format_arc;
use crate::generic::{GenericConstant, GenericSampler};
use crate::newton::{budget_cap, certified_heights, lower_chain, relative_diagram, Expansion};
use crate::poly::BivarPoly;
use crate::rat::{denom_u64, fmt_rat, int, lcm_u64, rat, ExtRat, Rat};
use crate::roots::{derivative, eval_coeffs, nonzero_roots};
use crate::series::{contact_order, PuiseuxSeries};
use crate::squarefree::{div_x, gcd_x, squarefree_decompose_x};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchSource {
    RootOfF,
    Polar,
    RealPolar,
    Approximation,
}

impl BranchSource {
    pub fn name(self) -> &'static str {
        match self {
            BranchSource::RootOfF => "root",
            BranchSource::Polar => "polar",
            BranchSource::RealPolar => "real-polar",
            BranchSource::Approximation => "approximation",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub series: PuiseuxSeries,
    pub multiplicity: u32,
    pub source: BranchSource,
    /// Certified `ord f` along the branch, for polar sources.
    pub ord_f: Option<Rat>,
    /// Arc exponent of the branch, when `ord_f` is known.
    pub ell: Option<Rat>,
}

impl Branch {
    fn new(series: PuiseuxSeries, multiplicity: u32, source: BranchSource) -> Self {
        Branch {
            series,
            multiplicity,
            source,
            ord_f: None,
            ell: None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "arc": format_arc(&self.series),
            "multiplicity": self.multiplicity,
            "source": self.source.name(),
        });
        if let Some(h) = &self.ord_f {
            v["ord_f"] = json!(fmt_rat(h));
        }
        if let Some(l) = &self.ell {
            v["ell"] = json!(fmt_rat(l));
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct BranchSet {
    pub branches: Vec<Branch>,
    pub contact: Vec<Vec<ExtRat>>,
    /// Shear applied before expansion, when the caller regularized.
    pub shear: Option<GenericConstant>,
    /// Order of the polynomial whose roots (or polar curve) were expanded.
    pub m: u32,
    /// Generic real constant used for truncated real polar branches.
    pub generic: Option<GenericConstant>,
    pub tolerance_decisions: usize,
    /// False when deciding that some coefficient is real relied on tolerance.
    pub reality_certified: bool,
}

impl BranchSet {
    fn new(branches: Vec<Branch>, contact: Vec<Vec<ExtRat>>, m: u32, decisions: usize) -> Self {
        BranchSet {
            branches,
            contact,
            shear: None,
            m,
            generic: None,
            tolerance_decisions: decisions,
            reality_certified: true,
        }
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let contact: Vec<Vec<String>> = self
            .contact
            .iter()
            .map(|row| row.iter().map(ExtRat::to_text).collect())
            .collect();
        json!({
            "branches": self.branches.iter().map(Branch::to_json).collect::<Vec<_>>(),
            "contact": contact,
            "m": self.m,
            "shear": self.shear.as_ref().map(|c| c.value.to_string()),
            "seed": self.shear.as_ref().map(|c| c.seed),
            "generic": self.generic.as_ref().map(|c| c.value.to_string()),
            "tolerance_decisions": self.tolerance_decisions,
            "reality_certified": self.reality_certified,
        })
    }
}

/// `16 d^2`, the deepest expansion order tried before giving up.
pub fn depth_cap(f: &BivarPoly) -> Rat {
    let d = f.degree().max(1) as i64;
    int(16 * d * d)
}

/// `2 d^2`.
pub fn default_depth(f: &BivarPoly) -> Rat {
    let d = f.degree().max(1) as i64;
    int(2 * d * d)
}

/// Starting depth for internal computations; deepened on demand.
const START_DEPTH: i64 = 2;

fn check_origin(f: &BivarPoly) -> Result<u32> {
    match f.order() {
        None => Err(Error::InvalidInput("f is the zero polynomial".into())),
        Some(0) => Err(Error::InvalidInput(
            "f does not vanish at the origin".into(),
        )),
        Some(m) => Ok(m),
    }
}

/// Order `m` of a mini-regular `f`.
fn regular_order(f: &BivarPoly) -> Result<u32> {
    let m = check_origin(f)?;
    if f.coeff(m, 0).is_none_or(Coefficient::is_zero) {
        return Err(Error::InvalidInput("f is not mini-regular in x".into()));
    }
    Ok(m)
}

/// Shears `f` to `f(x, y + c x)` so that `f_m(1, 0) != 0`; `c = 0` when that
/// already holds.
pub fn mini_regularize(
    f: &BivarPoly,
    sampler: &mut GenericSampler,
) -> Result<(BivarPoly, GenericConstant, u32)> {
    let m = check_origin(f)?;
    let fm = f.homogeneous_part(m);
    if fm.coeff(m, 0).is_some_and(|c| !c.is_zero()) {
        let c = GenericConstant::fixed(
            Coefficient::zero(),
            vec!["f_m(1,0) != 0".into()],
            sampler.seed(),
        );
        return Ok((f.clone(), c, m));
    }
    let one = Coefficient::one();
    let nonzero = |c: &Coefficient| !fm.eval(&one, c).is_zero();
    let c = sampler.pick("shear", &[("f_m(1,c) != 0".into(), &nonzero)])?;
    Ok((f.shear(&c.value), c, m))
}

struct Node {
    arc: PuiseuxSeries,
    exp: Expansion,
    k: usize,
}

/// Root expansion of one squarefree factor.
struct Walker<'a> {
    g: &'a BivarPoly,
    depth: Rat,
    cap: Rat,
    ctx: NumericContext,
    decisions: usize,
}

impl Walker<'_> {
    fn too_shallow(&self, what: &str) -> Error {
        Error::TruncationTooShallow(format!(
            "{what} not resolved within budget y^{}",
            fmt_rat(&self.cap)
        ))
    }

    fn grow(&self, node: &mut Node) -> Result<()> {
        let b = match node.exp.budget() {
            ExtRat::Finite(b) => b.clone(),
            ExtRat::Infinity => {
                return Err(Error::Internal("complete expansion cannot grow".into()))
            }
        };
        if b >= self.cap {
            return Err(self.too_shallow("root expansion"));
        }
        let nb = (b * int(2)).min(self.cap.clone());
        node.exp = Expansion::along(self.g, &node.arc, ExtRat::Finite(nb));
        Ok(())
    }

    fn roots(&mut self) -> Result<Vec<PuiseuxSeries>> {
        let g = self.g;
        let k0 = (0..=g.x_degree()).find(|&i| g.coeff(i, 0).is_some_and(|c| !c.is_zero()));
        let k0 = match k0 {
            Some(0) => return Ok(Vec::new()),
            Some(k) => k as usize,
            None => return Err(Error::Internal("factor is divisible by y".into())),
        };
        let b0 = (&self.depth * int(2) + int(2)).max(int(8));
        let mut stack = vec![Node {
            arc: PuiseuxSeries::zero(),
            exp: Expansion::new(g, ExtRat::Finite(b0)),
            k: k0,
        }];
        let mut out = Vec::new();
        while let Some(mut node) = stack.pop() {
            if node.k == 1 {
                out.push(self.chain(node)?);
                continue;
            }
            let mut exact_root = false;
            while node.exp.low(0).is_infinite() {
                if node.exp.is_complete() {
                    // The arc is itself a (simple) root; the rest hang off X = 1.
                    if node.exp.low(1).is_infinite() {
                        return Err(Error::Internal(
                            "repeated root in a squarefree factor".into(),
                        ));
                    }
                    out.push(node.arc.clone());
                    exact_root = true;
                    break;
                }
                self.grow(&mut node)?;
            }
            if node.arc.max_exponent().is_some_and(|e| e >= &self.cap) {
                return Err(self.too_shallow("root separation"));
            }
            let points: Vec<(u32, Rat)> = (0..=node.k)
                .filter_map(|i| node.exp.low(i).into_finite().map(|h| (i as u32, h)))
                .collect();
            let exp = &node.exp;
            let edges = lower_chain(&points, node.k as u32, |i, h| {
                exp.coefficient(i as usize, h).cloned()
            });
            let mut count = usize::from(exact_root);
            for e in edges {
                let (roots, dec) = nonzero_roots(&e.poly, self.ctx);
                self.decisions += dec;
                for r in roots {
                    count += r.multiplicity;
                    let mut child = node.exp.clone();
                    child.shift(&r.value, &e.tan_theta);
                    stack.push(Node {
                        arc: node.arc.push_term(r.value, e.tan_theta.clone()),
                        exp: child,
                        k: r.multiplicity,
                    });
                }
            }
            if count != node.k {
                return Err(Error::Internal(format!(
                    "edge roots account for {count} of {} roots",
                    node.k
                )));
            }
        }
        Ok(out)
    }

    /// Follows a simple root: each step adds `-c0/c1 * y^(h0 - h1)`.
    fn chain(&mut self, mut node: Node) -> Result<PuiseuxSeries> {
        loop {
            let h1 = node
                .exp
                .low(1)
                .into_finite()
                .ok_or_else(|| Error::Internal("simple root without an X-linear dot".into()))?;
            match node.exp.low(0) {
                ExtRat::Finite(h0) => {
                    let rho = &h0 - &h1;
                    if rho >= self.depth {
                        return Ok(node.arc.with_truncation(ExtRat::Finite(rho)));
                    }
                    if rho >= self.cap {
                        return Err(self.too_shallow("root expansion"));
                    }
                    let c0 = node.exp.coefficient(0, &h0).expect("lowest dot");
                    let c1 = node.exp.coefficient(1, &h1).expect("lowest dot");
                    let c = c0.div(c1).neg();
                    node.exp.shift(&c, &rho);
                    node.arc = node.arc.push_term(c, rho);
                }
                ExtRat::Infinity => {
                    if node.exp.is_complete() {
                        return Ok(node.arc);
                    }
                    let b = node.exp.budget().finite().expect("incomplete").clone();
                    let t = &b - &h1;
                    if t >= self.depth {
                        return Ok(node.arc.with_truncation(ExtRat::Finite(t)));
                    }
                    self.grow(&mut node)?;
                }
            }
        }
    }
}

/// Roots of every factor, with the factor's multiplicity, sorted.
fn expand_factors(
    factors: &[(BivarPoly, u32)],
    depth: &Rat,
    ctx: NumericContext,
    source: BranchSource,
) -> Result<(Vec<Branch>, usize)> {
    let mut out = Vec::new();
    let mut decisions = 0;
    for (g, mult) in factors {
        let mut w = Walker {
            g,
            depth: depth.clone(),
            cap: budget_cap(g).max(depth * int(4) + int(8)),
            ctx,
            decisions: 0,
        };
        for s in w.roots()? {
            out.push(Branch::new(s, *mult, source));
        }
        decisions += w.decisions;
    }
    out.sort_by(|a, b| {
        a.series
            .cmp_key(&b.series)
            .then(a.multiplicity.cmp(&b.multiplicity))
    });
    Ok((out, decisions))
}

fn contact_matrix(branches: &[Branch]) -> Result<Vec<Vec<ExtRat>>> {
    let n = branches.len();
    let mut c = vec![vec![ExtRat::Infinity; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = contact_order(&branches[i].series, &branches[j].series)?;
            if v.is_infinite() {
                return Err(Error::Internal("two branches coincide".into()));
            }
            c[i][j] = v.clone();
            c[j][i] = v;
        }
    }
    Ok(c)
}

fn next_depth(depth: &Rat, cap: &Rat) -> Option<Rat> {
    (depth < cap).then(|| (depth * int(2)).min(cap.clone()))
}

/// All distinct Newton-Puiseux roots of a mini-regular `f`, truncated at
/// exponent at least `depth` and deepened until every pair separates.
pub fn expand_roots(f: &BivarPoly, depth: &Rat, ctx: NumericContext) -> Result<BranchSet> {
    if !f.is_exact() {
        return Err(Error::NonExactInput);
    }
    let m = regular_order(f)?;
    if depth <= &Rat::zero() {
        return Err(Error::InvalidInput("depth must be positive".into()));
    }
    let factors = squarefree_decompose_x(f)?;
    let cap = depth_cap(f).max(depth.clone());
    let mut depth = depth.clone();
    loop {
        let (branches, decisions) = expand_factors(&factors, &depth, ctx, BranchSource::RootOfF)?;
        match contact_matrix(&branches) {
            Ok(contact) => {
                let total: u32 = branches.iter().map(|b| b.multiplicity).sum();
                if total != m {
                    return Err(Error::Internal(format!(
                        "root multiplicities sum to {total}, order is {m}"
                    )));
                }
                return Ok(BranchSet::new(branches, contact, m, decisions));
            }
            Err(Error::IndeterminateContact { .. }) => match next_depth(&depth, &cap) {
                Some(d) => depth = d,
                None => {
                    return Err(Error::TruncationTooShallow(
                        "branches do not separate".into(),
                    ))
                }
            },
            Err(e) => return Err(e),
        }
    }
}

/// One sliding step: `phi + c y^(tan theta_H)` for a root `c` of the
/// highest-edge polynomial.
pub fn slide(
    f: &BivarPoly,
    phi: &PuiseuxSeries,
    root_choice: &Coefficient,
) -> Result<PuiseuxSeries> {
    let d = relative_diagram(f, phi)?;
    if d.h0.is_infinite() {
        return Err(Error::PhiIsRoot);
    }
    let edge = d
        .highest_edge()
        .ok_or_else(|| Error::InvalidInput("no compact edge meets X = 0".into()))?;
    if root_choice.is_zero() || !eval_coeffs(&edge.poly, root_choice).is_zero() {
        return Err(Error::NotARoot);
    }
    let t = phi.truncation().clone();
    // tan theta_H may equal or undercut a stored exponent, so add rather than append
    let term = PuiseuxSeries::monomial(root_choice.clone(), edge.tan_theta.clone());
    Ok(phi.stored().add(&term).with_truncation(t))
}

/// Certified `h0 = ord f(phi)` and the shortest prefix of `phi` that
/// certifies it: terms up to `tan theta_H`, truncated at the next stored
/// exponent (or `phi`'s own truncation).
pub fn slide_to_stability(f: &BivarPoly, phi: &PuiseuxSeries) -> Result<(PuiseuxSeries, Rat)> {
    let d = relative_diagram(f, phi)?;
    let h0 = match &d.h0 {
        ExtRat::Infinity => return Err(Error::PhiIsRoot),
        ExtRat::Finite(h) => h.clone(),
    };
    let tan = d
        .highest_edge()
        .map(|e| e.tan_theta.clone())
        .unwrap_or_else(Rat::zero);
    let next = phi
        .terms()
        .iter()
        .map(|(e, _)| e)
        .find(|e| **e > tan)
        .cloned();
    let t = match next {
        Some(e) => ExtRat::Finite(e),
        None => phi.truncation().clone(),
    };
    Ok((phi.with_truncation(t), h0))
}

/// `min((h0 - 1)/h0, h1/h0)`; an uncertified `h1` only bounded below by
/// `floor` is enough when `floor >= h0 - 1`.
pub(crate) fn ell_from(h0: &Rat, h1: &std::result::Result<ExtRat, Rat>) -> Option<Rat> {
    let a = (h0 - Rat::one()) / h0;
    match h1 {
        Ok(ExtRat::Infinity) => Some(a),
        Ok(ExtRat::Finite(h1)) => Some(a.min(h1 / h0)),
        Err(fl) => (fl >= &(h0 - Rat::one())).then_some(a),
    }
}

/// Attaches certified heights; `None` when the truncation is too shallow.
fn attach_heights(f: &BivarPoly, b: &mut Branch) -> Result<Option<usize>> {
    let h = certified_heights(f, &b.series);
    let h0 = match &h.h0 {
        Ok(ExtRat::Finite(h0)) => h0.clone(),
        Ok(ExtRat::Infinity) => {
            return Err(Error::Internal("kept polar branch is a root of f".into()))
        }
        Err(_) => return Ok(None),
    };
    match ell_from(&h0, &h.h1) {
        Some(l) => {
            b.ord_f = Some(h0);
            b.ell = Some(l);
            Ok(Some(h.tolerance_decisions))
        }
        None => Ok(None),
    }
}

type Factors = Vec<(BivarPoly, u32)>;

/// Squarefree factors of `f_x`, split into parts coprime to `f` and parts
/// dividing `f`.
fn split_polar(f: &BivarPoly) -> Result<(Factors, Factors)> {
    let mut keep = Vec::new();
    let mut drop = Vec::new();
    for (q, mu) in squarefree_decompose_x(&f.deriv_x())? {
        let c = gcd_x(&q, f)?;
        if c.x_degree() == 0 {
            keep.push((q, mu));
            continue;
        }
        let rest = div_x(&q, &c)?.ok_or_else(|| Error::Internal("gcd does not divide".into()))?;
        if rest.x_degree() > 0 {
            keep.push((rest, mu));
        }
        drop.push((c, mu));
    }
    Ok((keep, drop))
}

/// Polar branches that are not roots of `f`, each with certified `ord f`.
pub fn polar_branches(f: &BivarPoly, depth: &Rat, ctx: NumericContext) -> Result<BranchSet> {
    if !f.is_exact() {
        return Err(Error::NonExactInput);
    }
    let m = regular_order(f)?;
    if m < 2 {
        return Ok(BranchSet::new(Vec::new(), Vec::new(), m, 0));
    }
    let (keep, drop) = split_polar(f)?;
    let cap = depth_cap(f).max(depth.clone());
    let mut depth = depth.clone();
    'deepen: loop {
        let (mut branches, mut decisions) =
            expand_factors(&keep, &depth, ctx, BranchSource::Polar)?;
        let contact = match contact_matrix(&branches) {
            Ok(c) => c,
            Err(Error::IndeterminateContact { .. }) => match next_depth(&depth, &cap) {
                Some(d) => {
                    depth = d;
                    continue;
                }
                None => {
                    return Err(Error::TruncationTooShallow(
                        "polar branches do not separate".into(),
                    ))
                }
            },
            Err(e) => return Err(e),
        };
        for b in &mut branches {
            match attach_heights(f, b)? {
                Some(dec) => decisions += dec,
                None => match next_depth(&depth, &cap) {
                    Some(d) => {
                        depth = d;
                        continue 'deepen;
                    }
                    None => {
                        return Err(Error::TruncationTooShallow(format!(
                            "ord f along polar branch {}",
                            format_arc(&b.series)
                        )))
                    }
                },
            }
        }
        // Branches dividing f must show no certified dot on X = 0.
        let (gone, dec) = expand_factors(&drop, &depth, ctx, BranchSource::Polar)?;
        decisions += dec;
        for b in &gone {
            if let Ok(ExtRat::Finite(_)) = certified_heights(f, &b.series).h0 {
                return Err(Error::Internal(format!(
                    "polar branch {} divides f but has a dot on X = 0",
                    format_arc(&b.series)
                )));
            }
        }
        return Ok(BranchSet::new(branches, contact, m, decisions));
    }
}

/// Lowest-order face of `P(f, prefix)` at slope `s`, as coefficients of
/// absolute powers `z^i`.
pub(crate) fn face_poly(
    f: &BivarPoly,
    prefix: &PuiseuxSeries,
    s: &Rat,
) -> Result<Vec<Coefficient>> {
    let cap = budget_cap(f);
    let mut budget = if prefix.terms().len() <= 8 {
        ExtRat::Infinity
    } else {
        ExtRat::Finite(int(16))
    };
    loop {
        let e = Expansion::along(f, &prefix.stored(), budget.clone());
        let best = (0..e.width())
            .filter_map(|i| e.low(i).into_finite().map(|h| h + s * int(i as i64)))
            .min();
        let known = if e.is_complete() {
            ExtRat::Infinity
        } else {
            budget.clone()
        };
        if let Some(best) = best.filter(|b| ExtRat::Finite(b.clone()) < known) {
            let mut poly = vec![Coefficient::zero(); e.width()];
            for (i, slot) in poly.iter_mut().enumerate() {
                if let Some(h) = e.low(i).into_finite() {
                    if &h + s * int(i as i64) == best {
                        *slot = e.coefficient(i, &h).expect("lowest dot").clone();
                    }
                }
            }
            return Ok(poly);
        }
        budget = match budget {
            ExtRat::Finite(b) if b < cap => ExtRat::Finite((b * int(2)).min(cap.clone())),
            _ => {
                return Err(Error::TruncationTooShallow(format!(
                    "face of slope {}",
                    fmt_rat(s)
                )))
            }
        };
    }
}

/// Picks `g` for the `rho`-approximation of two roots of `f`: the face of
/// slope `rho` along the common prefix, and its derivative, must not vanish
/// at `g`.
pub fn approximation_constant(
    f: &BivarPoly,
    xi_i: &Branch,
    xi_j: &Branch,
    sampler: &mut GenericSampler,
) -> Result<GenericConstant> {
    let rho = contact_order(&xi_i.series, &xi_j.series)?
        .into_finite()
        .ok_or_else(|| Error::InvalidInput("branches coincide".into()))?;
    let prefix = PuiseuxSeries::from_terms(xi_i.series.prefix_below(&rho), ExtRat::Infinity)?;
    let face = face_poly(f, &prefix, &rho)?;
    let dface = derivative(&face);
    let e_ok = |g: &Coefficient| !eval_coeffs(&face, g).is_zero();
    let d_ok = |g: &Coefficient| !eval_coeffs(&dface, g).is_zero();
    sampler.pick(
        "approximation",
        &[
            (
                format!("E(g) != 0 on the face of slope {}", fmt_rat(&rho)),
                &e_ok,
            ),
            (
                format!("E'(g) != 0 on the face of slope {}", fmt_rat(&rho)),
                &d_ok,
            ),
        ],
    )
}

/// Common prefix of two branches below their contact order `rho`, plus
/// `g y^rho`, truncated just above `rho`.
pub fn approximation(xi_i: &Branch, xi_j: &Branch, g: &GenericConstant) -> Result<PuiseuxSeries> {
    let rho = contact_order(&xi_i.series, &xi_j.series)?
        .into_finite()
        .ok_or_else(|| Error::InvalidInput("branches coincide".into()))?;
    let n = [xi_i.series.denom(), xi_j.series.denom(), denom_u64(&rho)]
        .into_iter()
        .fold(1, lcm_u64);
    let t = &rho + rat(1, 2 * n as i64);
    let mut terms = xi_i.series.prefix_below(&rho);
    terms.push((rho, g.value.clone()));
    PuiseuxSeries::from_terms(terms, ExtRat::Finite(t))
}

/// Replaces every coefficient by its real part; exact input must be real.
fn real_parts(terms: &[(Rat, Coefficient)]) -> Vec<(Rat, Coefficient)> {
    terms
        .iter()
        .map(|(e, c)| {
            let r = match c {
                Coefficient::Exact(_) => c.clone(),
                Coefficient::Approx(z) => Coefficient::Approx(z.real_part()),
            };
            (e.clone(), r)
        })
        .collect()
}

/// Real polar branches of a real mini-regular `f`: each polar branch not a
/// root of `f` is cut at its first non-real coefficient, which is replaced by
/// one generic real `g`; real branches are kept whole.
pub fn real_polar_branches(
    f: &BivarPoly,
    depth: &Rat,
    sampler: &mut GenericSampler,
    ctx: NumericContext,
) -> Result<BranchSet> {
    if !f.is_exact() {
        return Err(Error::NonExactInput);
    }
    if !f.is_real() {
        return Err(Error::InvalidInput(
            "real mode needs real coefficients".into(),
        ));
    }
    let m = regular_order(f)?;
    if m < 2 {
        return Ok(BranchSet::new(Vec::new(), Vec::new(), m, 0));
    }
    let (keep, _) = split_polar(f)?;
    let fx = f.deriv_x();
    let cap = depth_cap(f).max(depth.clone());
    let mut depth = depth.clone();
    'deepen: loop {
        let (branches, mut decisions) =
            expand_factors(&keep, &depth, ctx, BranchSource::RealPolar)?;
        if let Err(e) = contact_matrix(&branches) {
            match e {
                Error::IndeterminateContact { .. } => match next_depth(&depth, &cap) {
                    Some(d) => {
                        depth = d;
                        continue;
                    }
                    None => {
                        return Err(Error::TruncationTooShallow(
                            "polar branches do not separate".into(),
                        ))
                    }
                },
                e => return Err(e),
            }
        }
        let mut certified = true;
        let mut whole = Vec::new();
        let mut cut: Vec<(PuiseuxSeries, Rat)> = Vec::new();
        for b in branches {
            let terms = b.series.terms();
            let first = terms.iter().position(|(_, c)| !c.is_real());
            let upto = first.unwrap_or(terms.len());
            if terms[..upto].iter().any(|(_, c)| !c.is_exact()) {
                certified = false;
            }
            let prefix = real_parts(&terms[..upto]);
            match first {
                None => {
                    let s = PuiseuxSeries::from_terms(prefix, b.series.truncation().clone())?;
                    whole.push(Branch::new(s, b.multiplicity, BranchSource::RealPolar));
                }
                Some(p) => {
                    let s = terms[p].0.clone();
                    let pre = PuiseuxSeries::from_terms(prefix, ExtRat::Infinity)?;
                    if !cut.iter().any(|(q, t)| *t == s && q.same_as(&pre)) {
                        cut.push((pre, s));
                    }
                }
            }
        }
        for b in &mut whole {
            match attach_heights(f, b)? {
                Some(dec) => decisions += dec,
                None => match next_depth(&depth, &cap) {
                    Some(d) => {
                        depth = d;
                        continue 'deepen;
                    }
                    None => {
                        return Err(Error::TruncationTooShallow(
                            "ord f along a real polar branch".into(),
                        ))
                    }
                },
            }
        }
        let mut out = whole;
        let mut generic = None;
        if !cut.is_empty() {
            let mut faces = Vec::new();
            for (pre, s) in &cut {
                faces.push(face_poly(f, pre, s)?);
                faces.push(face_poly(&fx, pre, s)?);
            }
            let ok = |g: &Coefficient| faces.iter().all(|p| !eval_coeffs(p, g).is_zero());
            let g = sampler.pick(
                "real polar branch",
                &[(
                    "faces of f and f_x at the cut exponent do not vanish".into(),
                    &ok,
                )],
            )?;
            for (pre, s) in &cut {
                let series = pre.push_term(g.value.clone(), s.clone());
                if out.iter().any(|b: &Branch| b.series.same_as(&series)) {
                    continue;
                }
                let mut b = Branch::new(series, 1, BranchSource::RealPolar);
                let h = certified_heights(f, &b.series);
                decisions += h.tolerance_decisions;
                match h.h0 {
                    Ok(ExtRat::Finite(h0)) => {
                        b.ell = ell_from(&h0, &h.h1);
                        b.ord_f = Some(h0);
                        out.push(b);
                    }
                    Ok(ExtRat::Infinity) => {}
                    Err(_) => {
                        return Err(Error::Internal("finite arc with uncertified order".into()))
                    }
                }
            }
            generic = Some(g);
        }
        out.sort_by(|a, b| a.series.cmp_key(&b.series));
        let contact = match contact_matrix(&out) {
            Ok(c) => c,
            Err(Error::IndeterminateContact { .. }) => match next_depth(&depth, &cap) {
                Some(d) => {
                    depth = d;
                    continue;
                }
                None => {
                    return Err(Error::TruncationTooShallow(
                        "real polar branches do not separate".into(),
                    ))
                }
            },
            Err(e) => return Err(e),
        };
        let mut set = BranchSet::new(out, contact, m, decisions);
        set.generic = generic;
        set.reality_certified = certified;
        return Ok(set);
    }
}

/// Depth to start internal computations from.
pub(crate) fn start_depth() -> Rat {
    int(START_DEPTH)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_arc, parse_poly};

    fn ctx() -> NumericContext {
        NumericContext::default()
    }

    fn arcs(set: &BranchSet) -> Vec<String> {
        set.branches
            .iter()
            .map(|b| format_arc(&b.series.stored()))
            .collect()
    }

    #[test]
    fn regularize_keeps_regular_input() {
        let f = parse_poly("x^3 - y^4 + y^5").unwrap();
        let (g, c, m) = mini_regularize(&f, &mut GenericSampler::new(0)).unwrap();
        assert_eq!(g, f);
        assert!(c.value.is_zero());
        assert_eq!(m, 3);
    }

    #[test]
    fn regularize_shears_y_squared() {
        let f = parse_poly("x*y").unwrap();
        let (g, c, m) = mini_regularize(&f, &mut GenericSampler::new(3)).unwrap();
        assert_eq!(m, 2);
        assert!(!c.value.is_zero());
        assert_eq!(g.coeff(2, 0), Some(&c.value));
    }

    #[test]
    fn cusp_roots() {
        let f = parse_poly("x^2 - y^3").unwrap();
        let set = expand_roots(&f, &int(4), ctx()).unwrap();
        assert_eq!(arcs(&set), vec!["x = -y^(3/2)", "x = y^(3/2)"]);
        assert_eq!(set.contact[0][1], ExtRat::Finite(rat(3, 2)));
    }

    #[test]
    fn four_lines() {
        let f = parse_poly("(x^2 - y^2)*(x^2 - y^4)").unwrap();
        let set = expand_roots(&f, &int(4), ctx()).unwrap();
        assert_eq!(set.len(), 4);
        let find = |s: &str| arcs(&set).iter().position(|a| a == s).unwrap();
        let (a, b, c, d) = (
            find("x = y"),
            find("x = -y"),
            find("x = y^2"),
            find("x = -y^2"),
        );
        assert_eq!(set.contact[a][b], ExtRat::Finite(int(1)));
        assert_eq!(set.contact[c][d], ExtRat::Finite(int(2)));
        assert_eq!(set.contact[a][c], ExtRat::Finite(int(1)));
    }

    #[test]
    fn multiplicities_from_factors() {
        let f = parse_poly("(x - y)^3*(x + y)").unwrap();
        let set = expand_roots(&f, &int(2), ctx()).unwrap();
        let m: Vec<(String, u32)> = set
            .branches
            .iter()
            .map(|b| (format_arc(&b.series), b.multiplicity))
            .collect();
        assert_eq!(m, vec![("x = -y".to_string(), 1), ("x = y".to_string(), 3)]);
    }

    #[test]
    fn irrational_roots_are_approximate_and_verified() {
        let f = parse_poly("x^2 - 2*y^2 - y^3").unwrap();
        let set = expand_roots(&f, &int(5), ctx()).unwrap();
        assert_eq!(set.len(), 2);
        for b in &set.branches {
            let sub = f.substitute(&b.series);
            assert!(sub.order() > *b.series.truncation());
        }
    }

    #[test]
    fn slide_examples() {
        let f = parse_poly("x^2 - y^3").unwrap();
        let phi = PuiseuxSeries::zero();
        let s = slide(&f, &phi, &Coefficient::one()).unwrap();
        assert_eq!(format_arc(&s), "x = y^(3/2)");
        assert!(matches!(
            slide(&f, &phi, &Coefficient::from(2)),
            Err(Error::NotARoot)
        ));

        let f = parse_poly("x^3 - y^4 + y^5").unwrap();
        let phi = parse_arc("x = y^(4/3)").unwrap();
        let s = slide(&f, &phi, &Coefficient::from(rat(-1, 3))).unwrap();
        assert_eq!(format_arc(&s), "x = y^(4/3) - 1/3*y^(7/3)");
        let before = f.substitute(&phi).order();
        let after = f.substitute(&s).order();
        assert!(after > before);

        // the new term lands on the arc's own exponent
        let f = parse_poly("x + y").unwrap();
        let s = slide(
            &f,
            &parse_arc("x = 1/7*y").unwrap(),
            &Coefficient::from(rat(-8, 7)),
        )
        .unwrap();
        assert_eq!(format_arc(&s), "x = -y");
    }

    #[test]
    fn stability_without_extension() {
        let f = parse_poly("x^3 - y^4 + y^5").unwrap();
        let phi = parse_arc("x = y^(4/3)").unwrap();
        let (_, h0) = slide_to_stability(&f, &phi).unwrap();
        assert_eq!(h0, int(5));
    }

    #[test]
    fn polar_branches_of_example_sextic() {
        let f = parse_poly("1/6*x^6 + 1/4*x^4*y^4 - 1/5*x^5*y - 1/3*x^3*y^5").unwrap();
        let set = polar_branches(&f, &int(2), ctx()).unwrap();
        let got: Vec<(String, String)> = set
            .branches
            .iter()
            .map(|b| (format_arc(&b.series), fmt_rat(b.ord_f.as_ref().unwrap())))
            .collect();
        assert_eq!(
            got,
            vec![
                ("x = y".to_string(), "6".to_string()),
                ("x = -i*y^2".to_string(), "11".to_string()),
                ("x = i*y^2".to_string(), "11".to_string()),
            ]
        );
    }

    #[test]
    fn polar_branches_of_power_are_empty() {
        let f = parse_poly("x^4").unwrap();
        assert!(polar_branches(&f, &int(2), ctx()).unwrap().is_empty());
    }

    #[test]
    fn polar_orders_of_four_lines() {
        let f = parse_poly("(x^2 - y^2)*(x^2 - y^4)").unwrap();
        let set = polar_branches(&f, &int(2), ctx()).unwrap();
        let mut ords: Vec<Rat> = set
            .branches
            .iter()
            .map(|b| b.ord_f.clone().unwrap())
            .collect();
        ords.sort();
        assert_eq!(ords, vec![int(4), int(4), int(6)]);
    }

    #[test]
    fn approximations() {
        let f = parse_poly("x^2 - y^3").unwrap();
        let set = expand_roots(&f, &int(2), ctx()).unwrap();
        let mut s = GenericSampler::new(5);
        let g = approximation_constant(&f, &set.branches[0], &set.branches[1], &mut s).unwrap();
        let a = approximation(&set.branches[0], &set.branches[1], &g).unwrap();
        assert_eq!(a.terms().len(), 1);
        assert_eq!(a.terms()[0].0, rat(3, 2));
        assert!(a.truncation() > &ExtRat::Finite(rat(3, 2)));
    }

    #[test]
    fn real_polar_examples() {
        let f = parse_poly("x^3 + 3*x*y^3").unwrap();
        let set = real_polar_branches(&f, &int(2), &mut GenericSampler::new(0), ctx()).unwrap();
        assert_eq!(set.len(), 1);
        let b = &set.branches[0];
        assert_eq!(b.series.terms()[0].0, rat(3, 2));
        assert_eq!(b.ell, Some(rat(2, 3)));

        let f = parse_poly("x^2 - y^5").unwrap();
        let set = real_polar_branches(&f, &int(2), &mut GenericSampler::new(0), ctx()).unwrap();
        assert_eq!(arcs(&set), vec!["x = 0"]);
        assert_eq!(set.branches[0].ord_f, Some(int(5)));
    }
}
