//! Newton polygons of `f` relative to an arc.
//!
//! `F(X, Y) = f(X + phi(Y), Y)` is kept as one series in `Y` per power of
//! `X` (a column). Substituting `X -> X + c*Y^rho` acts on columns as
//! `col_i <- sum_{j >= i} C(j, i) c^(j-i) Y^(rho (j-i)) col_j`, so an arc is
//! applied term by term. Terms at or above the budget are dropped; every
//! term below the budget is exact.
//!
//! When `phi` is only known below a truncation order `T`, the coefficient of
//! `X^i` is determined below `floor_i = min_k (low_(i+k) + k*T)`, `k >= 1`,
//! and only dots below that floor are reported as certified.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::poly::BivarPoly;
use crate::rat::{binomial, fmt_rat, int, ExtRat, Rat};
use crate::series::PuiseuxSeries;

/// Columns of `F` below a budget.
///
/// Exponents are stored as integers over a common denominator `den`, which
/// grows when a shift brings a new denominator.
///
/// With a positive `slope` `r`, column `i >= 1` is cut at
/// `budget - (i - 1) r` instead: enough to keep columns 0 and 1 exact below
/// the budget when every shift has `rho >= r`, and anything cut sits above
/// the floors of columns 0 and 1 anyway. Only those two columns are
/// meaningful then.
#[derive(Clone, Debug)]
pub struct Expansion {
    cols: Vec<BTreeMap<i128, Coefficient>>,
    den: i128,
    budget: ExtRat,
    slope: Rat,
    complete: bool,
    decisions: usize,
}

fn small(x: &num_bigint::BigInt) -> i128 {
    x.to_i128().expect("exponent grid fits in i128")
}

impl Expansion {
    pub fn new(f: &BivarPoly, budget: ExtRat) -> Self {
        Self::with_slope(f, budget, Rat::zero())
    }

    fn with_slope(f: &BivarPoly, budget: ExtRat, slope: Rat) -> Self {
        let mut e = Expansion {
            cols: Vec::new(),
            den: 1,
            budget,
            slope,
            complete: true,
            decisions: 0,
        };
        let cols = f
            .columns()
            .into_iter()
            .enumerate()
            .map(|(i, col)| {
                let cut = e.cut_key(i);
                let mut m = BTreeMap::new();
                for (j, c) in col {
                    let x = j as i128;
                    if cut.is_some_and(|k| x >= k) {
                        e.complete = false;
                    } else {
                        m.insert(x, c);
                    }
                }
                m
            })
            .collect();
        e.cols = cols;
        e
    }

    fn cut(&self, i: usize) -> ExtRat {
        if i <= 1 || self.slope.is_zero() {
            return self.budget.clone();
        }
        self.budget.add_rat(&-(&self.slope * int(i as i64 - 1)))
    }

    /// Smallest grid key at or above the cut of column `i`.
    fn cut_key(&self, i: usize) -> Option<i128> {
        self.cut(i).into_finite().map(|c| {
            let x = c * Rat::from_integer(self.den.into());
            small(&x.ceil().to_integer())
        })
    }

    fn key(&self, r: &Rat) -> Option<i128> {
        let x = r * Rat::from_integer(self.den.into());
        x.is_integer().then(|| small(&x.to_integer()))
    }

    fn exponent(&self, k: i128) -> Rat {
        Rat::new(k.into(), self.den.into())
    }

    fn refine(&mut self, d: i128) {
        let lcm = num_integer::Integer::lcm(&self.den, &d);
        if lcm == self.den {
            return;
        }
        let f = lcm / self.den;
        for col in &mut self.cols {
            *col = std::mem::take(col)
                .into_iter()
                .map(|(k, v)| (k * f, v))
                .collect();
        }
        self.den = lcm;
    }

    /// Expansion along `phi` that is only good for columns 0 and 1.
    fn along_low(f: &BivarPoly, phi: &PuiseuxSeries, budget: ExtRat) -> Self {
        let slope = phi
            .terms()
            .first()
            .map(|(e, _)| e.clone())
            .filter(|e| e > &Rat::zero())
            .unwrap_or_else(Rat::zero);
        let mut e = Self::with_slope(f, budget, slope);
        for (rho, c) in phi.terms() {
            e.shift(c, rho);
        }
        e
    }

    /// Expansion of `f(X + phi, Y)` with `phi`'s stored terms.
    pub fn along(f: &BivarPoly, phi: &PuiseuxSeries, budget: ExtRat) -> Self {
        let mut e = Self::new(f, budget);
        for (rho, c) in phi.terms() {
            e.shift(c, rho);
        }
        e
    }

    /// `X -> X + c*Y^rho`.
    pub fn shift(&mut self, c: &Coefficient, rho: &Rat) {
        self.refine(small(rho.denom()));
        let step = self.key(rho).expect("refined grid");
        let n = self.cols.len();
        let mut powers = vec![Coefficient::one()];
        for _ in 1..n {
            let next = powers.last().expect("nonempty").mul(c);
            powers.push(next);
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let cut = self.cut_key(i);
            let mut m: BTreeMap<i128, Coefficient> = BTreeMap::new();
            for (j, col) in self.cols.iter().enumerate().skip(i) {
                let k = (j - i) as u32;
                let factor = powers[k as usize].scale_rat(&binomial(j as u32, k));
                let off = step * k as i128;
                for (e, a) in col {
                    let ne = e + off;
                    if cut.is_some_and(|c| ne >= c) {
                        self.complete = false;
                        continue;
                    }
                    let v = a.mul(&factor);
                    match m.get_mut(&ne) {
                        Some(slot) => *slot = slot.add(&v),
                        None => {
                            m.insert(ne, v);
                        }
                    }
                }
            }
            m.retain(|_, v: &mut Coefficient| {
                if v.is_tolerance_zero() {
                    self.decisions += 1;
                    false
                } else {
                    !v.is_zero()
                }
            });
            out.push(m);
        }
        self.cols = out;
    }

    pub fn width(&self) -> usize {
        self.cols.len()
    }

    pub fn budget(&self) -> &ExtRat {
        &self.budget
    }

    /// Nothing was ever dropped: the columns are all of `F`.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn decisions(&self) -> usize {
        self.decisions
    }

    /// Terms of column `i` by increasing exponent.
    pub fn column(&self, i: usize) -> impl Iterator<Item = (Rat, &Coefficient)> + '_ {
        self.cols
            .get(i)
            .into_iter()
            .flat_map(move |c| c.iter().map(move |(k, v)| (self.exponent(*k), v)))
    }

    /// Lowest exponent in column `i`; `Infinity` if nothing is stored.
    pub fn low(&self, i: usize) -> ExtRat {
        self.cols
            .get(i)
            .and_then(|c| c.keys().next())
            .map(|k| ExtRat::Finite(self.exponent(*k)))
            .unwrap_or(ExtRat::Infinity)
    }

    pub fn coefficient(&self, i: usize, h: &Rat) -> Option<&Coefficient> {
        let k = self.key(h)?;
        self.cols.get(i).and_then(|c| c.get(&k))
    }

    /// Effective budget: infinite when complete.
    fn known_below(&self) -> ExtRat {
        if self.complete {
            ExtRat::Infinity
        } else {
            self.budget.clone()
        }
    }

    /// Exponent below which column `i` of the true `F` is known, for an arc
    /// whose unknown tail has order at least `t`.
    pub fn floor(&self, i: usize, t: &ExtRat) -> ExtRat {
        let mut fl = self.known_below();
        for k in 1..self.cols.len().saturating_sub(i) {
            let bound = match t {
                ExtRat::Finite(t) => self.low(i + k).add_rat(&(t * int(k as i64))),
                ExtRat::Infinity => ExtRat::Infinity,
            };
            fl = fl.min(bound);
        }
        fl
    }

    /// Lowest certified dot of column `i`: `Ok(h)` when certified (with
    /// `Infinity` meaning the column provably vanishes), `Err(floor)` when
    /// nothing is certified below `floor`.
    pub fn certified_low(&self, i: usize, t: &ExtRat) -> std::result::Result<ExtRat, Rat> {
        let fl = self.floor(i, t);
        let low = self.low(i);
        if low < fl {
            return Ok(low);
        }
        match fl {
            ExtRat::Infinity => Ok(ExtRat::Infinity),
            ExtRat::Finite(r) => Err(r),
        }
    }
}

/// Builds an expansion along `phi`, doubling the budget until the requested
/// columns are certified or more budget cannot help. Budgets never exceed
/// `cap`.
pub fn expand_certified(
    f: &BivarPoly,
    phi: &PuiseuxSeries,
    want: &[usize],
    start: Rat,
    cap: &Rat,
) -> Expansion {
    expand_until(f, phi, want, start, cap, Expansion::along)
}

fn expand_until(
    f: &BivarPoly,
    phi: &PuiseuxSeries,
    want: &[usize],
    start: Rat,
    cap: &Rat,
    build: fn(&BivarPoly, &PuiseuxSeries, ExtRat) -> Expansion,
) -> Expansion {
    let t = phi.truncation().clone();
    let mut budget = if phi.truncation().is_infinite() && phi.terms().len() <= 8 {
        ExtRat::Infinity
    } else {
        ExtRat::Finite(start.max(int(1)))
    };
    loop {
        let e = build(f, phi, budget.clone());
        let settled = want.iter().all(|&i| match e.certified_low(i, &t) {
            Ok(_) => true,
            Err(fl) => ExtRat::Finite(fl) < e.known_below(),
        });
        let b = match &budget {
            ExtRat::Finite(b) => b.clone(),
            ExtRat::Infinity => return e,
        };
        if settled || &b >= cap {
            return e;
        }
        budget = ExtRat::Finite((b * int(2)).min(cap.clone()));
    }
}

#[derive(Clone, Debug)]
pub struct NewtonDot {
    pub i: u32,
    pub h: Rat,
    pub coeff: Coefficient,
}

#[derive(Clone, Debug)]
pub struct NewtonEdge {
    /// `(i, h)` of the endpoint with smaller `i`.
    pub left: (u32, Rat),
    pub right: (u32, Rat),
    pub tan_theta: Rat,
    /// Coefficient of `z^k` at index `k`, for `k` up to `right.0`.
    pub poly: Vec<Coefficient>,
}

impl NewtonEdge {
    /// Length of the edge along the `X` axis.
    pub fn width(&self) -> u32 {
        self.right.0 - self.left.0
    }
}

#[derive(Clone, Debug)]
pub struct NewtonDiagram {
    pub dots: Vec<NewtonDot>,
    /// Ordered by increasing `tan_theta`.
    pub edges: Vec<NewtonEdge>,
    pub h0: ExtRat,
    pub h1: ExtRat,
    pub tolerance_decisions: usize,
}

impl NewtonDiagram {
    /// The compact edge with a vertex at `(0, h0)`.
    pub fn highest_edge(&self) -> Option<&NewtonEdge> {
        self.edges.last().filter(|e| e.left.0 == 0)
    }

    pub fn to_json(&self) -> Value {
        let dots: Vec<Value> = self
            .dots
            .iter()
            .map(|d| json!([d.i, fmt_rat(&d.h)]))
            .collect();
        let edges: Vec<Value> = self.edges.iter().map(edge_json).collect();
        json!({
            "dots": dots,
            "edges": edges,
            "h0": self.h0.to_text(),
            "h1": self.h1.to_text(),
        })
    }

    /// Plain coordinate dump for plotting: one `dot i h` line per dot, one
    /// `edge i1 h1 i2 h2` line per edge, heights as decimals.
    pub fn plot_dump(&self) -> String {
        let mut out = String::new();
        for d in &self.dots {
            out.push_str(&format!("dot {} {}\n", d.i, crate::rat::rat_to_f64(&d.h)));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} {} {} {}\n",
                e.left.0,
                crate::rat::rat_to_f64(&e.left.1),
                e.right.0,
                crate::rat::rat_to_f64(&e.right.1)
            ));
        }
        out
    }
}

pub(crate) fn coeff_json(c: &Coefficient) -> Value {
    match c {
        Coefficient::Exact(g) => json!([fmt_rat(&g.re), fmt_rat(&g.im)]),
        Coefficient::Approx(z) => {
            let v = z.to_c64();
            json!([format!("{:.17e}", v.re), format!("{:.17e}", v.im)])
        }
    }
}

fn edge_json(e: &NewtonEdge) -> Value {
    json!({
        "tan_theta": fmt_rat(&e.tan_theta),
        "left": [e.left.0, fmt_rat(&e.left.1)],
        "right": [e.right.0, fmt_rat(&e.right.1)],
        "poly": e.poly.iter().map(coeff_json).collect::<Vec<_>>(),
    })
}

/// `(a - o) x (b - o)` in the `(i, h)` plane.
fn cross(o: &(u32, Rat), a: &(u32, Rat), b: &(u32, Rat)) -> Rat {
    let ai = int(a.0 as i64 - o.0 as i64);
    let bi = int(b.0 as i64 - o.0 as i64);
    ai * (&b.1 - &o.1) - (&a.1 - &o.1) * bi
}

/// Lower hull through the given lowest-per-column points, from the leftmost
/// point to the point at `i = start`, as edges ordered by increasing slope
/// angle. Points must be sorted by `i` and include `start`.
pub(crate) fn lower_chain(
    points: &[(u32, Rat)],
    start: u32,
    coeff_at: impl Fn(u32, &Rat) -> Option<Coefficient>,
) -> Vec<NewtonEdge> {
    let pts: Vec<&(u32, Rat)> = points.iter().filter(|p| p.0 <= start).collect();
    let mut hull: Vec<&(u32, Rat)> = Vec::new();
    for p in pts.iter().copied() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= Rat::zero()
        {
            hull.pop();
        }
        hull.push(p);
    }
    let mut edges = Vec::new();
    for w in hull.windows(2).rev() {
        let (l, r) = (w[0], w[1]);
        let width = int((r.0 - l.0) as i64);
        let tan = (&l.1 - &r.1) / &width;
        if tan <= Rat::zero() {
            continue;
        }
        let mut poly = vec![Coefficient::zero(); r.0 as usize + 1];
        for p in points.iter().filter(|p| p.0 >= l.0 && p.0 <= r.0) {
            // height of the supporting line at p.0
            let line = &r.1 + &tan * int((r.0 - p.0) as i64);
            if p.1 == line {
                if let Some(c) = coeff_at(p.0, &p.1) {
                    poly[p.0 as usize] = c;
                }
            }
        }
        edges.push(NewtonEdge {
            left: l.clone(),
            right: r.clone(),
            tan_theta: tan,
            poly,
        });
    }
    edges
}

/// Diagram from an expansion, keeping dots certified against truncation `t`.
pub fn diagram_of(e: &Expansion, t: &ExtRat) -> NewtonDiagram {
    let mut dots = Vec::new();
    let mut lowest: Vec<(u32, Rat)> = Vec::new();
    for i in 0..e.width() {
        let fl = e.floor(i, t);
        for (h, c) in e.column(i) {
            if ExtRat::Finite(h.clone()) >= fl {
                break;
            }
            if dots.last().is_none_or(|d: &NewtonDot| d.i != i as u32) {
                lowest.push((i as u32, h.clone()));
            }
            dots.push(NewtonDot {
                i: i as u32,
                h: h.clone(),
                coeff: c.clone(),
            });
        }
    }
    let edges = match lowest.iter().map(|p| p.1.clone()).min() {
        Some(hmin) => {
            let start = lowest.iter().find(|p| p.1 == hmin).expect("exists").0;
            lower_chain(&lowest, start, |i, h| e.coefficient(i as usize, h).cloned())
        }
        None => Vec::new(),
    };
    let h_of = |i: u32| {
        lowest
            .iter()
            .find(|p| p.0 == i)
            .map(|p| ExtRat::Finite(p.1.clone()))
            .unwrap_or(ExtRat::Infinity)
    };
    NewtonDiagram {
        dots,
        edges,
        h0: h_of(0),
        h1: h_of(1),
        tolerance_decisions: e.decisions(),
    }
}

pub(crate) fn budget_cap(f: &BivarPoly) -> Rat {
    let d = f.degree().max(1) as i64;
    int(16 * d * d * (d + 1))
}

/// Newton diagram of `f` relative to `phi`.
///
/// Fails with `TruncationTooShallow` when the lowest dot on `X = 0` or
/// `X = 1` cannot be certified against `phi`'s truncation order.
pub fn relative_diagram(f: &BivarPoly, phi: &PuiseuxSeries) -> Result<NewtonDiagram> {
    if phi.terms().iter().any(|(e, _)| e < &Rat::zero()) {
        return Err(Error::InvalidInput("arc has a negative exponent".into()));
    }
    let t = phi.truncation().clone();
    let e = expand_certified(f, phi, &[0, 1], int(8), &budget_cap(f));
    for i in [0usize, 1] {
        if i < e.width() {
            if let Err(fl) = e.certified_low(i, &t) {
                return Err(Error::TruncationTooShallow(format!(
                    "no dot on X = {i} is certified below y^{}",
                    fmt_rat(&fl)
                )));
            }
        }
    }
    Ok(diagram_of(&e, &t))
}

/// Edges of a diagram, ordered by increasing `tan_theta`.
pub fn polygon_edges(diagram: &NewtonDiagram) -> Vec<NewtonEdge> {
    diagram.edges.clone()
}

/// `(h0, h1)`: lowest dots on `X = 0` and `X = 1`.
pub fn ell_heights(f: &BivarPoly, phi: &PuiseuxSeries) -> Result<(ExtRat, ExtRat)> {
    let d = relative_diagram(f, phi)?;
    if d.h0.is_infinite() {
        return Err(Error::PhiIsRoot);
    }
    Ok((d.h0, d.h1))
}

/// Heights along an arc with certification bounds, used where a missing dot
/// only needs a lower bound (for instance `X = 1` along a polar branch).
#[derive(Clone, Debug)]
pub struct Heights {
    pub h0: std::result::Result<ExtRat, Rat>,
    pub h1: std::result::Result<ExtRat, Rat>,
    pub tolerance_decisions: usize,
}

pub fn certified_heights(f: &BivarPoly, phi: &PuiseuxSeries) -> Heights {
    let t = phi.truncation().clone();
    let e = expand_until(
        f,
        phi,
        &[0, 1],
        int(8),
        &budget_cap(f),
        Expansion::along_low,
    );
    let get = |i: usize| {
        if i < e.width() {
            e.certified_low(i, &t)
        } else {
            Ok(ExtRat::Infinity)
        }
    };
    Heights {
        h0: get(0),
        h1: get(1),
        tolerance_decisions: e.decisions(),
    }
}
