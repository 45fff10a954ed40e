//! Squarefree decomposition in `x` over the field of rational functions in `y`.
//!
//! Polynomials are handled recursively as polynomials in `x` whose
//! coefficients are univariate polynomials in `y` over Q(i). Gcds use the
//! primitive pseudo-remainder sequence; contents (factors free of `x`) are
//! dropped throughout.

use crate::coeff::{Coefficient, GaussRat};
use crate::error::{Error, Result};
use crate::modgcd;
use crate::poly::BivarPoly;
use crate::rat::Rat;
use crate::upoly::UPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// `sum_i c[i](y) x^i`, no trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XPoly {
    c: Vec<UPoly>,
}

impl XPoly {
    fn new(mut c: Vec<UPoly>) -> Self {
        while c.last().is_some_and(UPoly::is_zero) {
            c.pop();
        }
        XPoly { c }
    }

    pub fn from_bivar(f: &BivarPoly) -> Result<Self> {
        let mut cols: Vec<Vec<GaussRat>> = vec![Vec::new(); f.x_degree() as usize + 1];
        for ((i, j), a) in f.terms() {
            let g = a.as_exact().ok_or(Error::NonExactInput)?;
            let col = &mut cols[*i as usize];
            if col.len() <= *j as usize {
                col.resize(*j as usize + 1, GaussRat::zero());
            }
            col[*j as usize] = g.clone();
        }
        Ok(Self::new(cols.into_iter().map(UPoly::new).collect()))
    }

    pub fn to_bivar(&self) -> BivarPoly {
        let mut terms = Vec::new();
        for (i, col) in self.c.iter().enumerate() {
            for (j, a) in col.coeffs().iter().enumerate() {
                if !a.is_zero() {
                    terms.push(((i as u32, j as u32), Coefficient::Exact(a.clone())));
                }
            }
        }
        BivarPoly::from_terms(terms)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree in `x`; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    fn lead(&self) -> &UPoly {
        self.c.last().expect("nonzero")
    }

    fn sub(&self, o: &XPoly) -> XPoly {
        let n = self.c.len().max(o.c.len());
        let zero = UPoly::zero();
        Self::new(
            (0..n)
                .map(|k| {
                    self.c
                        .get(k)
                        .unwrap_or(&zero)
                        .sub(o.c.get(k).unwrap_or(&zero))
                })
                .collect(),
        )
    }

    fn scale(&self, k: &UPoly) -> XPoly {
        Self::new(self.c.iter().map(|a| a.mul(k)).collect())
    }

    /// `self * k * x^s`.
    fn shifted_scale(&self, k: &UPoly, s: usize) -> XPoly {
        let mut c = vec![UPoly::zero(); s];
        c.extend(self.c.iter().map(|a| a.mul(k)));
        Self::new(c)
    }

    pub fn deriv_x(&self) -> XPoly {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a.scale(&GaussRat::from_int(k as i64)))
                .collect(),
        )
    }

    /// Monic gcd of the `y`-coefficients.
    pub fn content(&self) -> UPoly {
        let mut g = UPoly::zero();
        for a in &self.c {
            g = g.gcd(a);
            if g.degree() == Some(0) {
                break;
            }
        }
        g
    }

    /// Divides out the content and normalizes the leading scalar to 1.
    pub fn primitive_part(&self) -> XPoly {
        if self.is_zero() {
            return self.clone();
        }
        let cont = self.content();
        let c: Vec<UPoly> = self
            .c
            .iter()
            .map(|a| a.exact_div(&cont).expect("content divides"))
            .collect();
        let p = Self::new(c);
        let s = p.lead().lead().inv();
        Self::new(p.c.iter().map(|a| a.scale(&s)).collect())
    }

    /// `lc(d)^(deg self - deg d + 1) * self mod d`.
    fn pseudo_rem(&self, d: &XPoly) -> XPoly {
        let dd = d.degree().expect("nonzero divisor");
        let lc = d.lead().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let t = r.lead().clone();
            r = r.scale(&lc).sub(&d.shifted_scale(&t, dr - dd));
        }
        r
    }

    /// Exact quotient in Q(i)[y][x], or `None` if `d` does not divide.
    pub fn exact_div(&self, d: &XPoly) -> Option<XPoly> {
        let dd = d.degree()?;
        let mut r = self.clone();
        let mut q = vec![UPoly::zero(); self.c.len().saturating_sub(dd)];
        while let Some(dr) = r.degree() {
            if dr < dd {
                return None;
            }
            let t = r.lead().exact_div(d.lead())?;
            r = r.sub(&d.shifted_scale(&t, dr - dd));
            q[dr - dd] = t;
        }
        Some(Self::new(q))
    }

    fn eval_y(&self, y0: &GaussRat) -> UPoly {
        UPoly::new(self.c.iter().map(|a| a.eval(y0)).collect())
    }

    fn y_degree(&self) -> usize {
        self.c.iter().filter_map(UPoly::degree).max().unwrap_or(0)
    }

    /// Primitive gcd in `x`; contents are not tracked.
    pub fn gcd(&self, o: &XPoly) -> XPoly {
        let (mut a, mut b) = (self.primitive_part(), o.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        if b.is_zero() {
            return a;
        }
        match gcd_by_interpolation(&a, &b) {
            Some(g) => g,
            None => gcd_prs(a, b),
        }
    }
}

/// Gcd of primitive `a`, `b` from univariate gcds at `y = 1, 2, ...`.
///
/// With `gamma = gcd(lc a, lc b)`, `gamma(y0)` times the monic gcd at a
/// point that keeps both leading coefficients is the value of a polynomial
/// of `y`-degree below `need`. Points where the gcd degree jumps up are
/// unlucky and skipped. The interpolant is accepted only after exact trial
/// division; `None` sends the caller to the pseudo-remainder sequence.
fn gcd_by_interpolation(a: &XPoly, b: &XPoly) -> Option<XPoly> {
    if let Some(g) = modular_gcd(a, b) {
        return Some(g);
    }
    let gamma = a.lead().gcd(b.lead());
    let need = gamma.degree().unwrap_or(0) + a.y_degree().min(b.y_degree()) + 1;
    let mut deg = usize::MAX;
    let mut pts: Vec<(GaussRat, UPoly)> = Vec::new();
    for k in 1..=(4 * need + 16) as i64 {
        let y0 = GaussRat::from_int(k);
        let g0 = gamma.eval(&y0);
        if g0.is_zero() || a.lead().eval(&y0).is_zero() || b.lead().eval(&y0).is_zero() {
            continue;
        }
        let h = a.eval_y(&y0).gcd(&b.eval_y(&y0));
        let e = h.degree().unwrap_or(0);
        if e == 0 {
            return Some(XPoly::new(vec![UPoly::constant(GaussRat::one())]));
        }
        if e > deg {
            continue;
        }
        if e < deg {
            deg = e;
            pts.clear();
        }
        pts.push((y0, h.scale(&g0)));
        if pts.len() < need {
            continue;
        }
        let xs: Vec<GaussRat> = pts.iter().map(|(y, _)| y.clone()).collect();
        let c: Vec<UPoly> = (0..=deg)
            .map(|i| {
                let vs: Vec<GaussRat> = pts.iter().map(|(_, h)| h.coeff(i)).collect();
                interpolate(&xs, &vs)
            })
            .collect();
        let g = XPoly::new(c).primitive_part();
        if a.exact_div(&g).is_some() && b.exact_div(&g).is_some() {
            return Some(g);
        }
    }
    None
}

/// Rows of integers proportional to a real `UPoly`.
fn int_rows(rows: &[&UPoly]) -> Option<Vec<Vec<BigInt>>> {
    let mut den = BigInt::one();
    for r in rows {
        for a in r.coeffs() {
            if !a.im.is_zero() {
                return None;
            }
            den = den.lcm(a.re.denom());
        }
    }
    Some(
        rows.iter()
            .map(|r| {
                r.coeffs()
                    .iter()
                    .map(|a| (&a.re * Rat::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect(),
    )
}

/// The same gcd for real inputs, computed modulo primes.
fn modular_gcd(a: &XPoly, b: &XPoly) -> Option<XPoly> {
    let ai = int_rows(&a.c.iter().collect::<Vec<_>>())?;
    let bi = int_rows(&b.c.iter().collect::<Vec<_>>())?;
    // lc(G) divides gcd(lc a, lc b) in Z[y]: primitive part times content gcd
    let g = a.lead().gcd(b.lead());
    let gi = int_rows(&[&g])?.pop()?;
    let cg = modgcd::row_content(&gi);
    let cab = modgcd::row_content(ai.last()?).gcd(&modgcd::row_content(bi.last()?));
    let gamma: Vec<BigInt> = gi.iter().map(|x| x / &cg * &cab).collect();
    let need = g.degree().unwrap_or(0) + a.y_degree().min(b.y_degree()) + 1;
    modgcd::lift_gcd(&ai, &bi, &gamma, need, |h| {
        let c = h
            .iter()
            .map(|r| {
                UPoly::new(
                    r.iter()
                        .map(|x| GaussRat::real(Rat::from_integer(x.clone())))
                        .collect(),
                )
            })
            .collect();
        let g = XPoly::new(c).primitive_part();
        (a.exact_div(&g).is_some() && b.exact_div(&g).is_some()).then_some(g)
    })
}

/// Newton interpolation through `(xs[k], vs[k])`.
fn interpolate(xs: &[GaussRat], vs: &[GaussRat]) -> UPoly {
    let n = xs.len();
    let mut c = vs.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            c[i] = c[i].sub(&c[i - 1]).div(&xs[i].sub(&xs[i - j]));
        }
    }
    let mut p = UPoly::constant(c[n - 1].clone());
    for i in (0..n - 1).rev() {
        let lin = UPoly::new(vec![xs[i].neg(), GaussRat::one()]);
        p = p.mul(&lin).add(&UPoly::constant(c[i].clone()));
    }
    p
}

fn gcd_prs(mut a: XPoly, mut b: XPoly) -> XPoly {
    loop {
        if b.degree() == Some(0) {
            return XPoly::new(vec![UPoly::constant(GaussRat::one())]);
        }
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            return b;
        }
        a = b;
        b = r.primitive_part();
    }
}

/// Squarefree decomposition of `f` as a polynomial in `x`.
///
/// Returns pairwise coprime squarefree factors of positive `x`-degree with
/// their multiplicities; their product with multiplicities equals `f` up to
/// a factor free of `x`.
pub fn squarefree_decompose_x(f: &BivarPoly) -> Result<Vec<(BivarPoly, u32)>> {
    if f.is_zero() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    let a = XPoly::from_bivar(f)?.primitive_part();
    let mut out = Vec::new();
    if a.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let b = a.deriv_x();
    let c = a.gcd(&b);
    let mut w = a.exact_div(&c).expect("gcd divides");
    let mut y = b.exact_div(&c).expect("gcd divides");
    let mut z = y.sub(&w.deriv_x());
    let mut k = 1;
    while w.degree().unwrap_or(0) > 0 {
        let g = w.gcd(&z);
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.to_bivar(), k));
        }
        w = w.exact_div(&g).expect("gcd divides");
        y = z.exact_div(&g).expect("gcd divides");
        z = y.sub(&w.deriv_x());
        k += 1;
    }
    Ok(out)
}

/// Primitive gcd of two exact polynomials as polynomials in `x`.
pub fn gcd_x(f: &BivarPoly, g: &BivarPoly) -> Result<BivarPoly> {
    Ok(XPoly::from_bivar(f)?.gcd(&XPoly::from_bivar(g)?).to_bivar())
}

/// Exact quotient in `x`, if `g` divides `f`.
pub fn div_x(f: &BivarPoly, g: &BivarPoly) -> Result<Option<BivarPoly>> {
    Ok(XPoly::from_bivar(f)?
        .exact_div(&XPoly::from_bivar(g)?)
        .map(|q| q.to_bivar()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Coefficient;

    fn lin(a: i64) -> BivarPoly {
        // x - a*y
        BivarPoly::x().sub(&BivarPoly::y().scale(&Coefficient::from(a)))
    }

    #[test]
    fn interpolated_gcd_matches_prs() {
        // (x - y)(x^2 - y^3) and (x - y)(x + 2y^2)
        let common = lin(1);
        let cusp = BivarPoly::x().pow(2).sub(&BivarPoly::y().pow(3));
        let other = BivarPoly::x().add(&BivarPoly::y().pow(2).scale(&Coefficient::from(2)));
        let a = XPoly::from_bivar(&common.mul(&cusp))
            .unwrap()
            .primitive_part();
        let b = XPoly::from_bivar(&common.mul(&other))
            .unwrap()
            .primitive_part();
        let fast = gcd_by_interpolation(&a, &b).unwrap();
        assert_eq!(fast, gcd_prs(a, b));
        assert_eq!(fast.to_bivar(), common);
    }

    #[test]
    fn power_of_x() {
        let f = BivarPoly::x().pow(2);
        let sf = squarefree_decompose_x(&f).unwrap();
        assert_eq!(sf, vec![(BivarPoly::x(), 2)]);
    }

    #[test]
    fn mixed_multiplicities() {
        let f = lin(1).pow(3).mul(&lin(-1));
        let sf = squarefree_decompose_x(&f).unwrap();
        assert_eq!(sf.len(), 2);
        assert_eq!(sf[0], (lin(-1), 1));
        assert_eq!(sf[1], (lin(1), 3));
    }

    #[test]
    fn squarefree_input_is_one_factor() {
        let y2 = BivarPoly::y().pow(2);
        let y4 = BivarPoly::y().pow(4);
        let x2 = BivarPoly::x().pow(2);
        let f = x2.sub(&y2).mul(&x2.sub(&y4));
        let sf = squarefree_decompose_x(&f).unwrap();
        assert_eq!(sf.len(), 1);
        assert_eq!(sf[0].1, 1);
        assert_eq!(sf[0].0, f);
    }

    #[test]
    fn content_is_dropped() {
        let f = lin(2).pow(2).mul(&BivarPoly::y().pow(3));
        let sf = squarefree_decompose_x(&f).unwrap();
        assert_eq!(sf, vec![(lin(2), 2)]);
    }

    #[test]
    fn approximate_input_rejected() {
        let ctx = crate::approx::NumericContext::default();
        let z = crate::approx::ApproxComplex::from_c64(num_complex::Complex64::new(1.0, 0.0), ctx);
        let f = BivarPoly::monomial(Coefficient::Approx(z), 1, 0);
        assert_eq!(squarefree_decompose_x(&f), Err(Error::NonExactInput));
    }
}
