//! Dense univariate polynomials over the Gaussian rationals.

use crate::coeff::GaussRat;

/// Coefficients from the constant term up; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly {
    c: Vec<GaussRat>,
}

impl UPoly {
    pub fn new(mut c: Vec<GaussRat>) -> Self {
        while c.last().is_some_and(GaussRat::is_zero) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn constant(a: GaussRat) -> Self {
        Self::new(vec![a])
    }

    pub fn monomial(a: GaussRat, k: usize) -> Self {
        let mut c = vec![GaussRat::zero(); k + 1];
        c[k] = a;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> GaussRat {
        self.c.get(k).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> GaussRat {
        self.c.last().cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Lowest power with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.c.iter().position(|a| !a.is_zero())
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|k| self.coeff(k).add(&o.coeff(k))).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|k| self.coeff(k).sub(&o.coeff(k))).collect())
    }

    pub fn neg(&self) -> UPoly {
        UPoly {
            c: self.c.iter().map(GaussRat::neg).collect(),
        }
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![GaussRat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, k: &GaussRat) -> UPoly {
        Self::new(self.c.iter().map(|a| a.mul(k)).collect())
    }

    pub fn derivative(&self) -> UPoly {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a.scale(&crate::rat::int(k as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, z: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(z).add(a);
        }
        acc
    }

    /// Quotient and remainder; `d` must be nonzero.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lead().inv();
        let mut r = self.c.clone();
        let mut q = vec![GaussRat::zero(); self.c.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let t = r[k].mul(&inv);
            if !t.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k - dd + j] = r[k - dd + j].sub(&t.mul(b));
                }
                q[k - dd] = t;
            }
            r.pop();
        }
        (Self::new(q), Self::new(r))
    }

    /// Exact quotient, or `None` when `d` does not divide.
    pub fn exact_div(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inv())
    }

    /// Monic gcd; zero only when both inputs are zero.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Squarefree decomposition by Yun's algorithm: monic `(factor, multiplicity)`
    /// pairs with `self = lead * prod factor^multiplicity`.
    pub fn squarefree(&self) -> Vec<(UPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let a = self.monic();
        let b = a.derivative();
        let c = a.gcd(&b);
        let mut w = a.exact_div(&c).expect("gcd divides");
        let mut y = b.exact_div(&c).expect("gcd divides");
        let mut z = y.sub(&w.derivative());
        let mut k = 1;
        while w.degree().unwrap_or(0) > 0 {
            let g = w.gcd(&z);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), k));
            }
            w = w.exact_div(&g).expect("gcd divides");
            y = z.exact_div(&g).expect("gcd divides");
            z = y.sub(&w.derivative());
            k += 1;
        }
        out
    }

    /// Rational-root style check: `z` is a root.
    pub fn is_root(&self, z: &GaussRat) -> bool {
        self.eval(z).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn p(c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&k| GaussRat::from_int(k)).collect())
    }

    #[test]
    fn division() {
        let (q, r) = p(&[-1, 0, 1]).div_rem(&p(&[-1, 1]));
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn gcd_is_monic() {
        let a = p(&[-1, 0, 1]).mul(&p(&[2]));
        let b = p(&[1, 2, 1]);
        assert_eq!(a.gcd(&b), p(&[1, 1]));
    }

    #[test]
    fn yun() {
        // (z-1)^3 (z+2)
        let f = p(&[-1, 1])
            .mul(&p(&[-1, 1]))
            .mul(&p(&[-1, 1]))
            .mul(&p(&[2, 1]));
        let sf = f.scale(&GaussRat::real(rat(3, 1))).squarefree();
        assert_eq!(sf, vec![(p(&[2, 1]), 1), (p(&[-1, 1]), 3)]);
    }
}
