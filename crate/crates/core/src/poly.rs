//! Sparse bivariate polynomials in `x` and `y`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coeff::Coefficient;
use crate::rat::{binomial, int, ExtRat};
use crate::series::PuiseuxSeries;

/// Map from `(deg_x, deg_y)` to a nonzero coefficient.
#[derive(Clone, Debug, Default)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), Coefficient>,
}

impl PartialEq for BivarPoly {
    fn eq(&self, o: &BivarPoly) -> bool {
        self.sub(o).is_zero()
    }
}

impl BivarPoly {
    pub fn zero() -> Self {
        BivarPoly::default()
    }

    pub fn constant(c: Coefficient) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Coefficient, i: u32, j: u32) -> Self {
        Self::from_terms([((i, j), c)])
    }

    pub fn x() -> Self {
        Self::monomial(Coefficient::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Coefficient::one(), 0, 1)
    }

    /// Sums like monomials and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Coefficient)>) -> Self {
        let mut map: BTreeMap<(u32, u32), Coefficient> = BTreeMap::new();
        for (k, c) in terms {
            match map.get_mut(&k) {
                Some(slot) => *slot = slot.add(&c),
                None => {
                    map.insert(k, c);
                }
            }
        }
        map.retain(|_, c| !c.is_zero());
        BivarPoly { terms: map }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Coefficient)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Option<&Coefficient> {
        self.terms.get(&(i, j))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coefficient::is_exact)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Coefficient::is_real)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    /// Lowest total degree of the support.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).min()
    }

    pub fn x_degree(&self) -> u32 {
        self.terms.keys().map(|(i, _)| *i).max().unwrap_or(0)
    }

    pub fn y_degree(&self) -> u32 {
        self.terms.keys().map(|(_, j)| *j).max().unwrap_or(0)
    }

    pub fn vanishes_at_origin(&self) -> bool {
        !self.terms.contains_key(&(0, 0))
    }

    pub fn add(&self, o: &BivarPoly) -> BivarPoly {
        Self::from_terms(
            self.terms
                .iter()
                .chain(o.terms.iter())
                .map(|(k, c)| (*k, c.clone())),
        )
    }

    pub fn neg(&self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &BivarPoly) -> BivarPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &BivarPoly) -> BivarPoly {
        let mut out = Vec::with_capacity(self.len() * o.len());
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &o.terms {
                out.push(((i1 + i2, j1 + j2), c1.mul(c2)));
            }
        }
        Self::from_terms(out)
    }

    pub fn scale(&self, k: &Coefficient) -> BivarPoly {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.mul(k))))
    }

    pub fn pow(&self, e: u32) -> BivarPoly {
        let mut acc = BivarPoly::constant(Coefficient::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn deriv_x(&self) -> BivarPoly {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((i, _), _)| *i > 0)
                .map(|((i, j), c)| ((i - 1, *j), c.scale_rat(&int(*i as i64)))),
        )
    }

    pub fn deriv_y(&self) -> BivarPoly {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, j), _)| *j > 0)
                .map(|((i, j), c)| ((*i, j - 1), c.scale_rat(&int(*j as i64)))),
        )
    }

    /// `f(x, y + c*x)`.
    pub fn shear(&self, c: &Coefficient) -> BivarPoly {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::new();
        for ((i, j), a) in &self.terms {
            // (y + c x)^j = sum_k C(j,k) c^k x^k y^(j-k)
            for k in 0..=*j {
                let coef = a.mul(&c.pow(k)).scale_rat(&binomial(*j, k));
                out.push(((i + k, j - k), coef));
            }
        }
        Self::from_terms(out)
    }

    /// `f(x, -y)`.
    pub fn reflect_y(&self) -> BivarPoly {
        BivarPoly {
            terms: self
                .terms
                .iter()
                .map(|((i, j), c)| ((*i, *j), if j % 2 == 1 { c.neg() } else { c.clone() }))
                .collect(),
        }
    }

    pub fn conj(&self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
        }
    }

    /// Sum of the monomials of total degree `k`.
    pub fn homogeneous_part(&self, k: u32) -> BivarPoly {
        BivarPoly {
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| i + j == k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, x: &Coefficient, y: &Coefficient) -> Coefficient {
        let mut acc = Coefficient::zero();
        for ((i, j), c) in &self.terms {
            acc = acc.add(&c.mul(&x.pow(*i)).mul(&y.pow(*j)));
        }
        acc
    }

    pub fn eval_c64(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|((i, j), c)| c.to_c64() * x.powu(*i) * y.powu(*j))
            .sum()
    }

    /// `f(phi(y), y)` as a series; truncation follows from `phi`'s.
    pub fn substitute(&self, phi: &PuiseuxSeries) -> PuiseuxSeries {
        let mut powers = vec![PuiseuxSeries::monomial(Coefficient::one(), int(0))];
        for _ in 0..self.x_degree() {
            let next = powers.last().expect("nonempty").mul(phi);
            powers.push(next);
        }
        let mut acc = PuiseuxSeries::zero();
        for ((i, j), c) in &self.terms {
            let term = powers[*i as usize].mul(&PuiseuxSeries::monomial(c.clone(), int(*j as i64)));
            acc = acc.add(&term);
        }
        if acc.is_zero() && acc.truncation().is_infinite() {
            return PuiseuxSeries::zero();
        }
        acc
    }

    /// Coefficients grouped by `x`-power: entry `i` lists `(deg_y, c)` for `x^i`.
    pub fn columns(&self) -> Vec<Vec<(u32, Coefficient)>> {
        let mut cols = vec![Vec::new(); self.x_degree() as usize + 1];
        if self.is_zero() {
            return cols;
        }
        for ((i, j), c) in &self.terms {
            cols[*i as usize].push((*j, c.clone()));
        }
        cols
    }

    /// Lowest `y`-degree in the coefficient of `x^i`.
    pub fn column_order(&self, i: u32) -> ExtRat {
        self.terms
            .keys()
            .filter(|(a, _)| *a == i)
            .map(|(_, j)| ExtRat::Finite(int(*j as i64)))
            .min()
            .unwrap_or(ExtRat::Infinity)
    }
}
