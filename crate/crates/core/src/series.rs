//! Truncated Puiseux series in `y` with a common ramification index.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::rat::{denom_u64, lcm_u64, ExtRat, Rat};

/// `sum c_k y^(e_k) + O(y^T)`, exponents strictly increasing, no stored zeros.
///
/// All exponents have denominators dividing `denom` (the ramification index
/// `N`). A truncation order of `Infinity` means the stored sum is the whole
/// series.
#[derive(Clone, Debug)]
pub struct PuiseuxSeries {
    denom: u64,
    terms: Vec<(Rat, Coefficient)>,
    truncation: ExtRat,
}

impl PuiseuxSeries {
    pub fn zero() -> Self {
        PuiseuxSeries {
            denom: 1,
            terms: Vec::new(),
            truncation: ExtRat::Infinity,
        }
    }

    /// `O(y^t)`: nothing known below `t` except that it vanishes.
    pub fn big_o(t: Rat) -> Self {
        PuiseuxSeries {
            denom: denom_u64(&t),
            terms: Vec::new(),
            truncation: ExtRat::Finite(t),
        }
    }

    pub fn monomial(c: Coefficient, e: Rat) -> Self {
        Self::from_terms(vec![(e, c)], ExtRat::Infinity).expect("valid monomial")
    }

    /// Builds a series from unsorted terms. Like exponents are combined, zero
    /// coefficients dropped; terms at or above the truncation are rejected.
    pub fn from_terms(terms: Vec<(Rat, Coefficient)>, truncation: ExtRat) -> Result<Self> {
        let mut map: BTreeMap<Rat, Coefficient> = BTreeMap::new();
        for (e, c) in terms {
            if e.is_negative() {
                return Err(Error::InvalidInput(format!("negative exponent {e}")));
            }
            if ExtRat::Finite(e.clone()) >= truncation {
                return Err(Error::InvalidInput(format!(
                    "term y^{e} is not below truncation {truncation}"
                )));
            }
            accumulate(&mut map, e, c);
        }
        Ok(Self::from_map(map, truncation))
    }

    pub(crate) fn from_map(map: BTreeMap<Rat, Coefficient>, truncation: ExtRat) -> Self {
        let mut denom = match &truncation {
            ExtRat::Finite(t) => denom_u64(t),
            ExtRat::Infinity => 1,
        };
        let terms: Vec<(Rat, Coefficient)> = map
            .into_iter()
            .filter(|(e, c)| !c.is_zero() && truncation > ExtRat::Finite(e.clone()))
            .collect();
        for (e, _) in &terms {
            denom = lcm_u64(denom, denom_u64(e));
        }
        PuiseuxSeries {
            denom,
            terms,
            truncation,
        }
    }

    /// Ramification index `N`.
    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn terms(&self) -> &[(Rat, Coefficient)] {
        &self.terms
    }

    pub fn truncation(&self) -> &ExtRat {
        &self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_exact())
    }

    /// Smallest stored exponent; `Infinity` when nothing is stored.
    pub fn order(&self) -> ExtRat {
        match self.terms.first() {
            Some((e, _)) => ExtRat::Finite(e.clone()),
            None => ExtRat::Infinity,
        }
    }

    pub fn max_exponent(&self) -> Option<&Rat> {
        self.terms.last().map(|(e, _)| e)
    }

    pub fn coefficient_at(&self, e: &Rat) -> Option<&Coefficient> {
        self.terms
            .binary_search_by(|(x, _)| x.cmp(e))
            .ok()
            .map(|k| &self.terms[k].1)
    }

    /// Same stored terms with a different truncation (terms at or above it dropped).
    pub fn with_truncation(&self, t: ExtRat) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| t > ExtRat::Finite(e.clone()))
            .cloned()
            .collect();
        let mut s = PuiseuxSeries {
            denom: 1,
            terms,
            truncation: t,
        };
        s.recompute_denom();
        s
    }

    /// The stored terms as an exact finite series.
    pub fn stored(&self) -> Self {
        self.with_truncation(ExtRat::Infinity)
    }

    /// Terms strictly below `e`, with the same truncation as given.
    pub fn prefix_below(&self, e: &Rat) -> Vec<(Rat, Coefficient)> {
        self.terms.iter().filter(|(x, _)| x < e).cloned().collect()
    }

    /// Appends `c*y^e`; `e` must exceed every stored exponent and stay below
    /// the truncation.
    pub fn push_term(&self, c: Coefficient, e: Rat) -> Self {
        debug_assert!(self.max_exponent().is_none_or(|m| *m < e));
        let mut s = self.clone();
        if !c.is_zero() {
            s.denom = lcm_u64(s.denom, denom_u64(&e));
            s.terms.push((e, c));
        }
        s
    }

    fn recompute_denom(&mut self) {
        let mut d = match &self.truncation {
            ExtRat::Finite(t) => denom_u64(t),
            ExtRat::Infinity => 1,
        };
        for (e, _) in &self.terms {
            d = lcm_u64(d, denom_u64(e));
        }
        self.denom = d;
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|c| c.neg())
    }

    pub fn conj(&self) -> Self {
        self.map_coefficients(|c| c.conj())
    }

    pub fn scale(&self, k: &Coefficient) -> Self {
        let map = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.mul(k)))
            .collect();
        Self::from_map(map, self.truncation.clone())
    }

    fn map_coefficients(&self, f: impl Fn(&Coefficient) -> Coefficient) -> Self {
        PuiseuxSeries {
            denom: self.denom,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), f(c))).collect(),
            truncation: self.truncation.clone(),
        }
    }

    pub fn add(&self, o: &PuiseuxSeries) -> Self {
        let truncation = self.truncation.clone().min(o.truncation.clone());
        let mut map = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(o.terms.iter()) {
            accumulate(&mut map, e.clone(), c.clone());
        }
        Self::from_map(map, truncation)
    }

    pub fn sub(&self, o: &PuiseuxSeries) -> Self {
        self.add(&o.neg())
    }

    /// Product; known exactly below `min(ord a + T_b, ord b + T_a)`.
    pub fn mul(&self, o: &PuiseuxSeries) -> Self {
        let oa = self.order().min(self.truncation.clone());
        let ob = o.order().min(o.truncation.clone());
        let truncation = oa.add(&o.truncation).min(ob.add(&self.truncation));
        let mut map = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1 + e2;
                if truncation > ExtRat::Finite(e.clone()) {
                    accumulate(&mut map, e, c1.mul(c2));
                }
            }
        }
        Self::from_map(map, truncation)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = PuiseuxSeries::monomial(Coefficient::one(), Rat::zero());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Deterministic order on series: term by term on (exponent, coefficient).
    pub fn cmp_key(&self, o: &PuiseuxSeries) -> Ordering {
        for ((e1, c1), (e2, c2)) in self.terms.iter().zip(o.terms.iter()) {
            let ord = e1.cmp(e2).then_with(|| c1.cmp_key(c2));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms
            .len()
            .cmp(&o.terms.len())
            .then_with(|| self.truncation.cmp(&o.truncation))
    }

    /// Same stored terms (coefficients compared through the zero test) and truncation.
    pub fn same_as(&self, o: &PuiseuxSeries) -> bool {
        self.truncation == o.truncation
            && self.terms.len() == o.terms.len()
            && self
                .terms
                .iter()
                .zip(o.terms.iter())
                .all(|((e1, c1), (e2, c2))| e1 == e2 && c1 == c2)
    }
}

pub(crate) fn accumulate(map: &mut BTreeMap<Rat, Coefficient>, e: Rat, c: Coefficient) {
    match map.get_mut(&e) {
        Some(slot) => *slot = slot.add(&c),
        None => {
            map.insert(e, c);
        }
    }
}

/// Order of a series: its smallest stored exponent.
pub fn series_order(s: &PuiseuxSeries) -> ExtRat {
    s.order()
}

/// `ord(s1 - s2)`, certified against both truncations.
pub fn contact_order(s1: &PuiseuxSeries, s2: &PuiseuxSeries) -> Result<ExtRat> {
    let diff = s1.sub(s2);
    let bound = s1.truncation().clone().min(s2.truncation().clone());
    match diff.order() {
        ExtRat::Finite(e) => Ok(ExtRat::Finite(e)),
        ExtRat::Infinity if bound.is_infinite() => Ok(ExtRat::Infinity),
        ExtRat::Infinity => Err(Error::IndeterminateContact { truncation: bound }),
    }
}
