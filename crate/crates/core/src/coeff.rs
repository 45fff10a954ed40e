//! The two-level coefficient tower: exact Gaussian rationals, demoted to
//! approximate complex floats only when a root has no exact representation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::approx::{ApproxComplex, NumericContext};
use crate::rat::{fmt_rat, rat_to_f64, Rat};

/// `re + im*i` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Rat) -> Self {
        GaussRat {
            re,
            im: Rat::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(Rat::from_integer(BigInt::from(n)))
    }

    pub fn i() -> Self {
        GaussRat::new(Rat::zero(), Rat::one())
    }

    pub fn zero() -> Self {
        Self::real(Rat::zero())
    }

    pub fn one() -> Self {
        Self::real(Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn neg(&self) -> GaussRat {
        GaussRat::new(-&self.re, -&self.im)
    }

    pub fn mul(&self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn scale(&self, r: &Rat) -> GaussRat {
        GaussRat::new(&self.re * r, &self.im * r)
    }

    pub fn norm(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> GaussRat {
        GaussRat::new(self.re.clone(), -&self.im)
    }

    /// Panics on division by zero.
    pub fn inv(&self) -> GaussRat {
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        GaussRat::new(&self.re / &n, -&self.im / &n)
    }

    pub fn div(&self, o: &GaussRat) -> GaussRat {
        if o.im.is_zero() {
            assert!(!o.re.is_zero(), "division by zero Gaussian rational");
            return GaussRat::new(&self.re / &o.re, &self.im / &o.re);
        }
        self.mul(&o.inv())
    }

    pub fn pow(&self, e: u32) -> GaussRat {
        let mut acc = GaussRat::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        let im_abs = self.im.abs();
        let im_part = if im_abs.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", fmt_rat(&im_abs))
        };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{im_part}")
            } else {
                write!(f, "{im_part}")
            }
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "({}{sign}{im_part})", fmt_rat(&self.re))
        }
    }
}

/// A coefficient in the tower. Arithmetic between two `Exact` values stays
/// exact; anything touching an `Approx` value is approximate.
#[derive(Clone, Debug)]
pub enum Coefficient {
    Exact(GaussRat),
    Approx(ApproxComplex),
}

impl From<GaussRat> for Coefficient {
    fn from(g: GaussRat) -> Self {
        Coefficient::Exact(g)
    }
}

impl From<Rat> for Coefficient {
    fn from(r: Rat) -> Self {
        Coefficient::Exact(GaussRat::real(r))
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Self {
        Coefficient::Exact(GaussRat::from_int(n))
    }
}

impl From<ApproxComplex> for Coefficient {
    fn from(z: ApproxComplex) -> Self {
        Coefficient::Approx(z)
    }
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Exact(GaussRat::zero())
    }

    pub fn one() -> Self {
        Coefficient::Exact(GaussRat::one())
    }

    pub fn i() -> Self {
        Coefficient::Exact(GaussRat::i())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coefficient::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&GaussRat> {
        match self {
            Coefficient::Exact(g) => Some(g),
            Coefficient::Approx(_) => None,
        }
    }

    /// Exact zero, or an approximate value that passes the tolerance test.
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Exact(g) => g.is_zero(),
            Coefficient::Approx(z) => z.is_negligible(),
        }
    }

    /// Zero under the tower's test, and decided by tolerance rather than exactly.
    pub fn is_tolerance_zero(&self) -> bool {
        match self {
            Coefficient::Exact(_) => false,
            Coefficient::Approx(z) => z.is_negligible(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coefficient::Exact(g) => g.is_one(),
            Coefficient::Approx(_) => false,
        }
    }

    /// Real under the tower's test.
    pub fn is_real(&self) -> bool {
        match self {
            Coefficient::Exact(g) => g.is_real(),
            Coefficient::Approx(z) => z.imag_negligible(),
        }
    }

    pub fn context(&self) -> Option<NumericContext> {
        match self {
            Coefficient::Exact(_) => None,
            Coefficient::Approx(z) => Some(z.context()),
        }
    }

    pub fn to_approx(&self, ctx: NumericContext) -> ApproxComplex {
        match self {
            Coefficient::Exact(g) => ApproxComplex::from_rats(&g.re, &g.im, ctx),
            Coefficient::Approx(z) => z.clone(),
        }
    }

    fn binary(
        &self,
        o: &Coefficient,
        exact: impl Fn(&GaussRat, &GaussRat) -> GaussRat,
        approx: impl Fn(&ApproxComplex, &ApproxComplex) -> ApproxComplex,
    ) -> Coefficient {
        match (self, o) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Coefficient::Exact(exact(a, b)),
            (Coefficient::Approx(a), Coefficient::Approx(b)) => Coefficient::Approx(approx(a, b)),
            (Coefficient::Approx(a), b) => {
                Coefficient::Approx(approx(a, &b.to_approx(a.context())))
            }
            (a, Coefficient::Approx(b)) => {
                Coefficient::Approx(approx(&a.to_approx(b.context()), b))
            }
        }
    }

    pub fn add(&self, o: &Coefficient) -> Coefficient {
        self.binary(o, GaussRat::add, ApproxComplex::add)
    }

    pub fn sub(&self, o: &Coefficient) -> Coefficient {
        self.binary(o, GaussRat::sub, ApproxComplex::sub)
    }

    pub fn mul(&self, o: &Coefficient) -> Coefficient {
        self.binary(o, GaussRat::mul, ApproxComplex::mul)
    }

    pub fn div(&self, o: &Coefficient) -> Coefficient {
        self.binary(o, GaussRat::div, ApproxComplex::div)
    }

    pub fn neg(&self) -> Coefficient {
        match self {
            Coefficient::Exact(g) => Coefficient::Exact(g.neg()),
            Coefficient::Approx(z) => Coefficient::Approx(z.neg()),
        }
    }

    pub fn conj(&self) -> Coefficient {
        match self {
            Coefficient::Exact(g) => Coefficient::Exact(g.conj()),
            Coefficient::Approx(z) => Coefficient::Approx(z.conj()),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Coefficient {
        match self {
            Coefficient::Exact(g) => Coefficient::Exact(g.scale(r)),
            Coefficient::Approx(_) => self.mul(&Coefficient::from(r.clone())),
        }
    }

    pub fn pow(&self, e: u32) -> Coefficient {
        match self {
            Coefficient::Exact(g) => Coefficient::Exact(g.pow(e)),
            Coefficient::Approx(_) => {
                let mut acc = Coefficient::one();
                for _ in 0..e {
                    acc = acc.mul(self);
                }
                acc
            }
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Coefficient::Exact(g) => g.to_c64(),
            Coefficient::Approx(z) => z.to_c64(),
        }
    }

    /// Deterministic total order (exact values first, then by value).
    pub fn cmp_key(&self, o: &Coefficient) -> Ordering {
        match (self, o) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => {
                a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
            }
            (Coefficient::Exact(_), Coefficient::Approx(_)) => Ordering::Less,
            (Coefficient::Approx(_), Coefficient::Exact(_)) => Ordering::Greater,
            (Coefficient::Approx(a), Coefficient::Approx(b)) => a.cmp_key(b),
        }
    }

    /// Printed form and whether it carries a leading minus sign.
    pub(crate) fn signed_text(&self) -> (bool, String) {
        let s = self.to_string();
        match s.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, s),
        }
    }
}

impl PartialEq for Coefficient {
    /// Exact equality for exact values; approximate values compare through
    /// the zero test of their difference.
    fn eq(&self, o: &Coefficient) -> bool {
        match (self, o) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => a == b,
            _ => self.sub(o).is_zero(),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact(g) => write!(f, "{g}"),
            Coefficient::Approx(z) => write!(f, "{z}"),
        }
    }
}
