//! Arbitrary-precision complex floats with a cancellation-aware zero test.
//!
//! Every value carries a running magnitude bound (`scale`, stored as log2):
//! sums take the larger bound of their operands, products multiply bounds.
//! A value is treated as zero when `|z| <= tau * scale`, so a sum that
//! cancels down to rounding noise is recognized as zero no matter how large
//! the terms that produced it were.

use std::fmt;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::ops::{BitTest, UnsignedAbs};
use dashu_int::{IBig, Sign, UBig};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::rat::Rat;

pub type Float = FBig<HalfEven, 2>;

/// Working precision and zero tolerance for the approximate tower.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericContext {
    pub precision_bits: usize,
    /// `tau = 2^-tolerance_bits`.
    pub tolerance_bits: f64,
}

impl Default for NumericContext {
    fn default() -> Self {
        Self::with_precision(256)
    }
}

impl NumericContext {
    /// Precision `p` with the default tolerance `2^(-p/2)`.
    pub fn with_precision(precision_bits: usize) -> Self {
        let precision_bits = precision_bits.max(64);
        Self {
            precision_bits,
            tolerance_bits: precision_bits as f64 / 2.0,
        }
    }

    /// Sets `tau = 10^-k`.
    pub fn tolerance_decimal(mut self, k: u32) -> Self {
        self.tolerance_bits = k as f64 * std::f64::consts::LOG2_10;
        self
    }

    fn merge(self, other: NumericContext) -> NumericContext {
        NumericContext {
            precision_bits: self.precision_bits.max(other.precision_bits),
            tolerance_bits: self.tolerance_bits.min(other.tolerance_bits),
        }
    }
}

pub(crate) fn bigint_to_ibig(n: &BigInt) -> IBig {
    let (sign, bytes) = n.to_bytes_le();
    let mag = UBig::from_le_bytes(&bytes);
    let sign = if sign == num_bigint::Sign::Minus {
        Sign::Negative
    } else {
        Sign::Positive
    };
    IBig::from_parts(sign, mag)
}

pub(crate) fn float_from_rat(r: &Rat, precision: usize) -> Float {
    if r.is_zero() {
        return Float::ZERO.with_precision(precision).value();
    }
    let n = Float::from(bigint_to_ibig(r.numer()))
        .with_precision(precision)
        .value();
    let d = Float::from(bigint_to_ibig(r.denom()))
        .with_precision(precision)
        .value();
    n / d
}

pub(crate) fn float_from_f64(x: f64, precision: usize) -> Float {
    Float::try_from(x)
        .unwrap_or(Float::ZERO)
        .with_precision(precision)
        .value()
}

/// log2 |x|, or -inf for zero. Accurate to a few ulps of f64, which is all
/// the zero test needs.
pub(crate) fn log2_abs(x: &Float) -> f64 {
    let repr = x.repr();
    let sig = repr.significand();
    if sig.is_zero() {
        return f64::NEG_INFINITY;
    }
    let mag: UBig = sig.unsigned_abs();
    let bits = mag.bit_len();
    let (top, shift) = if bits > 60 {
        (mag >> (bits - 60), bits - 60)
    } else {
        (mag, 0)
    };
    let top: u64 = u64::try_from(&top).expect("at most 60 bits");
    (top as f64).log2() + shift as f64 + repr.exponent() as f64
}

pub(crate) fn float_to_f64(x: &Float) -> f64 {
    x.to_f64().value()
}

/// Complex number at `P` bits with its magnitude bound.
#[derive(Clone, Debug)]
pub struct ApproxComplex {
    re: Float,
    im: Float,
    /// log2 of a bound on the magnitudes that were combined to make this value.
    scale: f64,
    ctx: NumericContext,
}

impl ApproxComplex {
    pub fn new(re: Float, im: Float, ctx: NumericContext) -> Self {
        let mut z = ApproxComplex {
            re: re.with_precision(ctx.precision_bits).value(),
            im: im.with_precision(ctx.precision_bits).value(),
            scale: f64::NEG_INFINITY,
            ctx,
        };
        z.scale = z.log2_abs();
        z
    }

    pub fn from_rats(re: &Rat, im: &Rat, ctx: NumericContext) -> Self {
        Self::new(
            float_from_rat(re, ctx.precision_bits),
            float_from_rat(im, ctx.precision_bits),
            ctx,
        )
    }

    pub fn from_c64(z: Complex64, ctx: NumericContext) -> Self {
        Self::new(
            float_from_f64(z.re, ctx.precision_bits),
            float_from_f64(z.im, ctx.precision_bits),
            ctx,
        )
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn context(&self) -> NumericContext {
        self.ctx
    }

    pub fn scale_log2(&self) -> f64 {
        self.scale
    }

    pub fn log2_abs(&self) -> f64 {
        let a = log2_abs(&self.re);
        let b = log2_abs(&self.im);
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        hi + 0.5 * (1.0 + (2f64).powf(2.0 * (lo - hi))).log2()
    }

    /// The zero test: `|z| <= tau * scale`.
    pub fn is_negligible(&self) -> bool {
        let mag = self.log2_abs();
        mag == f64::NEG_INFINITY || mag <= self.scale - self.ctx.tolerance_bits
    }

    /// Imaginary part negligible relative to the value's scale.
    pub fn imag_negligible(&self) -> bool {
        let mag = log2_abs(&self.im);
        mag == f64::NEG_INFINITY || mag <= self.scale - self.ctx.tolerance_bits
    }

    pub fn real_part(&self) -> ApproxComplex {
        ApproxComplex {
            re: self.re.clone(),
            im: Float::ZERO.with_precision(self.ctx.precision_bits).value(),
            scale: self.scale,
            ctx: self.ctx,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(float_to_f64(&self.re), float_to_f64(&self.im))
    }

    pub fn add(&self, o: &ApproxComplex) -> ApproxComplex {
        let ctx = self.ctx.merge(o.ctx);
        let mut z = ApproxComplex {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
            scale: self.scale.max(o.scale),
            ctx,
        };
        z.scale = z.scale.max(z.log2_abs());
        z
    }

    pub fn neg(&self) -> ApproxComplex {
        ApproxComplex {
            re: -self.re.clone(),
            im: -self.im.clone(),
            scale: self.scale,
            ctx: self.ctx,
        }
    }

    pub fn sub(&self, o: &ApproxComplex) -> ApproxComplex {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &ApproxComplex) -> ApproxComplex {
        let ctx = self.ctx.merge(o.ctx);
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        let mut z = ApproxComplex {
            re,
            im,
            scale: self.scale + o.scale,
            ctx,
        };
        z.scale = z.scale.max(z.log2_abs());
        z
    }

    /// Division. The quotient's scale is the dividend's scale over |divisor|.
    pub fn div(&self, o: &ApproxComplex) -> ApproxComplex {
        let ctx = self.ctx.merge(o.ctx);
        let den = &o.re * &o.re + &o.im * &o.im;
        let re = (&self.re * &o.re + &self.im * &o.im) / &den;
        let im = (&self.im * &o.re - &self.re * &o.im) / &den;
        let mut z = ApproxComplex {
            re,
            im,
            scale: self.scale - o.log2_abs(),
            ctx,
        };
        z.scale = z.scale.max(z.log2_abs());
        z
    }

    pub fn conj(&self) -> ApproxComplex {
        ApproxComplex {
            re: self.re.clone(),
            im: -self.im.clone(),
            scale: self.scale,
            ctx: self.ctx,
        }
    }

    /// Deterministic total order used to normalize branch lists.
    pub fn cmp_key(&self, o: &ApproxComplex) -> std::cmp::Ordering {
        self.re
            .partial_cmp(&o.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                self.im
                    .partial_cmp(&o.im)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    }
}

fn fmt_float(x: &Float, digits: usize) -> String {
    let v = float_to_f64(x);
    if v == 0.0 || !v.is_finite() {
        return format!("{v:e}");
    }
    if (1e-4..1e6).contains(&v.abs()) {
        let s = format!("{v:.digits$}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.digits$e}")
    }
}

impl fmt::Display for ApproxComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re_zero = self.re.repr().significand().is_zero();
        let im_zero = self.imag_negligible();
        let re_s = fmt_float(&self.re, 15);
        let im_abs = if self.im < Float::ZERO {
            -self.im.clone()
        } else {
            self.im.clone()
        };
        let im_s = fmt_float(&im_abs, 15);
        match (re_zero, im_zero) {
            (_, true) => write!(f, "{re_s}"),
            (true, false) => {
                if self.im < Float::ZERO {
                    write!(f, "-{im_s}*i")
                } else {
                    write!(f, "{im_s}*i")
                }
            }
            (false, false) => {
                let sign = if self.im < Float::ZERO { '-' } else { '+' };
                write!(f, "({re_s}{sign}{im_s}*i)")
            }
        }
    }
}
