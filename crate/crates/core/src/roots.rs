//! Nonzero roots of univariate polynomials with tower coefficients.
//!
//! Exact input: squarefree parts are computed exactly, Gaussian-rational
//! roots are recognized and verified exactly, the rest are refined to the
//! working precision. Approximate input: simultaneous Aberth iteration with
//! clustering to recover multiplicities.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::approx::{ApproxComplex, Float, NumericContext};
use crate::coeff::{Coefficient, GaussRat};
use crate::rat::Rat;
use crate::upoly::UPoly;

#[derive(Clone, Debug)]
pub struct Root {
    pub value: Coefficient,
    pub multiplicity: usize,
}

/// Nonzero roots of `sum coeffs[k] z^k`, with multiplicities, in a
/// deterministic order (exact roots first). Also returns how many root
/// decisions relied on the tolerance test.
pub fn nonzero_roots(coeffs: &[Coefficient], ctx: NumericContext) -> (Vec<Root>, usize) {
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let high = coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    if high <= low {
        return (Vec::new(), 0);
    }
    let p = &coeffs[low..=high];
    let (mut roots, decisions) = if p.iter().all(Coefficient::is_exact) {
        let g: Vec<GaussRat> = p
            .iter()
            .map(|c| c.as_exact().expect("exact").clone())
            .collect();
        (exact_roots(&UPoly::new(g), ctx), 0)
    } else {
        approx_roots(p, ctx)
    };
    roots.sort_by(|a, b| a.value.cmp_key(&b.value));
    (roots, decisions)
}

fn exact_roots(p: &UPoly, ctx: NumericContext) -> Vec<Root> {
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree() {
        let mut q = factor;
        // Linear factors need no numerics.
        if q.degree() == Some(1) {
            let r = q.coeff(0).neg().div(&q.coeff(1));
            out.push(Root {
                value: Coefficient::Exact(r),
                multiplicity: mult,
            });
            continue;
        }
        let approx = refine_simple(&q, ctx);
        let mut leftover = Vec::new();
        for z in approx {
            match recognize(&q, &z) {
                Some(r) => {
                    let lin = UPoly::new(vec![r.neg(), GaussRat::one()]);
                    q = q.exact_div(&lin).expect("verified root divides");
                    out.push(Root {
                        value: Coefficient::Exact(r),
                        multiplicity: mult,
                    });
                }
                None => leftover.push(z),
            }
        }
        for z in leftover {
            out.push(Root {
                value: Coefficient::Approx(z),
                multiplicity: mult,
            });
        }
    }
    out
}

/// Tries `round(L*z)/L` for the Gaussian-integer leading coefficient `L` of
/// the integer-cleared polynomial; accepted only if it is an exact root.
fn recognize(q: &UPoly, z: &ApproxComplex) -> Option<GaussRat> {
    let mut den = BigInt::one();
    for a in q.coeffs() {
        den = num_integer::lcm(den, a.re.denom().clone());
        den = num_integer::lcm(den, a.im.denom().clone());
    }
    let lead = q.lead().scale(&Rat::from_integer(den));
    let l = ApproxComplex::from_rats(&lead.re, &lead.im, z.context());
    let w = l.mul(z);
    let re = round_float(w.re())?;
    let im = round_float(w.im())?;
    let cand = GaussRat::new(Rat::from_integer(re), Rat::from_integer(im)).div(&lead);
    // the rounded value must actually be z, not a neighbouring exact root
    let ctx = z.context();
    let gap = ApproxComplex::from_rats(&cand.re, &cand.im, ctx)
        .sub(z)
        .log2_abs();
    let close = gap <= z.log2_abs().max(0.0) - ctx.precision_bits as f64 / 2.0;
    (close && q.is_root(&cand)).then_some(cand)
}

fn round_float(x: &Float) -> Option<BigInt> {
    let n = x.round().to_int().value();
    n.to_string().parse().ok()
}

fn to_approx_coeffs(p: &[GaussRat], ctx: NumericContext) -> Vec<ApproxComplex> {
    p.iter()
        .map(|a| ApproxComplex::from_rats(&a.re, &a.im, ctx))
        .collect()
}

/// Simple roots of an exact squarefree polynomial at the working precision.
fn refine_simple(q: &UPoly, ctx: NumericContext) -> Vec<ApproxComplex> {
    let work = NumericContext {
        precision_bits: ctx.precision_bits + 32,
        ..ctx
    };
    let coeffs = to_approx_coeffs(q.coeffs(), work);
    let start = aberth_f64(&coeffs.iter().map(|c| c.to_c64()).collect::<Vec<_>>());
    let roots = aberth_hp(&coeffs, start, work, 200);
    roots
        .into_iter()
        .map(|z| ApproxComplex::new(z.re().clone(), z.im().clone(), ctx))
        .collect()
}

fn approx_roots(p: &[Coefficient], ctx: NumericContext) -> (Vec<Root>, usize) {
    let ctx = p
        .iter()
        .filter_map(Coefficient::context)
        .fold(ctx, |a, b| NumericContext {
            precision_bits: a.precision_bits.max(b.precision_bits),
            tolerance_bits: a.tolerance_bits.min(b.tolerance_bits),
        });
    let coeffs: Vec<ApproxComplex> = p.iter().map(|c| c.to_approx(ctx)).collect();
    let start = aberth_f64(&coeffs.iter().map(|c| c.to_c64()).collect::<Vec<_>>());
    let roots = aberth_hp(&coeffs, start, ctx, 400);
    let deg = roots.len();
    // Members of a k-fold cluster spread like eps^(1/k); distinct roots of
    // the polynomials met here are far further apart.
    let radius_bits = ctx.precision_bits as f64 / (2.0 * deg as f64);
    let mut used = vec![false; deg];
    let mut out = Vec::new();
    let mut decisions = 0;
    for a in 0..deg {
        if used[a] {
            continue;
        }
        used[a] = true;
        let mut members = vec![a];
        let scale = roots[a].log2_abs().max(0.0);
        for b in a + 1..deg {
            if used[b] {
                continue;
            }
            let d = roots[a].sub(&roots[b]).log2_abs();
            if d <= scale - radius_bits {
                used[b] = true;
                members.push(b);
            }
        }
        if members.len() > 1 {
            decisions += 1;
        }
        let mut sum = roots[members[0]].clone();
        for &m in &members[1..] {
            sum = sum.add(&roots[m]);
        }
        let k = Rat::from_integer(BigInt::from(members.len()));
        let n = ApproxComplex::from_rats(&k, &Rat::zero(), ctx);
        let centroid = sum.div(&n);
        let centroid = ApproxComplex::new(centroid.re().clone(), centroid.im().clone(), ctx);
        out.push(Root {
            value: Coefficient::Approx(centroid),
            multiplicity: members.len(),
        });
    }
    (out, decisions)
}

fn horner_c64(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::zero();
    let mut d = Complex64::zero();
    for a in p.iter().rev() {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

/// Double-precision Aberth iteration from points on a circle of the
/// Cauchy-bound radius.
fn aberth_f64(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let lead = p[n];
    let p: Vec<Complex64> = p.iter().map(|a| a / lead).collect();
    let radius = p[..n]
        .iter()
        .map(|a| a.norm())
        .fold(0.0f64, f64::max)
        .max(1e-3)
        .min(1e12);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, t)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (v, d) = horner_c64(&p, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let s: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| Complex64::one() / (z[k] - z[j]))
                .sum();
            let w = ratio / (Complex64::one() - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / z[k].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn horner_hp(p: &[ApproxComplex], z: &ApproxComplex) -> (ApproxComplex, ApproxComplex) {
    let ctx = z.context();
    let zero = ApproxComplex::from_rats(&Rat::zero(), &Rat::zero(), ctx);
    let mut v = zero.clone();
    let mut d = zero;
    for a in p.iter().rev() {
        d = d.mul(z).add(&v);
        v = v.mul(z).add(a);
    }
    (v, d)
}

/// Aberth iteration at full precision, starting from double-precision roots.
fn aberth_hp(
    p: &[ApproxComplex],
    start: Vec<Complex64>,
    ctx: NumericContext,
    max_iter: usize,
) -> Vec<ApproxComplex> {
    let n = start.len();
    let one = ApproxComplex::from_rats(&Rat::one(), &Rat::zero(), ctx);
    let mut z: Vec<ApproxComplex> = start
        .into_iter()
        .map(|s| ApproxComplex::from_c64(s, ctx))
        .collect();
    let target = -(ctx.precision_bits as f64) + 4.0;
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (v, d) = horner_hp(p, &z[k]);
            if v.log2_abs() == f64::NEG_INFINITY {
                done[k] = true;
                continue;
            }
            let ratio = v.div(&d);
            let mut s = ApproxComplex::from_rats(&Rat::zero(), &Rat::zero(), ctx);
            for j in 0..n {
                if j != k {
                    s = s.add(&one.div(&z[k].sub(&z[j])));
                }
            }
            let w = ratio.div(&one.sub(&ratio.mul(&s)));
            let wl = w.log2_abs();
            if !wl.is_finite() && wl != f64::NEG_INFINITY {
                done[k] = true;
                continue;
            }
            z[k] = z[k].sub(&w);
            let rel = wl - z[k].log2_abs().max(-(ctx.precision_bits as f64));
            if rel < target {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    z.into_iter()
        .map(|x| ApproxComplex::new(x.re().clone(), x.im().clone(), ctx))
        .collect()
}

/// Value of `sum coeffs[k] z^k`.
pub fn eval_coeffs(coeffs: &[Coefficient], z: &Coefficient) -> Coefficient {
    let mut acc = Coefficient::zero();
    for a in coeffs.iter().rev() {
        acc = acc.mul(z).add(a);
    }
    acc
}

/// Derivative of a coefficient list.
pub fn derivative(coeffs: &[Coefficient]) -> Vec<Coefficient> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| a.scale_rat(&Rat::from_integer(BigInt::from(k))))
        .collect()
}
