//! Gcd in `x` of integer bivariate polynomials, computed modulo word-sized
//! primes by evaluation at `y = 1, 2, ...` and interpolation, then lifted
//! by Chinese remaindering.
//!
//! Polynomials are dense matrices `c[i][j]`, the coefficient of `x^i y^j`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub(crate) type IntPoly = Vec<Vec<BigInt>>;

const MAX_PRIMES: usize = 48;

/// Lifts `gamma * G / lc(G)` for the gcd `G` of `a` and `b`, where `gamma`
/// is a multiple of `lc(G)` in `Z[y]` and `need` bounds the `y`-degree of the
/// result plus one. Candidates are offered to `accept` once two successive
/// lifts agree; `None` when no candidate is accepted.
pub(crate) fn lift_gcd<T>(
    a: &IntPoly,
    b: &IntPoly,
    gamma: &[BigInt],
    need: usize,
    accept: impl Fn(&IntPoly) -> Option<T>,
) -> Option<T> {
    let mut best = usize::MAX;
    let mut acc: Option<(IntPoly, BigInt)> = None;
    let mut last: Option<IntPoly> = None;
    for p in primes().take(MAX_PRIMES) {
        let Some((e, img)) = image(a, b, gamma, need, p) else {
            continue;
        };
        if e > best {
            continue;
        }
        if e < best {
            best = e;
            acc = None;
            last = None;
        }
        let (res, m) = match acc.take() {
            None => (
                img.iter()
                    .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                    .collect(),
                BigInt::from(p),
            ),
            Some((res, m)) => crt(&res, &m, &img, p),
        };
        let lift = symmetric(&res, &m);
        if last.as_ref() == Some(&lift) {
            if let Some(t) = accept(&lift) {
                return Some(t);
            }
        }
        last = Some(lift);
        acc = Some((res, m));
    }
    None
}

fn crt(res: &IntPoly, m: &BigInt, img: &[Vec<u64>], p: u64) -> (IntPoly, BigInt) {
    let mp = (m % p).to_u64().expect("reduced");
    let inv = inv_mod(mp, p);
    let out = res
        .iter()
        .zip(img)
        .map(|(row, irow)| {
            row.iter()
                .zip(irow)
                .map(|(x, &r)| {
                    let xp = (x % p).to_u64().expect("reduced");
                    let t = mul_mod(sub_mod(r, xp, p), inv, p);
                    x + m * BigInt::from(t)
                })
                .collect()
        })
        .collect();
    (out, m * p)
}

fn symmetric(res: &IntPoly, m: &BigInt) -> IntPoly {
    let half: BigInt = m >> 1;
    res.iter()
        .map(|row| {
            row.iter()
                .map(|x| if x > &half { x - m } else { x.clone() })
                .collect()
        })
        .collect()
}

/// `(deg, H mod p)` from `need` points of minimal gcd degree.
fn image(
    a: &IntPoly,
    b: &IntPoly,
    gamma: &[BigInt],
    need: usize,
    p: u64,
) -> Option<(usize, Vec<Vec<u64>>)> {
    let a = reduce(a, p);
    let b = reduce(b, p);
    let gamma = reduce_row(gamma, p);
    let (la, lb) = (a.last()?, b.last()?);
    let mut best = usize::MAX;
    let mut xs = Vec::new();
    let mut vals: Vec<Vec<u64>> = Vec::new();
    for y0 in 1..=(4 * need as u64 + 16) {
        let g0 = eval(&gamma, y0, p);
        if g0 == 0 || eval(la, y0, p) == 0 || eval(lb, y0, p) == 0 {
            continue;
        }
        let ua: Vec<u64> = a.iter().map(|r| eval(r, y0, p)).collect();
        let ub: Vec<u64> = b.iter().map(|r| eval(r, y0, p)).collect();
        let h = gcd_monic(ua, ub, p);
        let e = h.len() - 1;
        if e == 0 {
            return Some((0, vec![vec![1]]));
        }
        if e > best {
            continue;
        }
        if e < best {
            best = e;
            xs.clear();
            vals.clear();
        }
        xs.push(y0);
        vals.push(h.iter().map(|&c| mul_mod(c, g0, p)).collect());
        if xs.len() == need {
            let rows = (0..=e)
                .map(|i| {
                    let v: Vec<u64> = vals.iter().map(|h| h[i]).collect();
                    interpolate(&xs, &v, p)
                })
                .collect();
            return Some((e, rows));
        }
    }
    None
}

fn reduce_row(r: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    r.iter()
        .map(|x| x.mod_floor(&pb).to_u64().expect("reduced"))
        .collect()
}

fn reduce(a: &IntPoly, p: u64) -> Vec<Vec<u64>> {
    a.iter().map(|r| reduce_row(r, p)).collect()
}

fn eval(r: &[u64], y: u64, p: u64) -> u64 {
    r.iter()
        .rev()
        .fold(0, |acc, &c| add_mod(mul_mod(acc, y, p), c, p))
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Monic gcd; `[1]` for coprime inputs.
fn gcd_monic(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    let inv = inv_mod(*a.last().expect("nonzero"), p);
    a.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while r.len() > db {
        let k = r.len() - 1;
        let q = mul_mod(r[k], inv, p);
        for (j, &bj) in b.iter().enumerate() {
            let idx = k - db + j;
            r[idx] = sub_mod(r[idx], mul_mod(q, bj, p), p);
        }
        trim(&mut r);
    }
    r
}

/// Coefficients (low to high) of the interpolant through `(xs[k], vs[k])`.
fn interpolate(xs: &[u64], vs: &[u64], p: u64) -> Vec<u64> {
    let n = xs.len();
    let mut c = vs.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let d = inv_mod(sub_mod(xs[i], xs[i - j], p), p);
            c[i] = mul_mod(sub_mod(c[i], c[i - 1], p), d, p);
        }
    }
    let mut out = vec![0u64; n];
    out[0] = c[n - 1];
    let mut len = 1;
    for i in (0..n - 1).rev() {
        // out = out * (y - xs[i]) + c[i]
        for k in (0..=len).rev() {
            let hi = if k > 0 { out[k - 1] } else { 0 };
            let lo = if k < len {
                mul_mod(out[k], xs[i], p)
            } else {
                0
            };
            out[k] = sub_mod(hi, lo, p);
        }
        out[0] = add_mod(out[0], c[i], p);
        len += 1;
    }
    out
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &BASES {
        if n % q == 0 {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^62`, descending.
fn primes() -> impl Iterator<Item = u64> {
    ((1u64 << 61)..(1u64 << 62))
        .rev()
        .step_by(2)
        .filter(|&n| is_prime(n))
}

/// Integer content of a row.
pub(crate) fn row_content(r: &[BigInt]) -> BigInt {
    r.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn ip(rows: &[&[i64]]) -> IntPoly {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn primes_are_prime() {
        let ps: Vec<u64> = primes().take(3).collect();
        assert!(ps.iter().all(|&p| p > 1 << 61 && is_prime(p)));
        assert!(!is_prime(1 << 61));
    }

    #[test]
    fn interpolation_roundtrip() {
        let p = primes().next().unwrap();
        // 3 + 2y + y^2 at y = 1, 2, 3
        let v = interpolate(&[1, 2, 3], &[6, 11, 18], p);
        assert_eq!(v, vec![3, 2, 1]);
    }

    #[test]
    fn gcd_of_products() {
        // (x - y)(x + y) and (x - y)(x - 2): gcd x - y, gamma = 1
        let a = ip(&[&[0, 0, -1], &[], &[1]]);
        let b = ip(&[&[0, 2], &[-2, -1], &[1]]);
        let g = lift_gcd(&a, &b, &[BigInt::one()], 2, |h| Some(h.clone())).unwrap();
        assert_eq!(g, ip(&[&[0, -1], &[1, 0]]));
    }
}
