//! Text format for polynomials and arcs.
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := power (['*'] power)*
//! power    := atom ['^' exponent]
//! atom     := int ['/' int] | 'x' | 'y' | 'i' | '(' expr ')'
//! exponent := int | '(' ['-'] int ['/' int] ')'
//! arc      := 'x' '=' expr ['+' 'O' '(' 'y' ['^' exponent] ')']
//! ```
//!
//! Juxtaposition multiplies, so `3x^2y` is `3*x^2*y`. Parenthesized groups
//! are expanded. Serialization is canonical: polynomial monomials by total
//! degree, then by decreasing `x`-degree; series terms by exponent.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coeff::{Coefficient, GaussRat};
use crate::error::{Error, Result};
use crate::poly::BivarPoly;
use crate::rat::{fmt_rat, ExtRat, Rat};
use crate::series::PuiseuxSeries;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    X,
    Y,
    I,
    BigO,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => n.to_string(),
            Tok::X => "x".into(),
            Tok::Y => "y".into(),
            Tok::I => "i".into(),
            Tok::BigO => "O".into(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Eq => "=".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    while k < bytes.len() {
        let b = bytes[k];
        let start = k;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                k += 1;
                continue;
            }
            b'0'..=b'9' => {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                out.push((start, Tok::Num(text[start..k].parse().expect("digits"))));
                continue;
            }
            b'x' => Tok::X,
            b'y' => Tok::Y,
            b'i' => Tok::I,
            b'O' => Tok::BigO,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'=' => Tok::Eq,
            _ => {
                let found = text[k..]
                    .chars()
                    .next()
                    .map(String::from)
                    .unwrap_or_default();
                return Err(Error::Syntax {
                    offset: k,
                    expected: vec!["term".into()],
                    found,
                });
            }
        };
        k += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Poly,
    Arc,
}

/// Sums of `c * x^a * y^b` with rational `a, b >= 0`.
type Terms = BTreeMap<(Rat, Rat), GaussRat>;

fn t_const(c: GaussRat) -> Terms {
    let mut t = Terms::new();
    if !c.is_zero() {
        t.insert((Rat::zero(), Rat::zero()), c);
    }
    t
}

fn t_add(a: &Terms, b: &Terms, sign: bool) -> Terms {
    let mut out = a.clone();
    for (k, c) in b {
        let c = if sign { c.neg() } else { c.clone() };
        let v = out.get(k).map(|x| x.add(&c)).unwrap_or(c);
        if v.is_zero() {
            out.remove(k);
        } else {
            out.insert(k.clone(), v);
        }
    }
    out
}

fn t_mul(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for ((ax, ay), ac) in a {
        for ((bx, by), bc) in b {
            let k = (ax + bx, ay + by);
            let v = out
                .get(&k)
                .map(|x| x.add(&ac.mul(bc)))
                .unwrap_or(ac.mul(bc));
            out.insert(k, v);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    mode: Mode,
    big_o: Option<(usize, Rat)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&t.describe()])
        }
    }

    fn atom_expected(&self) -> Vec<&'static str> {
        match self.mode {
            Mode::Poly => vec!["number", "x", "y", "i", "("],
            Mode::Arc => vec!["number", "y", "i", "("],
        }
    }

    fn expr(&mut self, top: bool) -> Result<Terms> {
        let mut acc = Terms::new();
        let mut negate = match self.peek() {
            Tok::Plus => {
                self.bump();
                false
            }
            Tok::Minus => {
                self.bump();
                true
            }
            _ => false,
        };
        loop {
            if top && self.mode == Mode::Arc && *self.peek() == Tok::BigO {
                self.big_o_term()?;
            } else {
                let t = self.term()?;
                acc = t_add(&acc, &t, negate);
            }
            negate = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(acc),
            };
            self.bump();
        }
    }

    fn big_o_term(&mut self) -> Result<()> {
        let at = self.offset();
        if self.big_o.is_some() {
            return self.fail(&["term"]);
        }
        self.bump();
        self.expect(Tok::LParen)?;
        self.expect(Tok::Y)?;
        let e = if *self.peek() == Tok::Caret {
            self.bump();
            self.exponent()?
        } else {
            Rat::one()
        };
        self.expect(Tok::RParen)?;
        self.big_o = Some((at, e));
        match self.peek() {
            Tok::End => Ok(()),
            _ => self.fail(&["end of input"]),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Num(_) | Tok::X | Tok::Y | Tok::I | Tok::LParen
        )
    }

    fn term(&mut self) -> Result<Terms> {
        let mut acc = self.power()?;
        loop {
            if *self.peek() == Tok::Star {
                self.bump();
                let p = self.power()?;
                acc = t_mul(&acc, &p);
            } else if self.starts_atom() {
                let p = self.power()?;
                acc = t_mul(&acc, &p);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Terms> {
        let is_var = matches!(self.peek(), Tok::X | Tok::Y);
        let var = self.peek().clone();
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let e = self.exponent()?;
        if e.is_negative() {
            return Err(Error::NegativeExponent { offset: at });
        }
        if !e.is_integer() {
            if self.mode == Mode::Poly {
                return Err(Error::FractionalExponentInPolynomial { offset: at });
            }
            if !(is_var && var == Tok::Y) {
                return Err(Error::Syntax {
                    offset: at,
                    expected: vec!["integer exponent".into()],
                    found: fmt_rat(&e),
                });
            }
            let mut t = Terms::new();
            t.insert((Rat::zero(), e), GaussRat::one());
            return Ok(t);
        }
        let n = e.to_integer().to_u32().ok_or(Error::Syntax {
            offset: at,
            expected: vec!["small exponent".into()],
            found: fmt_rat(&e),
        })?;
        let mut acc = t_const(GaussRat::one());
        for _ in 0..n {
            acc = t_mul(&acc, &base);
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<Rat> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Rat::from_integer(n))
            }
            Tok::Minus => {
                let at = self.offset();
                self.bump();
                match self.peek() {
                    Tok::Num(_) => Err(Error::NegativeExponent { offset: at }),
                    _ => self.fail(&["number"]),
                }
            }
            Tok::LParen => {
                self.bump();
                let at = self.offset();
                let neg = if *self.peek() == Tok::Minus {
                    self.bump();
                    true
                } else {
                    false
                };
                let n = self.integer()?;
                let d = if *self.peek() == Tok::Slash {
                    self.bump();
                    self.integer()?
                } else {
                    BigInt::one()
                };
                if d.is_zero() {
                    return Err(Error::Syntax {
                        offset: at,
                        expected: vec!["nonzero denominator".into()],
                        found: "0".into(),
                    });
                }
                self.expect(Tok::RParen)?;
                let e = Rat::new(n, d);
                if neg && !e.is_zero() {
                    return Err(Error::NegativeExponent { offset: at });
                }
                Ok(e)
            }
            _ => self.fail(&["number", "("]),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.fail(&["number"]),
        }
    }

    fn atom(&mut self) -> Result<Terms> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                let mut v = Rat::from_integer(n);
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let at = self.offset();
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(Error::Syntax {
                            offset: at,
                            expected: vec!["nonzero denominator".into()],
                            found: "0".into(),
                        });
                    }
                    v /= Rat::from_integer(d);
                }
                Ok(t_const(GaussRat::real(v)))
            }
            Tok::X if self.mode == Mode::Poly => {
                self.bump();
                let mut t = Terms::new();
                t.insert((Rat::one(), Rat::zero()), GaussRat::one());
                Ok(t)
            }
            Tok::Y => {
                self.bump();
                let mut t = Terms::new();
                t.insert((Rat::zero(), Rat::one()), GaussRat::one());
                Ok(t)
            }
            Tok::I => {
                self.bump();
                Ok(t_const(GaussRat::i()))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr(false)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => {
                let exp = self.atom_expected();
                self.fail(&exp)
            }
        }
    }
}

/// Parses a polynomial in `x` and `y` with Gaussian-rational coefficients.
pub fn parse_poly(text: &str) -> Result<BivarPoly> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        mode: Mode::Poly,
        big_o: None,
    };
    let t = p.expr(false)?;
    if *p.peek() != Tok::End {
        return p.fail(&["+", "-", "*", "end of input"]);
    }
    Ok(BivarPoly::from_terms(t.into_iter().map(|((a, b), c)| {
        let i = a.to_integer().to_u32().expect("integer exponent");
        let j = b.to_integer().to_u32().expect("integer exponent");
        ((i, j), Coefficient::Exact(c))
    })))
}

/// Parses `x = <series in y> [+ O(y^e)]`.
pub fn parse_arc(text: &str) -> Result<PuiseuxSeries> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        mode: Mode::Arc,
        big_o: None,
    };
    p.expect(Tok::X)?;
    p.expect(Tok::Eq)?;
    let t = p.expr(true)?;
    if *p.peek() != Tok::End {
        return p.fail(&["+", "-", "*", "end of input"]);
    }
    let truncation = match &p.big_o {
        Some((_, e)) => ExtRat::Finite(e.clone()),
        None => ExtRat::Infinity,
    };
    let mut terms = Vec::new();
    for ((_, b), c) in t {
        if let Some((at, e)) = &p.big_o {
            if b >= *e {
                return Err(Error::TermBeyondTruncation { offset: *at });
            }
        }
        terms.push((b, Coefficient::Exact(c)));
    }
    PuiseuxSeries::from_terms(terms, truncation)
}

fn fmt_monomial(i: u32, j: u32) -> String {
    let mut parts = Vec::new();
    match i {
        0 => {}
        1 => parts.push("x".to_string()),
        _ => parts.push(format!("x^{i}")),
    }
    match j {
        0 => {}
        1 => parts.push("y".to_string()),
        _ => parts.push(format!("y^{j}")),
    }
    parts.join("*")
}

fn fmt_y_power(e: &Rat) -> String {
    if e.is_zero() {
        String::new()
    } else if e.is_one() {
        "y".into()
    } else if e.is_integer() {
        format!("y^{}", e.numer())
    } else {
        format!("y^({})", fmt_rat(e))
    }
}

/// Joins `(coefficient, monomial text)` pairs into `a - b + c` form.
fn join_terms(terms: impl IntoIterator<Item = (Coefficient, String)>) -> String {
    let mut out = String::new();
    for (c, mono) in terms {
        let (neg, text) = c.signed_text();
        let body = if mono.is_empty() {
            text
        } else if c.is_one() || (neg && c.neg().is_one()) {
            mono
        } else if text == "i" {
            format!("i*{mono}")
        } else {
            format!("{text}*{mono}")
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Canonical text of a polynomial.
pub fn format_poly(f: &BivarPoly) -> String {
    let mut terms: Vec<(&(u32, u32), &Coefficient)> = f.terms().collect();
    terms.sort_by_key(|((i, j), _)| (i + j, std::cmp::Reverse(*i)));
    join_terms(
        terms
            .into_iter()
            .map(|((i, j), c)| (c.clone(), fmt_monomial(*i, *j))),
    )
}

/// Canonical text of an arc, `x = ... [+ O(y^T)]`.
pub fn format_arc(s: &PuiseuxSeries) -> String {
    let body = s.terms().iter().map(|(e, c)| (c.clone(), fmt_y_power(e)));
    let mut text = format!("x = {}", join_terms(body));
    if let ExtRat::Finite(t) = s.truncation() {
        let o = format!(
            "O({})",
            if t.is_zero() {
                "1".into()
            } else {
                fmt_y_power(t)
            }
        );
        if s.is_zero() {
            text = format!("x = {o}");
        } else {
            text.push_str(&format!(" + {o}"));
        }
    }
    text
}

/// Text of `sum coeffs[k] z^k`, highest power first.
pub fn format_univariate(coeffs: &[Coefficient], var: &str) -> String {
    join_terms(
        coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let mono = match k {
                    0 => String::new(),
                    1 => var.to_string(),
                    _ => format!("{var}^{k}"),
                };
                (c.clone(), mono)
            }),
    )
}

impl std::fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_poly(self))
    }
}

impl std::fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_arc(self))
    }
}
