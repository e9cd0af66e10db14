//! Sparse multivariate polynomials with exact coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{int, parse_scalar, scalar_to_string, RingSpec, Scalar};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Scalar, nvars: usize) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        Self::monomial(m, int(1))
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Reduces the coefficients into the canonical range of `ring`, dropping zeros.
    pub fn reduce(&self, ring: RingSpec) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), ring.red(c.clone())))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Poly { terms }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(m.clone()).or_insert_with(Scalar::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Poly { terms }
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                *terms.entry(m).or_insert_with(Scalar::zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { terms }
    }

    pub fn pow(&self, e: u32, nvars: usize) -> Poly {
        let mut acc = Poly::constant(int(1), nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut m2 = m.clone();
                m2[i] -= 1;
                terms.insert(m2, c * int(m[i]));
            }
        }
        Poly { terms }
    }

    /// Total degree with variable weights; `None` for the zero polynomial.
    pub fn weighted_degree(&self, weights: &[i64]) -> Option<i64> {
        self.terms.keys().map(|m| m.iter().zip(weights).map(|(e, w)| *e as i64 * w).sum()).max()
    }

    pub fn is_homogeneous(&self, weights: &[i64]) -> bool {
        let mut degs = self.terms.keys().map(|m| m.iter().zip(weights).map(|(e, w)| *e as i64 * w).sum::<i64>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// The variables that occur.
    pub fn support(&self) -> Vec<usize> {
        let mut v: Vec<usize> =
            self.terms.keys().flat_map(|m| m.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| i)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The constant term, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|e| *e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn format(&self, vars: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Scalar::zero();
            let a = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.iter().all(|e| *e == 0) {
                factors.push(scalar_to_string(&a));
            }
            for (i, e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(vars[i].clone()),
                    _ => factors.push(format!("{}^{e}", vars[i])),
                }
            }
            let _ = write!(out, "{}", factors.join("*"));
        }
        out
    }

    /// Parses integer-coefficient polynomials such as `x^2 - 3`, `2*x*y + y^3` or `(x+1)^2`.
    pub fn parse(s: &str, vars: &[String]) -> Result<Poly> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0, vars, src: s };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*^()/".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in polynomial {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [String],
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, m: &str) -> Error {
        Error::Parse(format!("{m} in polynomial {:?}", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut neg = false;
        if self.peek() == Some(&Tok::Op('-')) {
            neg = true;
            self.pos += 1;
        } else if self.peek() == Some(&Tok::Op('+')) {
            self.pos += 1;
        }
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let Some(Tok::Num(n)) = self.peek().cloned() else { return Err(self.err("expected a number after '/'")) };
                    self.pos += 1;
                    let d = parse_scalar(&n)?;
                    if d.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.scale(&d.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let Some(Tok::Num(n)) = self.peek().cloned() else { return Err(self.err("expected an exponent")) };
            self.pos += 1;
            let e: u32 = n.parse().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e, self.vars.len()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        let n = self.vars.len();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                Ok(Poly::constant(parse_scalar(&s)?, n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = self.vars.iter().position(|v| *v == name).ok_or_else(|| self.err(&format!("unknown variable {name:?}")))?;
                Ok(Poly::var(i, n))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(self.err("missing ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            _ => Err(self.err("unexpected end of input")),
        }
    }
}
