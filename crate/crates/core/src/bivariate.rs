//! Sparse bivariate polynomials with exact rational coefficients.
//!
//! Terms are keyed by the exponent pair `(i, j)` of `x^i y^j`; zero
//! coefficients are never stored, so structural equality is term-wise
//! equality.
//!
//! Text form follows
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := [coeff '*'] factor ('*' factor)*
//! factor := ('x' | 'y') ['^' posint]
//! coeff  := int | int '/' posint
//! ```
//!
//! with whitespace ignored. The parser also accepts a leading sign and a bare
//! `coeff` term, both of which the printer can emit.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;
use crate::rational::{self, Rational};
use crate::univariate::UnivariatePolynomial;

/// Which variable to set to one when dehomogenizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// `g(t) = p(1, t)`.
    X,
    /// `g(t) = p(t, 1)`.
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: Rational, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, coeff);
        p
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Rational)>,
    {
        let mut p = Self::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// Adds `coeff · x^i y^j`, dropping the term if it cancels.
    pub fn add_term(&mut self, i: u32, j: u32, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&(i, j)) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(&(i, j));
                }
            }
            None => {
                self.terms.insert((i, j), coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// `Some(n)` when every term has total degree `n`; the zero polynomial
    /// has no degree.
    pub fn homogeneity(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|&(i, j)| i + j);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn derivative_x(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((i, _), _)| *i > 0)
                .map(|(&(i, j), c)| ((i - 1, j), c * rational::int(i as i64))),
        )
    }

    pub fn derivative_y(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, j), _)| *j > 0)
                .map(|(&(i, j), c)| ((i, j - 1), c * rational::int(j as i64))),
        )
    }

    /// `∂²p / ∂x∂y`.
    pub fn mixed_hessian(&self) -> Self {
        self.derivative_y().derivative_x()
    }

    /// `p(y, x)`.
    pub fn transpose(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(&k, c)| (k, c * factor)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Self::monomial(Rational::one(), 0, 0);
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }

    /// Exact value at `(x, y)`: Horner in `x` over coefficient polynomials in `y`.
    pub fn evaluate(&self, x: &Rational, y: &Rational) -> Rational {
        let Some(max_i) = self.terms.keys().map(|&(i, _)| i).max() else {
            return Rational::zero();
        };
        let mut rows: Vec<Vec<(u32, &Rational)>> = (0..=max_i).map(|_| Vec::new()).collect();
        for (&(i, j), c) in &self.terms {
            rows[i as usize].push((j, c));
        }
        let horner_y = |row: &[(u32, &Rational)]| {
            let mut acc = Rational::zero();
            let mut prev = row.last().map(|&(j, _)| j).unwrap_or(0);
            for &(j, c) in row.iter().rev() {
                acc = acc * rational::pow(y, prev - j) + c;
                prev = j;
            }
            acc * rational::pow(y, prev)
        };
        let mut acc = Rational::zero();
        for row in rows.iter().rev() {
            acc = acc * x + horner_y(row);
        }
        acc
    }

    /// `f64` evaluation for numerics; coefficients are converted once per call.
    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.to_f64_terms().eval(x, y)
    }

    pub fn to_f64_terms(&self) -> FloatPolynomial {
        FloatPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| (i, j, rational::to_f64(c)))
                .collect(),
        }
    }

    /// Splits off the largest monomial `x^γ y^β` dividing `self` and
    /// substitutes the chosen variable by one.
    ///
    /// Returns `(γ, β, g)` with `g(0) ≠ 0`.
    pub fn dehomogenize(&self, axis: Axis) -> crate::error::Result<(u32, u32, UnivariatePolynomial)> {
        if self.is_zero() {
            return Err(crate::error::Error::ZeroPolynomial);
        }
        let gamma = self.terms.keys().map(|&(i, _)| i).min().unwrap_or(0);
        let beta = self.terms.keys().map(|&(_, j)| j).min().unwrap_or(0);
        let mut coeffs: BTreeMap<u32, Rational> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            let t_power = match axis {
                Axis::X => j - beta,
                Axis::Y => i - gamma,
            };
            *coeffs.entry(t_power).or_insert_with(Rational::zero) += c;
        }
        let degree = coeffs.keys().max().copied().unwrap_or(0) as usize;
        let mut dense = alloc::vec![Rational::zero(); degree + 1];
        for (k, c) in coeffs {
            dense[k as usize] = c;
        }
        Ok((gamma, beta, UnivariatePolynomial::new(dense)))
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser::new(text).expr()
    }
}

/// Graded lexicographic order: higher total degree first, then higher power of `x`.
fn graded_lex(a: &(u32, u32), b: &(u32, u32)) -> Ordering {
    (b.0 + b.1).cmp(&(a.0 + a.1)).then(b.0.cmp(&a.0))
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&(u32, u32)> = self.terms.keys().collect();
        keys.sort_by(|a, b| graded_lex(a, b));
        for (idx, key) in keys.into_iter().enumerate() {
            let c = &self.terms[key];
            let negative = c.is_negative();
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = c.abs();
            let mut factors: Vec<String> = Vec::new();
            for (var, e) in [("x", key.0), ("y", key.1)] {
                match e {
                    0 => {}
                    1 => factors.push(String::from(var)),
                    _ => factors.push(format!("{var}^{e}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{magnitude}*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Coefficients as `f64` for repeated numeric evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPolynomial {
    pub terms: Vec<(u32, u32, f64)>,
}

impl FloatPolynomial {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c * libm::pow(x, i as f64) * libm::pow(y, j as f64))
            .sum()
    }

    pub fn derivative_x(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|t| t.0 > 0)
                .map(|&(i, j, c)| (i - 1, j, c * i as f64))
                .collect(),
        }
    }

    pub fn derivative_y(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|t| t.1 > 0)
                .map(|&(i, j, c)| (i, j - 1, c * j as f64))
                .collect(),
        }
    }

    /// `Σ |c| · R_x^i · R_y^j`, an upper bound of `|p|` on `[-R_x, R_x] × [-R_y, R_y]`.
    pub fn abs_bound(&self, rx: f64, ry: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| libm::fabs(c) * libm::pow(rx, i as f64) * libm::pow(ry, j as f64))
            .sum()
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { src: text.as_bytes(), pos: 0 }
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError { position: self.pos, message: String::from(message) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).map_err(|_| self.error("invalid utf-8"))?;
        text.parse().map_err(|_| self.error("invalid integer"))
    }

    fn expr(&mut self) -> Result<BivariatePolynomial, ParseError> {
        let mut poly = BivariatePolynomial::zero();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -Rational::one()
            }
            Some(b'+') => {
                self.pos += 1;
                Rational::one()
            }
            None => return Err(self.error("empty expression")),
            _ => Rational::one(),
        };
        loop {
            let (coeff, i, j) = self.term()?;
            poly.add_term(i, j, coeff * &sign);
            match self.peek() {
                None => return Ok(poly),
                Some(b'+') => {
                    self.pos += 1;
                    sign = Rational::one();
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -Rational::one();
                }
                Some(_) => return Err(self.error("expected '+' or '-'")),
            }
        }
    }

    fn term(&mut self) -> Result<(Rational, u32, u32), ParseError> {
        let mut coeff = Rational::one();
        let (mut i, mut j) = (0u32, 0u32);
        let mut need_factor = true;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let num = self.digits()?;
            let mut den = BigInt::one();
            if self.peek() == Some(b'/') {
                self.pos += 1;
                den = self.digits()?;
                if den.is_zero() {
                    return Err(self.error("zero denominator"));
                }
            }
            coeff = Rational::new(num, den);
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                need_factor = false;
            }
        }
        if need_factor {
            loop {
                let var = match self.peek() {
                    Some(b'x') => 0,
                    Some(b'y') => 1,
                    _ => return Err(self.error("expected 'x' or 'y'")),
                };
                self.pos += 1;
                let mut exp = 1u32;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let e = self.digits()?;
                    exp = u32::try_from(e).map_err(|_| self.error("exponent too large"))?;
                    if exp == 0 {
                        return Err(self.error("exponent must be positive"));
                    }
                }
                if var == 0 {
                    i += exp;
                } else {
                    j += exp;
                }
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        Ok((coeff, i, j))
    }
}
