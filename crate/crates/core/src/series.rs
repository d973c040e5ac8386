//! Exact polynomials in one variable and power series truncated at a fixed order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{factorial, format_rational, from_natural, Rational};

/// Largest degree the expression parser will build.
pub const MAX_DEGREE: usize = 64;

/// A polynomial with rational coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: Rational) -> Self {
        Self::new(vec![value])
    }

    /// The variable `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn pow(&self, exponent: usize) -> Self {
        (0..exponent).fold(Self::constant(Rational::one()), |acc, _| &acc * self)
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &RationalPoly) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * inner) + &Self::constant(c.clone())
        })
    }

    /// Parses expressions in `x` such as `1+x^2/2`, `(1-x)^3`, `2x - 3/4`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parser = PolyParser {
            chars: text.char_indices().peekable(),
            text,
        };
        let poly = parser.expr()?;
        parser.skip_ws();
        match parser.chars.peek() {
            None => Ok(poly),
            Some(&(pos, c)) => Err(Error::syntax(format!("unexpected {c:?}"), pos)),
        }
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;

    fn add(self, other: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;

    fn sub(self, other: &RationalPoly) -> RationalPoly {
        self + &-other
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;

    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;

    fn mul(self, other: &RationalPoly) -> RationalPoly {
        if self.is_zero() || other.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let magnitude = if c < &Rational::zero() { -c } else { c.clone() };
            if first {
                if c < &Rational::zero() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < &Rational::zero() { " - " } else { " + " })?;
            }
            first = false;
            let power = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            if k == 0 {
                write!(f, "{}", format_rational(&magnitude))?;
            } else if magnitude.is_one() {
                f.write_str(&power)?;
            } else {
                write!(f, "{}*{power}", format_rational(&magnitude))?;
            }
        }
        Ok(())
    }
}

impl FromStr for RationalPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

struct PolyParser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
}

impl PolyParser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<(usize, char)> {
        self.skip_ws();
        self.chars.peek().copied()
    }

    fn position(&mut self) -> usize {
        self.peek().map_or(self.text.len(), |(p, _)| p)
    }

    fn expr(&mut self) -> Result<RationalPoly> {
        let mut acc = self.term()?;
        while let Some((_, c @ ('+' | '-'))) = self.peek() {
            self.chars.next();
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some((_, '*')) => {
                    self.chars.next();
                    acc = &acc * &self.unary()?;
                }
                Some((pos, '/')) => {
                    self.chars.next();
                    let divisor = self.unary()?;
                    match divisor.degree() {
                        Some(0) => acc = acc.scale(&divisor.coeffs[0].recip()),
                        None => return Err(Error::syntax("division by zero", pos)),
                        Some(_) => return Err(Error::syntax("can only divide by a constant", pos)),
                    }
                }
                // juxtaposition such as 2x or 3(x+1)
                Some((_, c)) if c == 'x' || c == '(' || c.is_ascii_digit() => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
            self.check_degree(&acc)?;
        }
    }

    fn unary(&mut self) -> Result<RationalPoly> {
        match self.peek() {
            Some((_, '-')) => {
                self.chars.next();
                Ok(-&self.unary()?)
            }
            Some((_, '+')) => {
                self.chars.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalPoly> {
        let base = self.atom()?;
        if let Some((_, '^')) = self.peek() {
            self.chars.next();
            let pos = self.position();
            let exponent = self.integer()?;
            let exponent: usize = exponent
                .try_into()
                .ok()
                .filter(|&e: &usize| e <= MAX_DEGREE)
                .ok_or_else(|| Error::syntax("exponent too large", pos))?;
            let result = base.pow(exponent);
            self.check_degree(&result)?;
            return Ok(result);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalPoly> {
        match self.peek() {
            Some((_, 'x')) => {
                self.chars.next();
                Ok(RationalPoly::x())
            }
            Some((_, '(')) => {
                self.chars.next();
                let inner = self.expr()?;
                match self.peek() {
                    Some((_, ')')) => {
                        self.chars.next();
                        Ok(inner)
                    }
                    _ => {
                        let pos = self.position();
                        Err(Error::syntax("expected ')'", pos))
                    }
                }
            }
            Some((_, c)) if c.is_ascii_digit() => Ok(RationalPoly::constant(
                Rational::from_integer(self.integer()?),
            )),
            Some((pos, c)) => Err(Error::syntax(format!("unexpected {c:?}"), pos)),
            None => Err(Error::syntax("unexpected end of input", self.text.len())),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.position();
        let mut digits = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            digits.push(c);
            self.chars.next();
        }
        digits
            .parse()
            .map_err(|_| Error::syntax("expected a number", start))
    }

    fn check_degree(&mut self, poly: &RationalPoly) -> Result<()> {
        if poly.degree().unwrap_or(0) > MAX_DEGREE {
            let pos = self.position();
            return Err(Error::syntax(format!("degree exceeds {MAX_DEGREE}"), pos));
        }
        Ok(())
    }
}

/// `c₀ + c₁t + … + c_N t^N`, with all arithmetic truncated at `t^N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruncatedSeries {
    #[serde(with = "crate::num::rational_vec")]
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// Pads with zeros or drops terms so that the order is exactly `order`.
    pub fn new(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(value: Rational, order: usize) -> Self {
        Self::new(vec![value], order)
    }

    /// The series `t`.
    pub fn variable(order: usize) -> Self {
        Self::new(vec![Rational::zero(), Rational::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn set_coeff(&mut self, k: usize, value: Rational) {
        self.coeffs[k] = value;
    }

    /// `k! c_k`, the `k`-th derivative at `t = 0`.
    pub fn derivative_at_zero(&self, k: usize) -> Rational {
        &self.coeffs[k] * from_natural(&factorial(k))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `s(λt)`.
    pub fn rescale(&self, lambda: &Rational) -> Self {
        let mut power = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * &power;
                power *= lambda;
                v
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn pow(&self, exponent: usize) -> Self {
        (0..exponent).fold(Self::constant(Rational::one(), self.order()), |acc, _| {
            &acc * self
        })
    }

    /// `p(s(t))` by Horner's rule.
    pub fn eval_poly(poly: &RationalPoly, series: &TruncatedSeries) -> Self {
        let order = series.order();
        poly.coeffs()
            .iter()
            .rev()
            .fold(Self::zero(order), |acc, c| {
                &(&acc * series) + &Self::constant(c.clone(), order)
            })
    }

    /// `self(inner(t))` for an inner series without constant term.
    pub fn compose(&self, inner: &TruncatedSeries) -> Result<Self> {
        self.check_order(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::DomainMismatch(
                "inner series must have zero constant term".into(),
            ));
        }
        let order = self.order();
        Ok(self.coeffs.iter().rev().fold(Self::zero(order), |acc, c| {
            &(&acc * inner) + &Self::constant(c.clone(), order)
        }))
    }

    /// `exp(s)` for a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::DomainMismatch(
                "exp needs a zero constant term".into(),
            ));
        }
        // e' = s' e, so k e_k = Σ_{j=1..k} j s_j e_{k−j}
        let order = self.order();
        let mut e = vec![Rational::zero(); order + 1];
        e[0] = Rational::one();
        for k in 1..=order {
            let sum: Rational = (1..=k)
                .map(|j| Rational::from_integer(BigInt::from(j)) * &self.coeffs[j] * &e[k - j])
                .sum();
            e[k] = sum / Rational::from_integer(BigInt::from(k));
        }
        Ok(TruncatedSeries { coeffs: e })
    }

    fn check_order(&self, other: &TruncatedSeries) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::DomainMismatch(format!(
                "series orders differ: {} and {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, other: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(other.order());
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|k| &self.coeffs[k] + &other.coeffs[k])
                .collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, other: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(other.order());
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|k| &self.coeffs[k] - &other.coeffs[k])
                .collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, other: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(other.order());
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs: out }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `β^(k)(g₀)` for `k = 0..=order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaJet {
    base: Rational,
    values: Vec<Rational>,
}

impl BetaJet {
    pub fn new(beta: &RationalPoly, base: &Rational, order: usize) -> Self {
        let mut values = Vec::with_capacity(order + 1);
        let mut p = beta.clone();
        for _ in 0..=order {
            values.push(p.eval(base));
            p = p.derivative();
        }
        BetaJet {
            base: base.clone(),
            values,
        }
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn value(&self, k: usize) -> Result<&Rational> {
        self.values.get(k).ok_or(Error::OrderExceeded {
            requested: k,
            available: self.order(),
        })
    }
}
