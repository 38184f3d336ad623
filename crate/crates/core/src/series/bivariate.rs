//! Bivariate exponential polynomials `Σ Q_k(x, y)·e^{α_k x + β_k y}` with
//! integer exponents, their Taylor expansion in `x`, and a small parser.

use std::collections::BTreeMap;

use num_traits::{One, Pow, ToPrimitive, Zero};

use super::exp_poly::ExpPoly;
use super::poly::Poly;
use super::sequence::{CoefficientFamily, ExpPolySequence};
use super::{rat, Rational, SeriesError};

/// `Σ_i rows[i](y)·x^i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    rows: Vec<Poly>,
}

impl BiPoly {
    fn new(mut rows: Vec<Poly>) -> Self {
        while rows.last().is_some_and(Poly::is_zero) {
            rows.pop();
        }
        Self { rows }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![Poly::constant(c)])
    }

    /// Coefficient of `x^i`, a polynomial in `y`.
    pub fn row(&self, i: usize) -> Poly {
        self.rows.get(i).cloned().unwrap_or_default()
    }

    pub fn x_degree(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let len = self.rows.len().max(other.rows.len());
        Self::new((0..len).map(|i| &self.row(i) + &other.row(i)).collect())
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::default();
        }
        let mut rows = vec![Poly::zero(); self.rows.len() + other.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in other.rows.iter().enumerate() {
                rows[i + j] = &rows[i + j] + &(a * b);
            }
        }
        Self::new(rows)
    }

    fn scale(&self, c: &Rational) -> Self {
        Self::new(self.rows.iter().map(|r| r.scale(c)).collect())
    }

    fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.rows.iter().rev().fold(0.0, |acc, r| acc * x + r.eval_f64(y))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivariateExpPoly {
    terms: BTreeMap<(i32, i32), BiPoly>,
}

impl BivariateExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_term((0, 0), BiPoly::constant(c))
    }

    pub fn x() -> Self {
        Self::from_term((0, 0), BiPoly::new(vec![Poly::zero(), Poly::one()]))
    }

    pub fn y() -> Self {
        Self::from_term((0, 0), BiPoly::new(vec![Poly::identity()]))
    }

    /// `e^{αx + βy}`.
    pub fn exp(alpha: i32, beta: i32) -> Self {
        Self::from_term((alpha, beta), BiPoly::constant(Rational::one()))
    }

    fn from_term(key: (i32, i32), q: BiPoly) -> Self {
        let mut f = Self::zero();
        f.add_term(key, q);
        f
    }

    fn add_term(&mut self, key: (i32, i32), q: BiPoly) {
        let entry = self.terms.entry(key).or_default();
        *entry = entry.add(&q);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// `((α, β), Q)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &BiPoly)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, q) in &other.terms {
            out.add_term(*k, q.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a1, b1), q1) in &self.terms {
            for ((a2, b2), q2) in &other.terms {
                out.add_term((a1 + a2, b1 + b2), q1.mul(q2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Rational::one()), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (k, q) in &self.terms {
            out.add_term(*k, q.scale(c));
        }
        out
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|((a, b), q)| q.eval_f64(x, y) * (f64::from(*a) * x + f64::from(*b) * y).exp())
            .sum()
    }

    /// The constant value if this is a plain rational.
    fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        let q = self.terms.get(&(0, 0))?;
        (self.terms.len() == 1 && q.rows.len() == 1 && q.rows[0].degree() == Some(0))
            .then(|| q.rows[0].coeff(0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `f_n(y) = ∂_x^n F(0, y)`, the coefficient of `x^n/n!`.
    ///
    /// For one term, `∂_x^n [Q e^{αx}]_{x=0} = Σ_k n^{(k)} α^{n-k} [x^k]Q`.
    pub fn x_taylor_coefficient(&self, n: u64) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for ((alpha, beta), q) in &self.terms {
            let alpha = rat(i64::from(*alpha));
            let mut acc = Poly::zero();
            for k in 0..=q.x_degree().unwrap_or(0).min(n as usize) {
                let row = q.row(k);
                if row.is_zero() {
                    continue;
                }
                let falling = Poly::falling_factorial(k).eval_int(n);
                let power: Rational = Pow::pow(&alpha, n - k as u64);
                acc = &acc + &row.scale(&(falling * power));
            }
            out.add_term(rat(i64::from(*beta)), acc);
        }
        out
    }

    /// The plain coefficient `[x^n] F = f_n / n!`.
    pub fn x_power_coefficient(&self, n: u64) -> ExpPoly {
        let factorial = (1..=n).fold(Rational::one(), |acc, k| acc * rat(k as i64));
        self.x_taylor_coefficient(n).scale(&factorial.recip())
    }

    /// All `f_n` at once, as sequences in `n`: for `α ≠ 0` the term
    /// `[y^l][x^k]Q · n^{(k)} α^{-k} · α^n`, and for `α = 0` the single value
    /// `k!·[y^l][x^k]Q` at `n = k`.
    pub fn x_taylor_coefficient_sequence(&self) -> CoefficientFamily {
        let mut family = CoefficientFamily::zero();
        for ((alpha, beta), q) in &self.terms {
            let beta = rat(i64::from(*beta));
            for (k, row) in q.rows.iter().enumerate() {
                for (l, c) in row.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut s = ExpPolySequence::zero();
                    if *alpha == 0 {
                        let factorial = (1..=k).fold(Rational::one(), |acc, i| acc * rat(i as i64));
                        s.add_correction(k as u64, c * factorial);
                    } else {
                        let a = rat(i64::from(*alpha));
                        let inv: Rational = Pow::pow(&a.recip(), k as u64);
                        s.add_term(a, Poly::falling_factorial(k).scale(&(c * inv)));
                    }
                    family.add(beta.clone(), l, s);
                }
            }
        }
        family
    }

    /// Parses expressions such as `15e^(2x+y)(2x^2+x(6-4y)+5) - 10e^(x)(x+1)`.
    ///
    /// Grammar: sums and differences of products; juxtaposition multiplies;
    /// `/` divides by a constant; `^` takes a non-negative integer power;
    /// `e^(…)` and `exp(…)` take an integer-linear form in `x` and `y`.
    pub fn parse(src: &str) -> Result<Self, SeriesError> {
        let mut p = Parser { chars: src.chars().collect(), pos: 0 };
        let value = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(value)
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: &str) -> SeriesError {
        SeriesError::Parse { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        let matches = s.chars().enumerate().all(|(i, c)| self.chars.get(self.pos + i) == Some(&c));
        if matches {
            self.pos += s.chars().count();
        }
        matches
    }

    fn expect(&mut self, s: &str) -> Result<(), SeriesError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{s}'")))
        }
    }

    fn expr(&mut self) -> Result<BivariateExpPoly, SeriesError> {
        let mut negate = match self.peek() {
            Some('-') => {
                self.pos += 1;
                true
            }
            Some('+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut acc = BivariateExpPoly::zero();
        loop {
            let t = self.term()?;
            acc = if negate { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some('+') => negate = false,
                Some('-') => negate = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<BivariateExpPoly, SeriesError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self
                        .power()?
                        .as_constant()
                        .filter(|d| !d.is_zero())
                        .ok_or_else(|| self.error("can only divide by a nonzero constant"))?;
                    acc = acc.scale(&d.recip());
                }
                Some(c) if c.is_ascii_digit() || matches!(c, 'x' | 'y' | 'e' | '(') => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<BivariateExpPoly, SeriesError> {
        let base = self.factor()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let k = self.integer()?;
            let k = u32::try_from(k).map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64, SeriesError> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| self.error("expected an integer"))
    }

    fn factor(&mut self) -> Result<BivariateExpPoly, SeriesError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let whole = self.integer()?;
                let mut value = rat(whole as i64);
                if self.chars.get(self.pos) == Some(&'.') {
                    self.pos += 1;
                    let start = self.pos;
                    let frac = self.integer()?;
                    let places = (self.pos - start) as u32;
                    let denom = num_bigint::BigInt::from(10).pow(places);
                    value += Rational::new(frac.into(), denom);
                }
                Ok(BivariateExpPoly::constant(value))
            }
            Some('x') => {
                self.pos += 1;
                Ok(BivariateExpPoly::x())
            }
            Some('y') => {
                self.pos += 1;
                Ok(BivariateExpPoly::y())
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(inner)
            }
            Some('e') => {
                if !(self.eat("exp(") || self.eat("e^(")) {
                    return Err(self.error("expected 'exp(' or 'e^('"));
                }
                let inner = self.expr()?;
                self.expect(")")?;
                let (alpha, beta) = self.linear_exponent(&inner)?;
                Ok(BivariateExpPoly::exp(alpha, beta))
            }
            _ => Err(self.error("expected a number, variable, exponential or '('")),
        }
    }

    /// `(α, β)` from `αx + βy` with integer coefficients and no constant.
    fn linear_exponent(&self, f: &BivariateExpPoly) -> Result<(i32, i32), SeriesError> {
        let err = || self.error("exponent must be an integer combination of x and y");
        if f.is_zero() {
            return Ok((0, 0));
        }
        let q = match (f.terms.len(), f.terms.get(&(0, 0))) {
            (1, Some(q)) => q,
            _ => return Err(err()),
        };
        let row0 = q.row(0);
        let row1 = q.row(1);
        if q.rows.len() > 2 || !row0.coeff(0).is_zero() || row0.degree().unwrap_or(0) > 1 || row1.degree().unwrap_or(0) > 0 {
            return Err(err());
        }
        let to_int = |r: Rational| -> Result<i32, SeriesError> {
            if !r.is_integer() {
                return Err(err());
            }
            r.to_integer().to_i32().ok_or_else(err)
        };
        Ok((to_int(row1.coeff(0))?, to_int(row0.coeff(1))?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates() {
        let f = BivariateExpPoly::parse("15e^(2x+y)(2x^2+x(6-4y)+5) - 10exp(x)(x+1)").unwrap();
        let (x, y) = (0.7_f64, -1.3_f64);
        let direct = 15.0 * (2.0 * x + y).exp() * (2.0 * x * x + x * (6.0 - 4.0 * y) + 5.0)
            - 10.0 * x.exp() * (x + 1.0);
        assert!((f.eval_f64(x, y) - direct).abs() < 1e-12);
    }

    #[test]
    fn parse_errors() {
        assert!(BivariateExpPoly::parse("e^(x^2)").is_err());
        assert!(BivariateExpPoly::parse("e^(x+1)").is_err());
        assert!(BivariateExpPoly::parse("3x +").is_err());
        assert!(BivariateExpPoly::parse("x/y").is_err());
        assert_eq!(
            BivariateExpPoly::parse("7/240").unwrap(),
            BivariateExpPoly::constant(Rational::new(7.into(), 240.into()))
        );
    }

    #[test]
    fn taylor_coefficient_of_exponential() {
        let f = BivariateExpPoly::exp(1, 0);
        assert_eq!(f.x_taylor_coefficient(3), ExpPoly::polynomial(Poly::one()));
    }

    #[test]
    fn sequence_matches_pointwise_expansion() {
        let f = BivariateExpPoly::parse("x^2 e^(2x+y) - 3x + y^2 e^(3x) + x^4").unwrap();
        let family = f.x_taylor_coefficient_sequence();
        for n in 0..12 {
            assert_eq!(family.at(n), f.x_taylor_coefficient(n), "n={n}");
        }
    }
}
