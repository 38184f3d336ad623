//! Exponential-polynomial sequences `s(n) = Σ q_j(n) β_j^n` plus finitely
//! many point corrections.

use std::collections::BTreeMap;

use num_traits::{Pow, Zero};

use super::exp_poly::ExpPoly;
use super::poly::Poly;
use super::Rational;

/// `s(n) = Σ_j q_j(n)·β_j^n + corrections[n]`, with nonzero bases.
///
/// Bases equal to zero only contribute at finitely many `n` and are stored
/// as corrections.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPolySequence {
    terms: BTreeMap<Rational, Poly>,
    corrections: BTreeMap<u64, Rational>,
}

impl ExpPolySequence {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `q(n)·base^n`; a zero base is rejected by [`Self::add_term`].
    pub fn term(base: Rational, q: Poly) -> Self {
        let mut s = Self::zero();
        s.add_term(base, q);
        s
    }

    pub fn add_term(&mut self, base: Rational, q: Poly) {
        assert!(!base.is_zero(), "zero base must be stored as a correction");
        let entry = self.terms.entry(base.clone()).or_default();
        *entry = &*entry + &q;
        if entry.is_zero() {
            self.terms.remove(&base);
        }
    }

    pub fn add_correction(&mut self, n: u64, value: Rational) {
        let entry = self.corrections.entry(n).or_insert_with(Rational::zero);
        *entry += value;
        if entry.is_zero() {
            self.corrections.remove(&n);
        }
    }

    /// Base/polynomial pairs in descending base order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Poly)> {
        self.terms.iter().rev()
    }

    pub fn corrections(&self) -> &BTreeMap<u64, Rational> {
        &self.corrections
    }

    pub fn last_correction(&self) -> Option<u64> {
        self.corrections.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.corrections.is_empty()
    }

    pub fn eval(&self, n: u64) -> Rational {
        let mut total = self.corrections.get(&n).cloned().unwrap_or_else(Rational::zero);
        for (base, q) in &self.terms {
            let v = q.eval_int(n);
            if !v.is_zero() {
                total += v * Pow::pow(base, n);
            }
        }
        total
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (b, q) in &self.terms {
            out.add_term(b.clone(), q.scale(c));
        }
        for (n, v) in &self.corrections {
            out.add_correction(*n, v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, q) in &other.terms {
            out.add_term(b.clone(), q.clone());
        }
        for (n, v) in &other.corrections {
            out.add_correction(*n, v.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from_integer((-1).into()))
    }

    /// Same values for every `n ≥ from`.
    pub fn agrees_from(&self, other: &Self, from: u64) -> bool {
        let strip = |s: &Self| -> Self {
            let mut t = s.clone();
            t.corrections.retain(|n, _| *n >= from);
            t
        };
        strip(self) == strip(other)
    }
}

/// `f_n(y) = Σ_{(β, l)} s_{β,l}(n)·y^l·e^{βy}`: the whole family of
/// `x`-Taylor coefficients as sequences in `n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoefficientFamily {
    entries: BTreeMap<(Rational, usize), ExpPolySequence>,
}

impl CoefficientFamily {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add(&mut self, exponent: Rational, power: usize, s: ExpPolySequence) {
        let key = (exponent, power);
        let entry = self.entries.entry(key.clone()).or_default();
        *entry = entry.add(&s);
        if entry.is_zero() {
            self.entries.remove(&key);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Rational, usize), &ExpPolySequence)> {
        self.entries.iter()
    }

    pub fn get(&self, exponent: &Rational, power: usize) -> Option<&ExpPolySequence> {
        self.entries.get(&(exponent.clone(), power))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for ((e, l), s) in &self.entries {
            out.add(e.clone(), *l, s.scale(c));
        }
        out
    }

    /// `f_n` as an exp-polynomial in `y`.
    pub fn at(&self, n: u64) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for ((e, l), s) in &self.entries {
            out.add_term(e.clone(), Poly::monomial(s.eval(n), *l));
        }
        out
    }

    /// Every coefficient sequence agrees for `n ≥ from`.
    pub fn agrees_from(&self, other: &Self, from: u64) -> bool {
        let keys: std::collections::BTreeSet<_> =
            self.entries.keys().chain(other.entries.keys()).collect();
        let zero = ExpPolySequence::zero();
        keys.into_iter().all(|k| {
            let a = self.entries.get(k).unwrap_or(&zero);
            let b = other.entries.get(k).unwrap_or(&zero);
            a.agrees_from(b, from)
        })
    }
}
