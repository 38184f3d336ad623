//! Exponential polynomials `Σ p_k(t)·e^{k t}` with rational exponents.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::Poly;
use super::sequence::ExpPolySequence;
use super::{rat, Rational, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPoly {
    terms: BTreeMap<Rational, Poly>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(exponent: Rational, poly: Poly) -> Self {
        let mut f = Self::zero();
        f.add_term(exponent, poly);
        f
    }

    /// The plain polynomial `p` (exponent zero).
    pub fn polynomial(poly: Poly) -> Self {
        Self::term(Rational::zero(), poly)
    }

    pub fn add_term(&mut self, exponent: Rational, poly: Poly) {
        let entry = self.terms.entry(exponent.clone()).or_default();
        *entry = &*entry + &poly;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    /// Exponent/polynomial pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Poly)> {
        self.terms.iter()
    }

    pub fn poly_at(&self, exponent: &Rational) -> Option<&Poly> {
        self.terms.get(exponent)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<&Rational> {
        self.terms.keys().next()
    }

    pub fn max_exponent(&self) -> Option<&Rational> {
        self.terms.keys().next_back()
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, p)| p.eval_f64(t) * (k.to_f64().unwrap_or(f64::NAN) * t).exp())
            .sum()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (k, p) in &self.terms {
            out.add_term(k.clone(), p.scale(c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.add_term(k.clone(), p.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (k1, p1) in &self.terms {
            for (k2, p2) in &other.terms {
                out.add_term(k1 + k2, p1 * p2);
            }
        }
        out
    }

    /// `f(-t)`.
    pub fn reflect(&self) -> Self {
        let mut out = Self::zero();
        for (k, p) in &self.terms {
            out.add_term(-k, p.reflect());
        }
        out
    }

    /// `e^{shift·t}·f(t)`.
    pub fn shift_exponents(&self, shift: &Rational) -> Self {
        let mut out = Self::zero();
        for (k, p) in &self.terms {
            out.add_term(k + shift, p.clone());
        }
        out
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(k, p)| {
                let body = format!("({})", p.display_in(var));
                if k.is_zero() {
                    body
                } else {
                    format!("e^({k}{var})·{body}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `g(t) = e^{shift·t}·f(-t)`. Non-negativity of every Taylor coefficient of
/// `g` at zero proves `f(y) ≥ 0` for all `y ≤ 0`.
pub fn to_nonneg_axis(f: &ExpPoly, shift: &Rational) -> Result<ExpPoly, SeriesError> {
    if let Some(max) = f.max_exponent() {
        if shift < max {
            return Err(SeriesError::ShiftTooSmall {
                required: max.to_string(),
                given: shift.to_string(),
            });
        }
    }
    Ok(f.reflect().shift_exponents(shift))
}

/// `s(m) = m!·[t^m] g(t)` as an exponential-polynomial sequence in `m`.
///
/// `t^j e^{γt}` contributes `m^{(j)} γ^{m-j}`; for `γ = 0` only `m = j`
/// survives, with value `j!`.
pub fn coeff_sequence(g: &ExpPoly) -> Result<ExpPolySequence, SeriesError> {
    let mut s = ExpPolySequence::zero();
    for (gamma, p) in g.terms() {
        if gamma.is_negative() {
            return Err(SeriesError::NegativeExponent(gamma.to_string()));
        }
        if gamma.is_zero() {
            let mut factorial = Rational::one();
            for (j, r) in p.coeffs().iter().enumerate() {
                if j > 0 {
                    factorial *= rat(j as i64);
                }
                s.add_correction(j as u64, r * &factorial);
            }
            continue;
        }
        let inv = gamma.recip();
        let mut q = Poly::zero();
        let mut inv_power = Rational::one();
        for (j, r) in p.coeffs().iter().enumerate() {
            q = &q + &Poly::falling_factorial(j).scale(&(r * &inv_power));
            inv_power *= &inv;
        }
        s.add_term(gamma.clone(), q);
    }
    Ok(s)
}

/// `m!·[t^m] g` for `m < count` by multiplying truncated series. Used as an
/// independent check of [`coeff_sequence`].
pub fn taylor_coefficients(g: &ExpPoly, count: usize) -> Vec<Rational> {
    let mut total = vec![Rational::zero(); count];
    for (gamma, p) in g.terms() {
        // e^{γt} = Σ γ^i t^i / i!
        let mut exp_series = Vec::with_capacity(count);
        let mut c = Rational::one();
        for i in 0..count {
            exp_series.push(c.clone());
            c = c * gamma / rat(i as i64 + 1);
        }
        for (j, r) in p.coeffs().iter().enumerate() {
            for i in 0..count.saturating_sub(j) {
                total[i + j] += r * &exp_series[i];
            }
        }
    }
    let mut factorial = Rational::one();
    for (m, v) in total.iter_mut().enumerate() {
        if m > 0 {
            factorial *= rat(m as i64);
        }
        *v *= &factorial;
    }
    total
}

/// Lower bound for `inf_{y ≤ 0} f(y)`.
///
/// Each term `c·y^l·e^{βy}` equals `c(-1)^l |y|^l e^{βy}` on `y ≤ 0`. Terms
/// with `c(-1)^l ≥ 0` are dropped; the rest are bounded by
/// `sup |y|^l e^{βy} = (l/(eβ))^l ≤ (l/(2.718β))^l`. The constant is kept.
/// Returns `None` when a negative term cannot be bounded (`β ≤ 0`, `l > 0`).
pub fn crude_minorant(f: &ExpPoly) -> Option<Rational> {
    let mut total = Rational::zero();
    for (beta, p) in f.terms() {
        for (l, c) in p.coeffs().iter().enumerate() {
            if beta.is_zero() && l == 0 {
                total += c;
                continue;
            }
            let signed = if l % 2 == 1 { -c } else { c.clone() };
            if !signed.is_negative() {
                continue;
            }
            total += signed * level_bound(beta, l)?;
        }
    }
    Some(total)
}

/// Rational upper bound for `sup_{y ≤ 0} |y|^l e^{βy}`.
pub fn level_bound(beta: &Rational, l: usize) -> Option<Rational> {
    if l == 0 {
        return if beta.is_negative() { None } else { Some(Rational::one()) };
    }
    if !beta.is_positive() {
        return None;
    }
    let e_below = Rational::new(1359.into(), 500.into());
    let base = rat(l as i64) / (e_below * beta);
    Some(num_traits::Pow::pow(&base, l as u64))
}
