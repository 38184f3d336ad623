//! Exact certificates that an exponential-polynomial sequence is
//! non-negative, and through Taylor coefficients that an exponential
//! polynomial is non-negative on `y ≤ 0`.

use num_traits::{One, Pow, Signed, Zero};
use serde::{Serialize, Serializer};

use super::exp_poly::{coeff_sequence, to_nonneg_axis, ExpPoly};
use super::poly::Poly;
use super::sequence::ExpPolySequence;
use super::Rational;

/// Largest tail threshold tried before giving up.
const THRESHOLD_CAP: u64 = 4096;

/// How far to scan for a negative value when no tail bound is available.
const REFUTATION_SCAN: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Proven,
    Refuted,
    Inconclusive,
}

pub(crate) fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Location and exact value of the smallest checked term, or of the first
/// negative one for a refutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub value: Rational,
}

/// Outcome of [`certify_sequence_positive`]: `s(n) ≥ 0` for all `n ≥ n_min`.
///
/// `Proven` means every `n` in `exact_range` was evaluated exactly and the
/// tail bound holds from `threshold` on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub status: CertificateStatus,
    pub n_min: u64,
    pub exact_range: Option<(u64, u64)>,
    pub threshold: Option<u64>,
    pub witness: Option<Witness>,
    pub note: String,
}

impl Certificate {
    pub fn is_proven(&self) -> bool {
        self.status == CertificateStatus::Proven
    }
}

/// First `N ≥ start` from which `s(n) > 0` follows by dominance.
///
/// With `β_1 > 0` the strictly largest `|base|`, write
/// `s(n)/β_1^n = q_1(n) + Σ_j q_j(n) r_j^n` with `r_j = |β_j|/β_1 < 1`, and let
/// `Q_j` be `q_j` with absolute coefficients. At `N` we require
///
/// 1. `q_1(N + t)` has non-negative coefficients and `q_1(N) > 0`, so `q_1`
///    is positive and non-decreasing on `[N, ∞)`;
/// 2. `Q_j(N + t) - r_j Q_j(N + 1 + t)` has non-negative coefficients, so
///    `Q_j(n) r_j^n` is non-increasing on `[N, ∞)`;
/// 3. `Σ_j Q_j(N) r_j^N < q_1(N)`;
///
/// and `N` beyond the last point correction.
pub fn tail_threshold(s: &ExpPolySequence, start: u64) -> Option<u64> {
    let mut terms = s.terms();
    let (lead_base, lead) = terms.next()?;
    if !lead_base.is_positive() || !lead.leading()?.is_positive() {
        return None;
    }
    let rest: Vec<(Rational, Poly)> = terms
        .map(|(b, q)| (b.abs() / lead_base, q.abs_coeffs()))
        .collect();
    if rest.iter().any(|(r, _)| r >= &Rational::one()) {
        return None;
    }
    let start = start.max(s.last_correction().map_or(0, |c| c + 1));
    let one = Rational::one();
    let mut powers: Vec<Rational> = rest
        .iter()
        .map(|(r, _)| Pow::pow(r, start))
        .collect();
    for n in start..start + THRESHOLD_CAP {
        let at = Rational::from_integer(n.into());
        let shifted = lead.taylor_shift(&at);
        let lead_value = shifted.coeff(0);
        let ok = lead_value.is_positive()
            && shifted.all_nonneg()
            && rest.iter().all(|(r, q)| {
                let here = q.taylor_shift(&at);
                let next = q.taylor_shift(&(&at + &one)).scale(r);
                (&here - &next).all_nonneg()
            })
            && {
                let tail: Rational = rest
                    .iter()
                    .zip(&powers)
                    .map(|((_, q), p)| q.eval(&at) * p)
                    .fold(Rational::zero(), |a, b| a + b);
                tail < lead_value
            };
        if ok {
            return Some(n);
        }
        for ((r, _), p) in rest.iter().zip(powers.iter_mut()) {
            *p *= r;
        }
    }
    None
}

fn first_negative(s: &ExpPolySequence, from: u64, to: u64) -> Option<Witness> {
    (from..=to).find_map(|n| {
        let value = s.eval(n);
        value.is_negative().then_some(Witness { n, value })
    })
}

/// Certifies `s(n) ≥ 0` for every `n ≥ n_min`.
pub fn certify_sequence_positive(s: &ExpPolySequence, n_min: u64) -> Certificate {
    let refuted = |w: Witness, note: &str| Certificate {
        status: CertificateStatus::Refuted,
        n_min,
        exact_range: Some((n_min, w.n)),
        threshold: None,
        witness: Some(w),
        note: note.into(),
    };

    let tail_start = n_min.max(s.last_correction().map_or(0, |c| c + 1));
    let threshold = if s.terms().next().is_none() {
        // only finitely many nonzero values
        Some(tail_start)
    } else {
        tail_threshold(s, n_min)
    };

    let Some(threshold) = threshold else {
        // Eventually negative sequences are refuted at the first negative
        // value, which the tail bound of -s locates.
        let scan_to = tail_threshold(&s.neg(), n_min).unwrap_or(n_min + REFUTATION_SCAN);
        if let Some(w) = first_negative(s, n_min, scan_to) {
            return refuted(w, "negative value found");
        }
        return Certificate {
            status: CertificateStatus::Inconclusive,
            n_min,
            exact_range: Some((n_min, scan_to)),
            threshold: None,
            witness: None,
            note: "no strictly dominant positive term".into(),
        };
    };

    let mut witness: Option<Witness> = None;
    for n in n_min..=threshold {
        let value = s.eval(n);
        if value.is_negative() {
            return refuted(Witness { n, value }, "negative value in exact range");
        }
        if witness.as_ref().is_none_or(|w| value < w.value) {
            witness = Some(Witness { n, value });
        }
    }
    Certificate {
        status: CertificateStatus::Proven,
        n_min,
        exact_range: Some((n_min, threshold)),
        threshold: Some(threshold),
        witness,
        note: "exact check plus dominant-term tail bound".into(),
    }
}

/// Certifies `f(y) ≥ 0` for all `y ≤ 0` by showing that every Taylor
/// coefficient of `e^{shift·t} f(-t)` is non-negative. `shift` defaults to
/// the largest exponent of `f` (or zero).
pub fn certify_exp_poly_nonneg(f: &ExpPoly, shift: Option<&Rational>) -> Certificate {
    let default = f.max_exponent().cloned().unwrap_or_else(Rational::zero).max(Rational::zero());
    let shift = shift.cloned().unwrap_or(default);
    let inconclusive = |note: String| Certificate {
        status: CertificateStatus::Inconclusive,
        n_min: 0,
        exact_range: None,
        threshold: None,
        witness: None,
        note,
    };
    let g = match to_nonneg_axis(f, &shift) {
        Ok(g) => g,
        Err(e) => return inconclusive(e.to_string()),
    };
    match coeff_sequence(&g) {
        Ok(s) => certify_sequence_positive(&s, 0),
        Err(e) => inconclusive(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn seq(terms: &[(i64, &[i64])]) -> ExpPolySequence {
        let mut s = ExpPolySequence::zero();
        for (b, q) in terms {
            s.add_term(rat(*b), Poly::from_ints(q));
        }
        s
    }

    #[test]
    fn dominant_base_proves() {
        let c = certify_sequence_positive(&seq(&[(3, &[1]), (2, &[0, -1])]), 0);
        assert_eq!(c.status, CertificateStatus::Proven, "{c:?}");
        assert!(c.threshold.is_some());
    }

    #[test]
    fn planted_sign_changes_are_refuted() {
        let c = certify_sequence_positive(&seq(&[(2, &[1]), (3, &[-1])]), 0);
        assert_eq!(c.status, CertificateStatus::Refuted);
        assert_eq!(c.witness.unwrap().n, 1);

        let c = certify_sequence_positive(&seq(&[(1, &[1, -1])]), 0);
        assert_eq!(c.status, CertificateStatus::Refuted);
        assert_eq!(c.witness.unwrap().n, 2);

        // positive early, negative late
        let c = certify_sequence_positive(&seq(&[(2, &[100]), (3, &[-1])]), 0);
        assert_eq!(c.status, CertificateStatus::Refuted);
        assert_eq!(c.witness.unwrap().n, 12);
    }

    #[test]
    fn oscillating_is_inconclusive_or_refuted() {
        let c = certify_sequence_positive(&seq(&[(-2, &[1]), (2, &[1])]), 0);
        assert_ne!(c.status, CertificateStatus::Proven);
        let c = certify_sequence_positive(&seq(&[(-2, &[1])]), 0);
        assert_eq!(c.status, CertificateStatus::Refuted);
    }

    #[test]
    fn finite_sequences() {
        let mut s = ExpPolySequence::zero();
        s.add_correction(3, rat(2));
        assert!(certify_sequence_positive(&s, 0).is_proven());
        s.add_correction(1, rat(-1));
        assert_eq!(certify_sequence_positive(&s, 0).status, CertificateStatus::Refuted);
        assert!(certify_sequence_positive(&s, 2).is_proven());
    }

    #[test]
    fn exp_poly_certificates() {
        let ey = ExpPoly::term(rat(1), Poly::one());
        assert!(certify_exp_poly_nonneg(&ey, None).is_proven());
        let y = ExpPoly::polynomial(Poly::from_ints(&[0, 1]));
        assert_eq!(certify_exp_poly_nonneg(&y, None).status, CertificateStatus::Refuted);
        // 1 - e^{y} ≥ 0 on y ≤ 0 but e^{t}(1 - e^{-t}) = e^t - 1 has coefficients 0, 1, 1, …
        let mut f = ExpPoly::polynomial(Poly::one());
        f.add_term(rat(1), Poly::from_ints(&[-1]));
        assert!(certify_exp_poly_nonneg(&f, None).is_proven());
    }
}
