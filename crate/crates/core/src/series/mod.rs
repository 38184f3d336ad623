//! Exact rational certification of the polynomial–exponential families.
//!
//! Everything here works over [`Rational`] (arbitrary-precision fractions);
//! no step rounds.

pub mod bivariate;
pub mod certify;
pub mod exp_poly;
pub mod families;
pub mod poly;
pub mod sequence;

use thiserror::Error;

pub use bivariate::BivariateExpPoly;
pub use certify::{
    certify_exp_poly_nonneg, certify_sequence_positive, Certificate, CertificateStatus, Witness,
};
pub use exp_poly::{coeff_sequence, crude_minorant, to_nonneg_axis, ExpPoly};
pub use families::{
    certify_all, certify_family, closed_form_coefficients, Family, FamilyCertificate,
};
pub use poly::Poly;
pub use sequence::{CoefficientFamily, ExpPolySequence};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("shift {given} is below the largest exponent {required}")]
    ShiftTooSmall { required: String, given: String },
    #[error("negative exponent {0} in a Taylor-coefficient sequence")]
    NegativeExponent(String),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("closed-form coefficients start at n = 5, got {0}")]
    ClosedFormRange(u64),
    #[error("unknown family '{0}' (expected P0..P4)")]
    UnknownFamily(String),
}
