//! Entropy and variance of log-concave densities on the line.
//!
//! The crate checks and certifies the lower bound
//! `h(X) ≥ ½ ln Var(X) + 1` for log-concave `X`, which is tight for the
//! exponential law:
//!
//! - [`density`]: exact functionals of piecewise exp-affine, step and grid densities.
//! - [`rearrangement`]: the monotone rearrangement onto `[0, ∞)`.
//! - [`two_piece`]: the extremal two-piece family and its closed-form gap.
//! - [`series`]: exact rational certification that the polynomial–exponential
//!   coefficients of the reduced inequality are non-negative.
//! - [`applications`]: corollaries (divergence from Gaussian, capacity, EPI constants).
//! - [`io`]: JSON density descriptions.

pub mod applications;
pub mod density;
pub mod io;
pub mod rearrangement;
pub mod series;
pub mod two_piece;

pub use density::{
    ball_bound_check, mixture_variance, Density, DensityError, DensityStats, ExpAffineSegment,
    GridDensity, Interval, LogConcavity, MixtureComponent, PiecewiseExpAffineDensity,
    ScalarStats, StepDensity, StepPiece,
};
