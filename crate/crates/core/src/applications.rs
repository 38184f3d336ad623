//! Consequences of the entropy–variance bound: Rényi corollary constants,
//! distance from Gaussianity, capacity bounds for additive noise, entropy
//! power constants, and the reverse entropy power inequality.

use std::f64::consts::{E, PI};

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::beta::ln_beta;
use thiserror::Error;

use crate::density::{
    unit_exp_moment, Density, DensityError, DensityStats, GridDensity, LogConcavity,
};

/// Default number of output nodes for [`convolve`].
pub const DEFAULT_RESOLUTION: usize = 4096;

/// Largest accepted mass defect of a convolution before normalization.
pub const CONVOLUTION_MASS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApplicationError {
    #[error("invalid order {0}: expected a finite value > 1")]
    InvalidAlpha(f64),
    #[error("invalid orders p={p}, q={q}: expected p >= q > 0")]
    InvalidOrders { p: f64, q: f64 },
    #[error("power must be positive and finite, got {0}")]
    InvalidPower(f64),
    #[error("density is not log-concave")]
    NotLogConcave,
    #[error("resolution too coarse: convolution mass error {error:e} exceeds 1e-6")]
    ResolutionTooCoarse { error: f64 },
    #[error("invalid resolution {0}: need at least 3 nodes")]
    InvalidResolution(usize),
    #[error("grid inputs must share the same step ({0} vs {1})")]
    GridStepMismatch(f64, f64),
    #[error(transparent)]
    Density(#[from] DensityError),
}

pub type Result<T> = std::result::Result<T, ApplicationError>;

/// `½ ln(2π/e)`, the largest possible distance of a log-concave law from
/// the Gaussian with the same variance.
pub fn max_gaussian_distance() -> f64 {
    0.5 * (2.0 * PI / E).ln()
}

/// `ln t / (t - 1)`, continuous at `t = 1` (value 1) and zero at `t = ∞`.
pub fn log_ratio(t: f64) -> f64 {
    if t.is_infinite() {
        0.0
    } else if t == 1.0 {
        1.0
    } else {
        (t - 1.0).ln_1p() / (t - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryConstants {
    /// `ln α / (α - 1)`: `h_α ≥ ½ ln Var + ln α/(α - 1)`.
    pub renyi_floor_shift: f64,
    /// `ln q/(q - 1) - ln p/(p - 1)`: upper bound on `h_q - h_p` for
    /// log-concave densities, `p ≥ q`.
    pub fmw_gap: f64,
}

pub fn corollary_constants(alpha: f64, p: f64, q: f64) -> Result<CorollaryConstants> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(ApplicationError::InvalidAlpha(alpha));
    }
    if !(q > 0.0 && p >= q) || q.is_infinite() {
        return Err(ApplicationError::InvalidOrders { p, q });
    }
    Ok(CorollaryConstants {
        renyi_floor_shift: log_ratio(alpha),
        fmw_gap: log_ratio(q) - log_ratio(p),
    })
}

/// `D(X) = ½ ln(2πe·Var X) - h(X)`: relative entropy from the Gaussian with
/// the same variance.
pub fn relative_entropy_to_gaussian(d: &impl DensityStats) -> Result<f64> {
    let variance = d.variance()?;
    if !(variance > 0.0) {
        return Err(DensityError::NonPositiveVariance { variance }.into());
    }
    Ok(0.5 * (2.0 * PI * E * variance).ln() - d.shannon_entropy()?)
}

/// Bounds on the capacity of the additive-noise channel `Y = X + N` with
/// input power `P`: `C_P(Z) ≤ C_P(N) ≤ C_P(Z) + D(N)`, where `Z` is Gaussian
/// with the variance of `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityBounds {
    pub power: f64,
    /// `½ ln(1 + P/Var N)`.
    pub gaussian_capacity: f64,
    pub upper: f64,
    pub relative_entropy: f64,
    pub log_concave: bool,
    /// `D(N) ≤ ½ ln(2π/e)`, required for log-concave noise.
    pub within_log_concave_bound: bool,
}

pub fn capacity_bounds(noise: &Density, power: f64) -> Result<CapacityBounds> {
    if !(power.is_finite() && power > 0.0) {
        return Err(ApplicationError::InvalidPower(power));
    }
    let variance = noise.variance()?;
    if !(variance > 0.0) {
        return Err(DensityError::NonPositiveVariance { variance }.into());
    }
    let gaussian_capacity = 0.5 * (power / variance).ln_1p();
    let relative_entropy = relative_entropy_to_gaussian(noise)?;
    Ok(CapacityBounds {
        power,
        gaussian_capacity,
        upper: gaussian_capacity + relative_entropy,
        relative_entropy,
        log_concave: noise.log_concavity() == LogConcavity::LogConcave,
        within_log_concave_bound: relative_entropy <= max_gaussian_distance() + 1e-9,
    })
}

/// `C_-(α) Var X ≤ N_α(X) ≤ C_+(α) Var X` for log-concave `X`, `α > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpiConstants {
    pub alpha: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    pub ratio: f64,
}

/// `C_-(α) = α^{2/(α-1)}` and
/// `C_+(α) = (3α-1)/(α-1) · (2α/(3α-1))^{2/(1-α)} · B(½, α/(α-1))²`.
pub fn epi_constants(alpha: f64) -> Result<EpiConstants> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(ApplicationError::InvalidAlpha(alpha));
    }
    let c_minus = alpha.powf(2.0 / (alpha - 1.0));
    let ln_c_plus = ((3.0 * alpha - 1.0) / (alpha - 1.0)).ln()
        + 2.0 / (1.0 - alpha) * (2.0 * alpha / (3.0 * alpha - 1.0)).ln()
        + 2.0 * ln_beta(0.5, alpha / (alpha - 1.0));
    let c_plus = ln_c_plus.exp();
    Ok(EpiConstants { alpha, c_minus, c_plus, ratio: c_plus / c_minus })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenyiSandwich {
    pub alpha: f64,
    /// `N_α = e^{2h_α}`.
    pub renyi_power: f64,
    /// `C_-(α) Var`.
    pub lower: f64,
    /// `C_+(α) Var`.
    pub upper: f64,
    pub holds: bool,
}

pub fn renyi_power_sandwich_check(d: &Density, alpha: f64) -> Result<RenyiSandwich> {
    if d.log_concavity() != LogConcavity::LogConcave {
        return Err(ApplicationError::NotLogConcave);
    }
    let c = epi_constants(alpha)?;
    let variance = d.variance()?;
    let renyi_power = d.renyi_entropy_power(alpha)?;
    let (lower, upper) = (c.c_minus * variance, c.c_plus * variance);
    let slack = 1e-9 * renyi_power.abs().max(1.0);
    Ok(RenyiSandwich {
        alpha,
        renyi_power,
        lower,
        upper,
        holds: lower <= renyi_power + slack && renyi_power <= upper + slack,
    })
}

/// Root of `ln α/(α - 1) = ½ ln 6` on `(1, 2]`.
pub fn alpha_star() -> f64 {
    let target = 0.5 * 6f64.ln();
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if log_ratio(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `e^{-(slope·t + offset)}` on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    slope: f64,
    offset: f64,
}

fn pieces(d: &Density) -> Option<Vec<Piece>> {
    match d {
        Density::ExpAffine(e) => Some(
            e.segments()
                .iter()
                .map(|s| Piece {
                    lo: s.interval().lo(),
                    hi: s.interval().hi(),
                    slope: s.slope(),
                    offset: s.offset(),
                })
                .collect(),
        ),
        Density::Step(s) => Some(
            s.levels()
                .into_iter()
                .filter(|(_, v)| *v > 0.0)
                .map(|(cell, v)| Piece { lo: cell.lo(), hi: cell.hi(), slope: 0.0, offset: -v.ln() })
                .collect(),
        ),
        Density::Grid(_) => None,
    }
}

/// `∫_a^b e^{-(c t + d)} dt`.
fn exp_affine_integral(a: f64, b: f64, c: f64, d: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let w = b - a;
    let v_min = (c * a + d).min(c * b + d);
    (-v_min).exp() * w * unit_exp_moment(0, c.abs() * w)
}

/// `(f * g)(s) = Σ_{i,j} ∫ f_i(t) g_j(s - t) dt`, each term in closed form.
fn exact_convolution_at(p1: &[Piece], p2: &[Piece], s: f64) -> f64 {
    let mut total = 0.0;
    for a in p1 {
        for b in p2 {
            let lo = a.lo.max(s - b.hi);
            let hi = a.hi.min(s - b.lo);
            total += exp_affine_integral(
                lo,
                hi,
                a.slope - b.slope,
                b.slope * s + a.offset + b.offset,
            );
        }
    }
    total
}

/// Composite Simpson rule, closing with the 3/8 rule for an even node count.
fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let simple = |v: &[f64]| -> f64 {
        let m = v.len();
        let inner: f64 = v[1..m - 1]
            .iter()
            .enumerate()
            .map(|(i, x)| if i % 2 == 0 { 4.0 * x } else { 2.0 * x })
            .sum();
        h / 3.0 * (v[0] + inner + v[m - 1])
    };
    if n % 2 == 1 {
        simple(values)
    } else {
        let split = n - 3;
        let t = &values[split - 1..];
        simple(&values[..split]) + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
    }
}

/// Density of `X + Y` for independent `X ~ d1`, `Y ~ d2`, on `resolution`
/// nodes spanning the sum of the supports, normalized by its trapezoidal
/// mass.
///
/// Exp-affine and step inputs are convolved exactly at every node. Grid
/// inputs are convolved by direct summation on the grid step, so two grids
/// must share a step and `resolution` is then ignored. Fails when the
/// Simpson mass of the raw result differs from the product of input masses
/// by more than 1e-6.
pub fn convolve(d1: &Density, d2: &Density, resolution: usize) -> Result<GridDensity> {
    if resolution < 3 {
        return Err(ApplicationError::InvalidResolution(resolution));
    }
    let expected_mass = d1.mass() * d2.mass();
    let (origin, step, values) = match (pieces(d1), pieces(d2)) {
        (Some(p1), Some(p2)) => {
            let lo = p1[0].lo + p2[0].lo;
            let hi = p1[p1.len() - 1].hi + p2[p2.len() - 1].hi;
            let step = (hi - lo) / (resolution - 1) as f64;
            let values: Vec<f64> = (0..resolution)
                .into_par_iter()
                .map(|i| exact_convolution_at(&p1, &p2, lo + i as f64 * step))
                .collect();
            (lo, step, values)
        }
        _ => grid_convolution(d1, d2)?,
    };
    let error = (simpson(&values, step) - expected_mass).abs();
    if !(error <= CONVOLUTION_MASS_TOLERANCE) {
        return Err(ApplicationError::ResolutionTooCoarse { error });
    }
    Ok(GridDensity::new(origin, step, values)?.normalize()?)
}

fn as_grid(d: &Density, step: f64) -> Result<GridDensity> {
    match d {
        Density::Grid(g) => Ok(g.clone()),
        other => {
            let (lo, hi) = match other {
                Density::ExpAffine(e) => (e.support().lo(), e.support().hi()),
                Density::Step(s) => (s.support().lo(), s.support().hi()),
                Density::Grid(_) => unreachable!(),
            };
            let points = ((hi - lo) / step).ceil() as usize + 1;
            let value = |t: f64| match other {
                Density::ExpAffine(e) => e.value(t),
                Density::Step(s) => s.value(t),
                Density::Grid(_) => unreachable!(),
            };
            Ok(GridDensity::new(lo, step, (0..points).map(|i| value(lo + i as f64 * step)).collect())?)
        }
    }
}

fn grid_convolution(d1: &Density, d2: &Density) -> Result<(f64, f64, Vec<f64>)> {
    let step = match (d1, d2) {
        (Density::Grid(a), Density::Grid(b)) => {
            if (a.step() - b.step()).abs() > 1e-12 * a.step() {
                return Err(ApplicationError::GridStepMismatch(a.step(), b.step()));
            }
            a.step()
        }
        (Density::Grid(g), _) | (_, Density::Grid(g)) => g.step(),
        _ => unreachable!("exact path handles non-grid pairs"),
    };
    let (a, b) = (as_grid(d1, step)?, as_grid(d2, step)?);
    let (va, vb) = (a.values(), b.values());
    let n = va.len() + vb.len() - 1;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let lo = k.saturating_sub(vb.len() - 1);
            let hi = k.min(va.len() - 1);
            (lo..=hi).map(|i| va[i] * vb[k - i]).sum::<f64>() * step
        })
        .collect();
    Ok((a.origin() + b.origin(), step, values))
}

/// Both sides of `N(X) + N(Y) ≤ N(X + Y) ≤ (2π/e)(N(X) + N(Y))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpiCheck {
    pub n_x: f64,
    pub n_y: f64,
    pub n_sum: f64,
    /// `(2π/e)(N(X) + N(Y))`.
    pub reverse_upper: f64,
    pub shannon_stam_holds: bool,
    pub reverse_holds: bool,
    pub log_concave_inputs: bool,
}

pub fn reverse_epi_check(d1: &Density, d2: &Density, resolution: usize) -> Result<EpiCheck> {
    let sum = convolve(d1, d2, resolution)?;
    let (n_x, n_y) = (d1.entropy_power()?, d2.entropy_power()?);
    let n_sum = sum.entropy_power()?;
    let lower = n_x + n_y;
    let reverse_upper = 2.0 * PI / E * lower;
    Ok(EpiCheck {
        n_x,
        n_y,
        n_sum,
        reverse_upper,
        shannon_stam_holds: lower <= n_sum * (1.0 + 1e-9),
        reverse_holds: n_sum <= reverse_upper * (1.0 + 1e-9),
        log_concave_inputs: d1.log_concavity() == LogConcavity::LogConcave
            && d2.log_concavity() == LogConcavity::LogConcave,
    })
}
