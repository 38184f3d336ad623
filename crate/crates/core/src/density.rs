//! Mass, moments, Shannon/Rényi entropies and the entropy–variance gap for
//! one-dimensional densities.
//!
//! Three carriers are supported:
//!
//! - [`PiecewiseExpAffineDensity`]: `f = e^{-V}` with `V` affine on each of a
//!   run of contiguous segments. Every functional used here has a closed form
//!   on such a segment.
//! - [`StepDensity`]: a unimodal step function `Σ λ_k 1_{I_k}/|I_k|` over
//!   strictly nested intervals.
//! - [`GridDensity`]: samples on a uniform grid, integrated with the
//!   trapezoidal rule. Used for convolution output and for test densities that
//!   have no closed form.
//!
//! All entropies are in nats.

use serde::Serialize;
use thiserror::Error;

/// Accepted deviation of the total mass from one.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Relative tolerance when matching segment endpoints and knot values.
const KNOT_TOLERANCE: f64 = 1e-9;

/// Below this value of `rate * width` the segment integrals switch to a power
/// series in `rate * width`.
const SERIES_THRESHOLD: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("malformed segment on [{lo}, {hi}]: {reason}")]
    MalformedSegment { lo: f64, hi: f64, reason: &'static str },

    #[error("segments are not contiguous at index {index}: {hi} vs {next_lo}")]
    Discontiguous { index: usize, hi: f64, next_lo: f64 },

    #[error("density has no segments or pieces")]
    Empty,

    #[error("not normalized (expected mass≈1): mass={mass}")]
    NotNormalized { mass: f64 },

    #[error("density has zero mass")]
    ZeroMass,

    #[error("non-positive variance: {variance}")]
    NonPositiveVariance { variance: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("intervals not nested: {0}")]
    NotNested(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid moment order {0} (expected 0, 1 or 2)")]
    InvalidOrder(u32),

    #[error("invalid Rényi order {0}")]
    InvalidRenyiOrder(f64),

    #[error("density is not non-increasing")]
    NotNonIncreasing,

    #[error("non-finite result: {0}")]
    NonFinite(&'static str),

    #[error("invalid affine map t -> {scale}·t + {shift}")]
    InvalidAffineMap { scale: f64, shift: f64 },

    #[error("mixture weights must be positive and sum to 1 (sum={sum})")]
    MixtureWeights { sum: f64 },
}

pub type Result<T> = std::result::Result<T, DensityError>;

/// A compact interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(DensityError::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// `self ⊆ other`.
    pub fn is_within(&self, other: &Interval) -> bool {
        self.lo >= other.lo && self.hi <= other.hi
    }
}

/// `∫_0^1 u^k e^{-z u} du` for `k ∈ {0, 1, 2}` and `z ≥ 0`.
///
/// The closed forms subtract nearly equal quantities as `z → 0`, so small
/// arguments use the power series `Σ_j (-z)^j / (j! (k + j + 1))`.
pub(crate) fn unit_exp_moment(k: u32, z: f64) -> f64 {
    if z.abs() < SERIES_THRESHOLD {
        let mut sum = 0.0;
        let mut power = 1.0; // (-z)^j / j!
        for j in 0..40u32 {
            let term = power / f64::from(k + j + 1);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            power *= -z / f64::from(j + 1);
        }
        return sum;
    }
    let e = (-z).exp();
    match k {
        0 => -(-z).exp_m1() / z,
        1 => (1.0 - e * (1.0 + z)) / (z * z),
        2 => (2.0 - e * (z * z + 2.0 * z + 2.0)) / (z * z * z),
        _ => unreachable!("only moments up to order 2 are needed"),
    }
}

/// One affine piece of the potential: density `exp(-(slope·t + offset))` on
/// `interval`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpAffineSegment {
    interval: Interval,
    slope: f64,
    offset: f64,
}

/// The segment seen from its maximum: `t = anchor + dir·s`, `s ∈ [0, width]`,
/// `V(t) = potential + rate·s` with `rate ≥ 0`.
#[derive(Debug, Clone, Copy)]
struct Profile {
    anchor: f64,
    dir: f64,
    potential: f64,
    rate: f64,
    width: f64,
}

impl ExpAffineSegment {
    pub fn new(lo: f64, hi: f64, slope: f64, offset: f64) -> Result<Self> {
        let interval = Interval::new(lo, hi)?;
        if !(slope.is_finite() && offset.is_finite()) {
            return Err(DensityError::MalformedSegment {
                lo,
                hi,
                reason: "non-finite slope or offset",
            });
        }
        let seg = Self { interval, slope, offset };
        for t in [lo, hi] {
            let v = seg.value(t);
            if !(v.is_finite() && v > 0.0) {
                return Err(DensityError::MalformedSegment {
                    lo,
                    hi,
                    reason: "density value must be finite and positive",
                });
            }
        }
        Ok(seg)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `V(t) = slope·t + offset`.
    pub fn potential(&self, t: f64) -> f64 {
        self.slope * t + self.offset
    }

    pub fn value(&self, t: f64) -> f64 {
        (-self.potential(t)).exp()
    }

    pub fn value_lo(&self) -> f64 {
        self.value(self.interval.lo)
    }

    pub fn value_hi(&self) -> f64 {
        self.value(self.interval.hi)
    }

    pub fn max_value(&self) -> f64 {
        self.value_lo().max(self.value_hi())
    }

    pub fn min_value(&self) -> f64 {
        self.value_lo().min(self.value_hi())
    }

    fn profile(&self) -> Profile {
        let (anchor, dir) = if self.slope >= 0.0 {
            (self.interval.lo, 1.0)
        } else {
            (self.interval.hi, -1.0)
        };
        Profile {
            anchor,
            dir,
            potential: self.potential(anchor),
            rate: self.slope.abs(),
            width: self.interval.len(),
        }
    }

    pub fn mass(&self) -> f64 {
        let p = self.profile();
        (-p.potential).exp() * p.width * unit_exp_moment(0, p.rate * p.width)
    }

    /// `∫ (t - center)^order f(t) dt` over the segment.
    pub fn centered_moment(&self, order: u32, center: f64) -> Result<f64> {
        let p = self.profile();
        let z = p.rate * p.width;
        let w = p.width;
        let d = p.anchor - center;
        let scale = (-p.potential).exp();
        let value = match order {
            0 => scale * w * unit_exp_moment(0, z),
            1 => scale * (d * w * unit_exp_moment(0, z) + p.dir * w * w * unit_exp_moment(1, z)),
            2 => {
                scale
                    * (d * d * w * unit_exp_moment(0, z)
                        + 2.0 * p.dir * d * w * w * unit_exp_moment(1, z)
                        + w * w * w * unit_exp_moment(2, z))
            }
            _ => return Err(DensityError::InvalidOrder(order)),
        };
        if !value.is_finite() {
            return Err(DensityError::MalformedSegment {
                lo: self.interval.lo,
                hi: self.interval.hi,
                reason: "non-finite moment",
            });
        }
        Ok(value)
    }

    /// `∫ f V = -∫ f ln f` over the segment.
    pub fn potential_integral(&self) -> f64 {
        let p = self.profile();
        let z = p.rate * p.width;
        (-p.potential).exp()
            * (p.potential * p.width * unit_exp_moment(0, z)
                + p.rate * p.width * p.width * unit_exp_moment(1, z))
    }

    /// `∫ f^alpha` over the segment, for finite `alpha > 0`.
    pub fn power_integral(&self, alpha: f64) -> f64 {
        let p = self.profile();
        (-alpha * p.potential).exp() * p.width * unit_exp_moment(0, alpha * p.rate * p.width)
    }

    /// Image of the segment under `t ↦ scale·t + shift` (density pushed forward).
    pub fn affine_image(&self, scale: f64, shift: f64) -> Result<Self> {
        let slope = self.slope / scale;
        let offset = self.offset - self.slope * shift / scale + scale.abs().ln();
        let (a, b) = (scale * self.interval.lo + shift, scale * self.interval.hi + shift);
        Self::new(a.min(b), a.max(b), slope, offset)
    }

    pub(crate) fn with_offset(&self, offset: f64) -> Result<Self> {
        Self::new(self.interval.lo, self.interval.hi, self.slope, offset)
    }
}

/// Outcome of a log-concavity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogConcavity {
    LogConcave,
    /// Unimodal step densities: not log-concave themselves, but limits of
    /// log-concave densities for the rearrangement and variance statements.
    LimitOfLogConcave,
    NotLogConcave,
}

impl LogConcavity {
    pub fn holds(self) -> bool {
        !matches!(self, LogConcavity::NotLogConcave)
    }
}

/// `f = e^{-V}` with `V` piecewise affine on contiguous segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseExpAffineDensity {
    segments: Vec<ExpAffineSegment>,
}

impl PiecewiseExpAffineDensity {
    pub fn new(segments: Vec<ExpAffineSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(DensityError::Empty);
        }
        for (index, pair) in segments.windows(2).enumerate() {
            let hi = pair[0].interval.hi;
            let next_lo = pair[1].interval.lo;
            if (hi - next_lo).abs() > KNOT_TOLERANCE * hi.abs().max(1.0) {
                return Err(DensityError::Discontiguous { index, hi, next_lo });
            }
        }
        Ok(Self { segments })
    }

    /// `rate·e^{-rate·t}` on `[0, length]`, renormalized to mass one.
    pub fn truncated_exponential(rate: f64, length: f64) -> Result<Self> {
        let seg = ExpAffineSegment::new(0.0, length, rate, -rate.ln())?;
        Self::new(vec![seg])?.normalize()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let width = Interval::new(lo, hi)?.len();
        Self::new(vec![ExpAffineSegment::new(lo, hi, 0.0, width.ln())?])
    }

    pub fn segments(&self) -> &[ExpAffineSegment] {
        &self.segments
    }

    pub fn support(&self) -> Interval {
        Interval {
            lo: self.segments[0].interval.lo,
            hi: self.segments[self.segments.len() - 1].interval.hi,
        }
    }

    /// Density value at `t`; at a knot the right-hand segment wins.
    pub fn value(&self, t: f64) -> f64 {
        let support = self.support();
        if t < support.lo || t > support.hi {
            return 0.0;
        }
        self.segments
            .iter()
            .rev()
            .find(|s| t >= s.interval.lo)
            .map_or(0.0, |s| s.value(t))
    }

    /// Rescales to mass one by shifting every offset by `ln(mass)`.
    pub fn normalize(&self) -> Result<Self> {
        let mass = self.mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(DensityError::ZeroMass);
        }
        let shift = mass.ln();
        let segments = self
            .segments
            .iter()
            .map(|s| s.with_offset(s.offset + shift))
            .collect::<Result<Vec<_>>>()?;
        Self::new(segments)
    }

    /// Law of `scale·X + shift`, `scale ≠ 0`.
    pub fn affine_transform(&self, scale: f64, shift: f64) -> Result<Self> {
        check_affine_map(scale, shift)?;
        let mut segments = self
            .segments
            .iter()
            .map(|s| s.affine_image(scale, shift))
            .collect::<Result<Vec<_>>>()?;
        if scale < 0.0 {
            segments.reverse();
        }
        Self::new(segments)
    }

    /// Values along the support: `(lo_0, hi_0, lo_1, hi_1, …)`.
    pub(crate) fn knot_values(&self) -> Vec<f64> {
        self.segments
            .iter()
            .flat_map(|s| [s.value_lo(), s.value_hi()])
            .collect()
    }

    /// Log-concave iff `V` is continuous at every knot and the slopes are
    /// non-decreasing.
    pub fn log_concavity(&self) -> LogConcavity {
        for pair in self.segments.windows(2) {
            let knot = pair[0].interval.hi;
            let left = pair[0].potential(knot);
            let right = pair[1].potential(knot);
            if (left - right).abs() > KNOT_TOLERANCE * left.abs().max(1.0) {
                return LogConcavity::NotLogConcave;
            }
            if pair[1].slope < pair[0].slope - KNOT_TOLERANCE * pair[0].slope.abs().max(1.0) {
                return LogConcavity::NotLogConcave;
            }
        }
        LogConcavity::LogConcave
    }

    /// Non-decreasing then non-increasing along the support, jumps included.
    pub fn is_unimodal(&self) -> bool {
        is_unimodal_sequence(&self.knot_values())
    }

    fn is_non_increasing(&self) -> bool {
        self.knot_values()
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + KNOT_TOLERANCE))
    }
}

pub(crate) fn is_unimodal_sequence(values: &[f64]) -> bool {
    let tol = |v: f64| KNOT_TOLERANCE * v.abs();
    let mut falling = false;
    for w in values.windows(2) {
        if w[1] > w[0] + tol(w[0]) {
            if falling {
                return false;
            }
        } else if w[1] < w[0] - tol(w[0]) {
            falling = true;
        }
    }
    true
}

/// One component of a unimodal step density: weight `λ` spread uniformly
/// over `interval`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepPiece {
    pub interval: Interval,
    pub weight: f64,
}

/// `Σ λ_k 1_{I_k}/|I_k|` with `I_{k+1} ⊊ I_k` and `Σ λ_k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDensity {
    pieces: Vec<StepPiece>,
}

impl StepDensity {
    /// Pieces on identical intervals are merged; the rest must form a
    /// strictly nested chain (in any input order).
    pub fn new(pieces: Vec<StepPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(DensityError::Empty);
        }
        let mut merged: Vec<StepPiece> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            if !(piece.weight > 0.0 && piece.weight.is_finite()) {
                return Err(DensityError::InvalidWeights(format!(
                    "weight {} must be positive",
                    piece.weight
                )));
            }
            match merged.iter_mut().find(|m| m.interval == piece.interval) {
                Some(existing) => existing.weight += piece.weight,
                None => merged.push(piece),
            }
        }
        let total: f64 = merged.iter().map(|p| p.weight).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(DensityError::InvalidWeights(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        merged.sort_by(|a, b| b.interval.len().total_cmp(&a.interval.len()));
        for pair in merged.windows(2) {
            let (outer, inner) = (pair[0].interval, pair[1].interval);
            if !inner.is_within(&outer) || inner == outer {
                return Err(DensityError::NotNested(format!(
                    "[{}, {}] is not strictly inside [{}, {}]",
                    inner.lo, inner.hi, outer.lo, outer.hi
                )));
            }
        }
        Ok(Self { pieces: merged })
    }

    pub fn pieces(&self) -> &[StepPiece] {
        &self.pieces
    }

    pub fn support(&self) -> Interval {
        self.pieces[0].interval
    }

    /// Constant pieces of the step function, left to right.
    pub fn levels(&self) -> Vec<(Interval, f64)> {
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.interval.lo, p.interval.hi])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .filter_map(|w| {
                let cell = Interval::new(w[0], w[1]).ok()?;
                let value = self
                    .pieces
                    .iter()
                    .filter(|p| cell.is_within(&p.interval))
                    .map(|p| p.weight / p.interval.len())
                    .sum::<f64>();
                Some((cell, value))
            })
            .collect()
    }

    pub fn value(&self, t: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|p| t >= p.interval.lo && t < p.interval.hi)
            .map(|p| p.weight / p.interval.len())
            .sum()
    }

    /// The uniform components as mixture terms.
    pub fn components(&self) -> Vec<MixtureComponent> {
        self.pieces
            .iter()
            .map(|p| MixtureComponent {
                weight: p.weight,
                mean: p.interval.midpoint(),
                variance: p.interval.len().powi(2) / 12.0,
            })
            .collect()
    }

    /// Law of `scale·X + shift`, `scale ≠ 0`.
    pub fn affine_transform(&self, scale: f64, shift: f64) -> Result<Self> {
        check_affine_map(scale, shift)?;
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let (a, b) = (scale * p.interval.lo + shift, scale * p.interval.hi + shift);
                Ok(StepPiece { interval: Interval::new(a.min(b), a.max(b))?, weight: p.weight })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pieces)
    }
}

/// Uniform samples `values[i] = f(origin + i·step)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDensity {
    origin: f64,
    step: f64,
    values: Vec<f64>,
}

impl GridDensity {
    pub fn new(origin: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !(origin.is_finite() && step.is_finite() && step > 0.0) {
            return Err(DensityError::InvalidGrid(format!(
                "origin {origin} and step {step} must be finite with step > 0"
            )));
        }
        if values.len() < 2 {
            return Err(DensityError::InvalidGrid("need at least two samples".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(DensityError::InvalidGrid(format!(
                "value at index {i} is {v}; samples must be finite and non-negative"
            )));
        }
        if values.iter().all(|v| *v == 0.0) {
            return Err(DensityError::ZeroMass);
        }
        Ok(Self { origin, step, values })
    }

    /// Samples `f` at `points` nodes spanning `[lo, hi]`.
    pub fn sample(lo: f64, hi: f64, points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let interval = Interval::new(lo, hi)?;
        if points < 2 {
            return Err(DensityError::InvalidGrid("need at least two samples".into()));
        }
        let step = interval.len() / (points - 1) as f64;
        // pin the last node so rounding cannot step past `hi`
        let node = |i: usize| if i + 1 == points { hi } else { lo + i as f64 * step };
        Self::new(lo, step, (0..points).map(|i| f(node(i))).collect())
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    fn trapezoid(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.values.len();
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                w * g(self.node(i), v)
            })
            .sum::<f64>()
            * self.step
    }

    /// Divides by the trapezoidal mass.
    pub fn normalize(&self) -> Result<Self> {
        let mass = self.mass();
        Self::new(self.origin, self.step, self.values.iter().map(|v| v / mass).collect())
    }

    /// Length of the hull of the cells on which the piecewise-linear
    /// interpolant is positive.
    fn support_length(&self) -> f64 {
        let first = self.values.iter().position(|v| *v > 0.0).unwrap_or(0);
        let last = self.values.iter().rposition(|v| *v > 0.0).unwrap_or(0);
        let lo = first.saturating_sub(1);
        let hi = (last + 1).min(self.values.len() - 1);
        (hi - lo) as f64 * self.step
    }

    /// Discrete log-concavity on a contiguous positive run:
    /// `f_i² ≥ f_{i-1} f_{i+1}`.
    pub fn log_concavity(&self) -> LogConcavity {
        let first = self.values.iter().position(|v| *v > 0.0).unwrap_or(0);
        let last = self.values.iter().rposition(|v| *v > 0.0).unwrap_or(0);
        let run = &self.values[first..=last];
        if run.contains(&0.0) {
            return LogConcavity::NotLogConcave;
        }
        let ok = run
            .windows(3)
            .all(|w| w[1] * w[1] >= w[0] * w[2] * (1.0 - KNOT_TOLERANCE));
        if ok {
            LogConcavity::LogConcave
        } else {
            LogConcavity::NotLogConcave
        }
    }
}

/// Scalar summary of a density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarStats {
    pub mass: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub shannon_entropy: f64,
}

/// Mixture term for [`mixture_variance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Variance of `Σ λ_i f_i` from the components' weights, barycenters and
/// variances, folding `λVar(f_0) + (1-λ)Var(f_1) + λ(1-λ)(μ_1-μ_0)²` pairwise.
pub fn mixture_variance(components: &[MixtureComponent]) -> Result<f64> {
    let sum: f64 = components.iter().map(|c| c.weight).sum();
    if components.is_empty()
        || components.iter().any(|c| !(c.weight > 0.0))
        || (sum - 1.0).abs() > MASS_TOLERANCE
    {
        return Err(DensityError::MixtureWeights { sum });
    }
    let first = components[0];
    let (_, _, variance) = components[1..].iter().fold(
        (first.weight, first.mean, first.variance),
        |(w0, mu0, var0), c| {
            let total = w0 + c.weight;
            let lambda = w0 / total;
            let var = lambda * var0
                + (1.0 - lambda) * c.variance
                + lambda * (1.0 - lambda) * (c.mean - mu0).powi(2);
            (total, lambda * mu0 + (1.0 - lambda) * c.mean, var)
        },
    );
    Ok(variance)
}

fn check_affine_map(scale: f64, shift: f64) -> Result<()> {
    if !(scale != 0.0 && scale.is_finite() && shift.is_finite()) {
        return Err(DensityError::InvalidAffineMap { scale, shift });
    }
    Ok(())
}

fn ensure_normalized(mass: f64) -> Result<()> {
    if (mass - 1.0).abs() > MASS_TOLERANCE {
        return Err(DensityError::NotNormalized { mass });
    }
    Ok(())
}

fn check_renyi_order(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(DensityError::InvalidRenyiOrder(alpha));
    }
    Ok(())
}

fn renyi_from_power_integral(alpha: f64, integral: f64) -> Result<f64> {
    if !(integral.is_finite() && integral > 0.0) {
        return Err(DensityError::NonFinite("divergent Rényi integral"));
    }
    Ok(integral.ln() / (1.0 - alpha))
}

/// Functionals shared by every density carrier.
pub trait DensityStats {
    /// `∫ f`.
    fn mass(&self) -> f64;

    /// Raw moment `∫ t^order f(t) dt` for `order ∈ {0, 1, 2}`.
    fn moment(&self, order: u32) -> Result<f64>;

    /// `∫ (t - center)² f / ∫ f`, computed about `center` to avoid cancellation.
    fn centered_second_moment(&self, center: f64) -> Result<f64>;

    /// `-∫ f ln f` of a normalized density.
    fn shannon_entropy(&self) -> Result<f64>;

    /// `(1-α)^{-1} ln ∫ f^α` with the α ∈ {0, 1, ∞} limits.
    fn renyi_entropy(&self, alpha: f64) -> Result<f64>;

    /// Essential supremum.
    fn sup(&self) -> f64;

    fn mean(&self) -> Result<f64> {
        let mass = self.mass();
        if !(mass > 0.0) {
            return Err(DensityError::ZeroMass);
        }
        Ok(self.moment(1)? / mass)
    }

    fn variance(&self) -> Result<f64> {
        let mean = self.mean()?;
        self.centered_second_moment(mean)
    }

    /// `N(X) = e^{2h(X)} / (2πe)`.
    fn entropy_power(&self) -> Result<f64> {
        Ok((2.0 * self.shannon_entropy()?).exp() / (2.0 * std::f64::consts::PI * std::f64::consts::E))
    }

    /// `N_α(X) = e^{2h_α(X)}`, without the `2πe` normalization.
    fn renyi_entropy_power(&self, alpha: f64) -> Result<f64> {
        Ok((2.0 * self.renyi_entropy(alpha)?).exp())
    }

    /// `h - ½ ln Var - 1`.
    fn entropy_variance_gap(&self) -> Result<f64> {
        let variance = self.variance()?;
        if !(variance > 0.0) {
            return Err(DensityError::NonPositiveVariance { variance });
        }
        Ok(self.shannon_entropy()? - 0.5 * variance.ln() - 1.0)
    }

    fn stats(&self) -> Result<ScalarStats> {
        let mass = self.mass();
        let mean = self.mean()?;
        Ok(ScalarStats {
            mass,
            mean,
            second_moment: self.moment(2)? / mass,
            variance: self.centered_second_moment(mean)?,
            shannon_entropy: self.shannon_entropy()?,
        })
    }
}

impl DensityStats for PiecewiseExpAffineDensity {
    fn mass(&self) -> f64 {
        self.segments.iter().map(ExpAffineSegment::mass).sum()
    }

    fn moment(&self, order: u32) -> Result<f64> {
        self.segments
            .iter()
            .map(|s| s.centered_moment(order, 0.0))
            .sum()
    }

    fn centered_second_moment(&self, center: f64) -> Result<f64> {
        let mass = self.mass();
        if !(mass > 0.0) {
            return Err(DensityError::ZeroMass);
        }
        let m2: f64 = self
            .segments
            .iter()
            .map(|s| s.centered_moment(2, center))
            .sum::<Result<f64>>()?;
        Ok(m2 / mass)
    }

    fn shannon_entropy(&self) -> Result<f64> {
        ensure_normalized(self.mass())?;
        let h: f64 = self.segments.iter().map(ExpAffineSegment::potential_integral).sum();
        if !h.is_finite() {
            return Err(DensityError::NonFinite("entropy"));
        }
        Ok(h)
    }

    fn renyi_entropy(&self, alpha: f64) -> Result<f64> {
        check_renyi_order(alpha)?;
        ensure_normalized(self.mass())?;
        if alpha == 1.0 {
            return self.shannon_entropy();
        }
        if alpha == 0.0 {
            let length: f64 = self.segments.iter().map(|s| s.interval.len()).sum();
            return Ok(length.ln());
        }
        if alpha.is_infinite() {
            return Ok(-self.sup().ln());
        }
        let integral: f64 = self.segments.iter().map(|s| s.power_integral(alpha)).sum();
        renyi_from_power_integral(alpha, integral)
    }

    fn sup(&self) -> f64 {
        self.segments
            .iter()
            .map(ExpAffineSegment::max_value)
            .fold(0.0, f64::max)
    }
}

impl DensityStats for StepDensity {
    fn mass(&self) -> f64 {
        self.pieces.iter().map(|p| p.weight).sum()
    }

    fn moment(&self, order: u32) -> Result<f64> {
        let per_piece = |p: &StepPiece| {
            let (a, b) = (p.interval.lo, p.interval.hi);
            match order {
                0 => Ok(p.weight),
                1 => Ok(p.weight * 0.5 * (a + b)),
                2 => Ok(p.weight * (a * a + a * b + b * b) / 3.0),
                _ => Err(DensityError::InvalidOrder(order)),
            }
        };
        self.pieces.iter().map(per_piece).sum()
    }

    fn centered_second_moment(&self, center: f64) -> Result<f64> {
        let m2: f64 = self
            .pieces
            .iter()
            .map(|p| {
                let (a, b) = (p.interval.lo - center, p.interval.hi - center);
                p.weight * (a * a + a * b + b * b) / 3.0
            })
            .sum();
        Ok(m2 / self.mass())
    }

    fn shannon_entropy(&self) -> Result<f64> {
        ensure_normalized(self.mass())?;
        Ok(-self
            .levels()
            .iter()
            .map(|(cell, v)| cell.len() * v * v.ln())
            .sum::<f64>())
    }

    fn renyi_entropy(&self, alpha: f64) -> Result<f64> {
        check_renyi_order(alpha)?;
        ensure_normalized(self.mass())?;
        if alpha == 1.0 {
            return self.shannon_entropy();
        }
        if alpha == 0.0 {
            return Ok(self.support().len().ln());
        }
        if alpha.is_infinite() {
            return Ok(-self.sup().ln());
        }
        let integral: f64 = self
            .levels()
            .iter()
            .map(|(cell, v)| cell.len() * v.powf(alpha))
            .sum();
        renyi_from_power_integral(alpha, integral)
    }

    fn sup(&self) -> f64 {
        self.pieces.iter().map(|p| p.weight / p.interval.len()).sum()
    }
}

impl DensityStats for GridDensity {
    fn mass(&self) -> f64 {
        self.trapezoid(|_, v| v)
    }

    fn moment(&self, order: u32) -> Result<f64> {
        match order {
            0..=2 => Ok(self.trapezoid(|t, v| t.powi(order as i32) * v)),
            _ => Err(DensityError::InvalidOrder(order)),
        }
    }

    fn centered_second_moment(&self, center: f64) -> Result<f64> {
        let mass = self.mass();
        Ok(self.trapezoid(|t, v| (t - center).powi(2) * v) / mass)
    }

    fn shannon_entropy(&self) -> Result<f64> {
        ensure_normalized(self.mass())?;
        Ok(self.trapezoid(|_, v| if v > 0.0 { -v * v.ln() } else { 0.0 }))
    }

    fn renyi_entropy(&self, alpha: f64) -> Result<f64> {
        check_renyi_order(alpha)?;
        ensure_normalized(self.mass())?;
        if alpha == 1.0 {
            return self.shannon_entropy();
        }
        if alpha == 0.0 {
            return Ok(self.support_length().ln());
        }
        if alpha.is_infinite() {
            return Ok(-self.sup().ln());
        }
        renyi_from_power_integral(alpha, self.trapezoid(|_, v| v.powf(alpha)))
    }

    fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Any of the supported density carriers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Density {
    ExpAffine(PiecewiseExpAffineDensity),
    Step(StepDensity),
    Grid(GridDensity),
}

impl From<PiecewiseExpAffineDensity> for Density {
    fn from(d: PiecewiseExpAffineDensity) -> Self {
        Density::ExpAffine(d)
    }
}

impl From<StepDensity> for Density {
    fn from(d: StepDensity) -> Self {
        Density::Step(d)
    }
}

impl From<GridDensity> for Density {
    fn from(d: GridDensity) -> Self {
        Density::Grid(d)
    }
}

macro_rules! dispatch {
    ($self:ident, $d:ident => $body:expr) => {
        match $self {
            Density::ExpAffine($d) => $body,
            Density::Step($d) => $body,
            Density::Grid($d) => $body,
        }
    };
}

impl DensityStats for Density {
    fn mass(&self) -> f64 {
        dispatch!(self, d => d.mass())
    }

    fn moment(&self, order: u32) -> Result<f64> {
        dispatch!(self, d => d.moment(order))
    }

    fn centered_second_moment(&self, center: f64) -> Result<f64> {
        dispatch!(self, d => d.centered_second_moment(center))
    }

    fn shannon_entropy(&self) -> Result<f64> {
        dispatch!(self, d => d.shannon_entropy())
    }

    fn renyi_entropy(&self, alpha: f64) -> Result<f64> {
        dispatch!(self, d => d.renyi_entropy(alpha))
    }

    fn sup(&self) -> f64 {
        dispatch!(self, d => d.sup())
    }
}

impl Density {
    pub fn log_concavity(&self) -> LogConcavity {
        match self {
            Density::ExpAffine(d) => d.log_concavity(),
            Density::Step(_) => LogConcavity::LimitOfLogConcave,
            Density::Grid(d) => d.log_concavity(),
        }
    }

    pub fn is_log_concave(&self) -> bool {
        self.log_concavity().holds()
    }

    /// Rescales to unit mass (offset shift, weight check, or division).
    pub fn normalize(&self) -> Result<Self> {
        Ok(match self {
            Density::ExpAffine(d) => Density::ExpAffine(d.normalize()?),
            Density::Step(d) => Density::Step(d.clone()),
            Density::Grid(d) => Density::Grid(d.normalize()?),
        })
    }
}

/// `f(0)²·E X²` for a non-increasing density, with `0` the left end of the
/// support. Bounded by 2 for log-concave `f`, with equality for `e^{-x}`.
pub fn ball_bound_check(d: &Density) -> Result<f64> {
    let (peak, lo) = match d {
        Density::ExpAffine(e) => {
            if !e.is_non_increasing() {
                return Err(DensityError::NotNonIncreasing);
            }
            (e.segments[0].value_lo(), e.support().lo)
        }
        Density::Step(s) => {
            let lo = s.support().lo;
            if s.pieces.iter().any(|p| p.interval.lo != lo) {
                return Err(DensityError::NotNonIncreasing);
            }
            (s.sup(), lo)
        }
        Density::Grid(g) => {
            if g.values.windows(2).any(|w| w[1] > w[0]) {
                return Err(DensityError::NotNonIncreasing);
            }
            (g.values[0], g.origin)
        }
    };
    ensure_normalized(d.mass())?;
    Ok(peak * peak * d.centered_second_moment(lo)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn exp1() -> PiecewiseExpAffineDensity {
        PiecewiseExpAffineDensity::truncated_exponential(1.0, 40.0).unwrap()
    }

    fn uniform01() -> PiecewiseExpAffineDensity {
        PiecewiseExpAffineDensity::uniform(0.0, 1.0).unwrap()
    }

    fn half_tent_step() -> StepDensity {
        StepDensity::new(vec![
            StepPiece { interval: Interval::new(0.0, 2.0).unwrap(), weight: 0.5 },
            StepPiece { interval: Interval::new(0.5, 1.0).unwrap(), weight: 0.5 },
        ])
        .unwrap()
    }

    #[test]
    fn unit_exp_moment_branches_agree_at_threshold() {
        for k in 0..3 {
            let below = unit_exp_moment(k, SERIES_THRESHOLD * (1.0 - 1e-15));
            let above = unit_exp_moment(k, SERIES_THRESHOLD * (1.0 + 1e-15));
            assert!((below - above).abs() < 1e-13, "k={k}: {below} vs {above}");
        }
        assert!((unit_exp_moment(2, 0.0) - 1.0 / 3.0).abs() < 1e-16);
        // uniform limit through the series branch
        assert!((unit_exp_moment(1, 1e-9) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn exponential_moments() {
        let d = exp1();
        assert!((d.moment(0).unwrap() - 1.0).abs() < 1e-12);
        assert!((d.moment(1).unwrap() - 1.0).abs() < 1e-12);
        assert!((d.variance().unwrap() - 1.0).abs() < 1e-12);
        assert!((d.shannon_entropy().unwrap() - 1.0).abs() < 1e-10);
        assert!(d.entropy_variance_gap().unwrap().abs() < 1e-10);
    }

    #[test]
    fn uniform_values() {
        let d = uniform01();
        assert!((d.moment(2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.variance().unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!(d.shannon_entropy().unwrap().abs() < 1e-15);
        assert!(d.renyi_entropy(0.0).unwrap().abs() < 1e-15);
        let gap = d.entropy_variance_gap().unwrap();
        assert!((gap - (0.5 * 12f64.ln() - 1.0)).abs() < 1e-12);
        assert!((gap - 0.242453).abs() < 1e-6);
    }

    #[test]
    fn truncated_exponential_entropy() {
        let d = PiecewiseExpAffineDensity::truncated_exponential(1.0, LN_2).unwrap();
        // normalized density is 2e^{-t}
        assert!((d.segments()[0].value_lo() - 2.0).abs() < 1e-14);
        let h = d.shannon_entropy().unwrap();
        assert!((h - (1.0 - 2.0 * LN_2)).abs() < 1e-14);
        assert!((h + 0.386294).abs() < 1e-6);
    }

    #[test]
    fn step_variance_and_mixture() {
        let d = half_tent_step();
        let var = d.variance().unwrap();
        // 0.958333… - 0.875²
        let expected = (0.5 * 4.0 / 3.0 + 0.5 * (0.25 + 0.5 + 1.0) / 3.0) - 0.875f64.powi(2);
        assert!((var - expected).abs() < 1e-15);
        assert!((var - 0.192708).abs() < 1e-6);
        let mix = mixture_variance(&d.components()).unwrap();
        assert!((mix - var).abs() < 1e-14);
    }

    #[test]
    fn mixture_variance_trivial_cases() {
        let single = [MixtureComponent { weight: 1.0, mean: 3.0, variance: 0.7 }];
        assert_eq!(mixture_variance(&single).unwrap(), 0.7);
        let points = [
            MixtureComponent { weight: 0.5, mean: 0.0, variance: 0.0 },
            MixtureComponent { weight: 0.5, mean: 2.0, variance: 0.0 },
        ];
        assert!((mixture_variance(&points).unwrap() - 1.0).abs() < 1e-15);
        let bad = [MixtureComponent { weight: 0.4, mean: 0.0, variance: 0.0 }];
        assert!(matches!(
            mixture_variance(&bad),
            Err(DensityError::MixtureWeights { .. })
        ));
    }

    #[test]
    fn renyi_values() {
        let d = exp1();
        assert!((d.renyi_entropy(2.0).unwrap() - LN_2).abs() < 1e-12);
        assert!(d.renyi_entropy(f64::INFINITY).unwrap().abs() < 1e-12);
        assert!((d.renyi_entropy_power(2.0).unwrap() - 4.0).abs() < 1e-11);
        let n = d.entropy_power().unwrap();
        assert!((n - std::f64::consts::E / (2.0 * std::f64::consts::PI)).abs() < 1e-10);
        assert!(matches!(
            d.renyi_entropy(-1.0),
            Err(DensityError::InvalidRenyiOrder(_))
        ));
    }

    #[test]
    fn log_concavity_checks() {
        assert_eq!(exp1().log_concavity(), LogConcavity::LogConcave);
        // potential slopes (1, -1): V has a concave kink at 0
        let valley = PiecewiseExpAffineDensity::new(vec![
            ExpAffineSegment::new(-1.0, 0.0, 1.0, 0.0).unwrap(),
            ExpAffineSegment::new(0.0, 1.0, -1.0, 0.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(valley.log_concavity(), LogConcavity::NotLogConcave);
        assert!(!valley.is_unimodal());
        assert_eq!(
            Density::from(half_tent_step()).log_concavity(),
            LogConcavity::LimitOfLogConcave
        );
    }

    #[test]
    fn ball_bound_values() {
        let b = ball_bound_check(&exp1().into()).unwrap();
        assert!((b - 2.0).abs() < 1e-12 && b <= 2.0 + 1e-12);
        let u = ball_bound_check(&uniform01().into()).unwrap();
        assert!((u - 1.0 / 3.0).abs() < 1e-14);
        let t = PiecewiseExpAffineDensity::truncated_exponential(1.0, LN_2).unwrap();
        let second = 2.0 - 2.0 * LN_2 - LN_2 * LN_2;
        let b = ball_bound_check(&t.into()).unwrap();
        assert!((b - 4.0 * second).abs() < 1e-13);
        assert!(b < 2.0);
        let rising = PiecewiseExpAffineDensity::new(vec![ExpAffineSegment::new(0.0, 1.0, -1.0, 0.0).unwrap()])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(
            ball_bound_check(&rising.into()),
            Err(DensityError::NotNonIncreasing)
        );
    }

    #[test]
    fn construction_errors() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(ExpAffineSegment::new(0.0, 1.0, 0.0, -1e4).is_err());
        let gap = PiecewiseExpAffineDensity::new(vec![
            ExpAffineSegment::new(0.0, 1.0, 0.0, 0.0).unwrap(),
            ExpAffineSegment::new(1.5, 2.0, 0.0, 0.0).unwrap(),
        ]);
        assert!(matches!(gap, Err(DensityError::Discontiguous { .. })));
        let crossing = StepDensity::new(vec![
            StepPiece { interval: Interval::new(0.0, 2.0).unwrap(), weight: 0.5 },
            StepPiece { interval: Interval::new(1.0, 3.0).unwrap(), weight: 0.5 },
        ]);
        assert!(matches!(crossing, Err(DensityError::NotNested(_))));
        assert!(GridDensity::new(0.0, 0.1, vec![0.1, -0.2, 0.3]).is_err());
        let unnormalized = PiecewiseExpAffineDensity::uniform(0.0, 2.0)
            .unwrap()
            .affine_transform(1.0, 0.0)
            .unwrap();
        assert!(unnormalized.shannon_entropy().is_ok());
        let heavy = PiecewiseExpAffineDensity::new(vec![ExpAffineSegment::new(0.0, 1.0, 0.0, -1.0).unwrap()])
            .unwrap();
        assert!(matches!(
            heavy.shannon_entropy(),
            Err(DensityError::NotNormalized { .. })
        ));
    }

    #[test]
    fn step_ties_are_merged() {
        let d = StepDensity::new(vec![
            StepPiece { interval: Interval::new(0.0, 2.0).unwrap(), weight: 0.25 },
            StepPiece { interval: Interval::new(0.5, 1.0).unwrap(), weight: 0.5 },
            StepPiece { interval: Interval::new(0.0, 2.0).unwrap(), weight: 0.25 },
        ])
        .unwrap();
        assert_eq!(d, half_tent_step());
    }

    #[test]
    fn affine_invariance_of_gap() {
        let d = exp1();
        let moved = d.affine_transform(3.5, -7.25).unwrap();
        let g0 = d.entropy_variance_gap().unwrap();
        let g1 = moved.entropy_variance_gap().unwrap();
        assert!((g0 - g1).abs() < 1e-10);
    }
}
