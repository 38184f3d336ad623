//! The two-piece exponential family and the certificate function `G`.
//!
//! With the steeper slope normalized to one, the family is
//!
//! ```text
//! g(t) = e^{-t/a} on [-a·x, 0],   e^{-t} on [0, -y],   a ≥ 1, x ≥ 0, y ≤ 0,
//! ```
//!
//! normalized by its mass `m = a(e^x - 1) - (e^y - 1)`. The entropy–variance
//! inequality on this family is equivalent to `G(a, x, y) ≥ 0` where
//!
//! ```text
//! G = m⁴·exp(-2(a·x·e^x - y·e^y)/m) - m·∫t²g + (∫t·g)² = m²(e^{2h-2} - Var).
//! ```
//!
//! The exponent equals `-2x - L` with `L ∈ [0, 2]`. Replacing `e^{-L}` by the
//! quartic [`quartic_minorant`] turns `15·e^{2x}·G` into the polynomial
//! combination `Σ (a-1)^i P_i(x, y)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::density::{DensityError, DensityStats, ExpAffineSegment, PiecewiseExpAffineDensity};

pub const MAX_A: f64 = 1e6;
pub const MAX_X: f64 = 500.0;
/// Lower limit on `y`; below it `e^y` is zero in double precision anyway.
pub const MIN_Y: f64 = -700.0;

/// Slack allowed on `L ∈ [0, 2]`.
const L_TOLERANCE: f64 = 1e-12;

/// Seed for the randomized identity check when `LCENTROPY_SEED` is unset.
pub const DEFAULT_SEED: u64 = 0x1ce7_2024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoPieceError {
    #[error("invalid parameters (a={a}, x={x}, y={y}): {reason}")]
    InvalidParams { a: f64, x: f64, y: f64, reason: &'static str },
    #[error("L={0} is outside [0, 2]")]
    OutOfDomain(f64),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("evaluation budget must be positive")]
    ZeroBudget,
    #[error(transparent)]
    Density(#[from] DensityError),
}

pub type Result<T> = std::result::Result<T, TwoPieceError>;

/// `(a, x, y)` with `a ≥ 1`, `x ≥ 0`, `y ≤ 0` and `(x, y) ≠ (0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPieceParams {
    a: f64,
    x: f64,
    y: f64,
}

impl TwoPieceParams {
    pub fn new(a: f64, x: f64, y: f64) -> Result<Self> {
        let invalid = |reason| Err(TwoPieceError::InvalidParams { a, x, y, reason });
        if !(a.is_finite() && x.is_finite() && y.is_finite()) {
            return invalid("non-finite parameter");
        }
        if !(1.0..=MAX_A).contains(&a) {
            return invalid("a must lie in [1, 1e6]");
        }
        if !(0.0..=MAX_X).contains(&x) {
            return invalid("x must lie in [0, 500]");
        }
        if !(MIN_Y..=0.0).contains(&y) {
            return invalid("y must lie in [-700, 0]");
        }
        if x == 0.0 && y == 0.0 {
            return invalid("degenerate support");
        }
        Ok(Self { a, x, y })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// `m = ∫ g = a(e^x - 1) - (e^y - 1)`.
    pub fn mass(&self) -> f64 {
        self.a * self.x.exp_m1() - self.y.exp_m1()
    }
}

/// `e^t(1 - t) - 1`, accurate near zero.
fn first_kernel(t: f64) -> f64 {
    if t.abs() < 1.0 {
        // Σ_{k≥2} (1 - k) t^k / k!
        let mut sum = 0.0;
        let mut power = t; // t^k / k!
        for k in 2..40 {
            power *= t / k as f64;
            let term = (1.0 - k as f64) * power;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    t.exp() * (1.0 - t) - 1.0
}

/// `e^t(t² - 2t + 2) - 2`, accurate near zero.
fn second_kernel(t: f64) -> f64 {
    if t.abs() < 1.0 {
        // Σ_{k≥3} (k - 1)(k - 2) t^k / k!
        let mut sum = 0.0;
        let mut power = t * t / 2.0;
        for k in 3..40 {
            power *= t / k as f64;
            let term = ((k - 1) * (k - 2)) as f64 * power;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    t.exp() * (t * t - 2.0 * t + 2.0) - 2.0
}

/// The four integrals of the unnormalized `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormStats {
    /// `∫ g`.
    pub mass: f64,
    /// `∫ t g`.
    pub first_moment: f64,
    /// `∫ t² g`.
    pub second_moment: f64,
    /// `-∫ g ln g`.
    pub entropy_integral: f64,
}

impl ClosedFormStats {
    /// Shannon entropy of `g / m`.
    pub fn entropy(&self) -> f64 {
        self.entropy_integral / self.mass + self.mass.ln()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.first_moment / self.mass;
        self.second_moment / self.mass - mean * mean
    }

    /// `h - ½ ln Var - 1` of the normalized density.
    pub fn gap(&self) -> f64 {
        self.entropy() - 0.5 * self.variance().ln() - 1.0
    }
}

pub fn closed_form_stats(p: &TwoPieceParams) -> ClosedFormStats {
    let (a, x, y) = (p.a, p.x, p.y);
    ClosedFormStats {
        mass: p.mass(),
        first_moment: a * a * first_kernel(x) - first_kernel(y),
        second_moment: a * a * a * second_kernel(x) - second_kernel(y),
        entropy_integral: a * first_kernel(x) - first_kernel(y),
    }
}

/// `g / m` as a piecewise exp-affine density on `[-a·x, -y]`.
pub fn build_density(p: &TwoPieceParams) -> Result<PiecewiseExpAffineDensity> {
    let mut segments = Vec::with_capacity(2);
    if p.x > 0.0 {
        segments.push(ExpAffineSegment::new(-p.a * p.x, 0.0, 1.0 / p.a, 0.0)?);
    }
    if p.y < 0.0 {
        segments.push(ExpAffineSegment::new(0.0, -p.y, 1.0, 0.0)?);
    }
    Ok(PiecewiseExpAffineDensity::new(segments)?.normalize()?)
}

/// `h - ½ ln Var - 1` of the family member, from the closed forms.
pub fn gap(p: &TwoPieceParams) -> f64 {
    closed_form_stats(p).gap()
}

/// `L = 2((x - y)e^y + x(a - 1)) / m`.
pub fn exponent_shift(p: &TwoPieceParams) -> Result<f64> {
    let l = 2.0 * ((p.x - p.y) * p.y.exp() + p.x * (p.a - 1.0)) / p.mass();
    if !(-L_TOLERANCE..=2.0 + L_TOLERANCE).contains(&l) {
        return Err(TwoPieceError::OutOfDomain(l));
    }
    Ok(l.clamp(0.0, 2.0))
}

/// `1 - L + L²/2 - L³/6 + 7L⁴/240`, a lower bound for `e^{-L}` on `[0, 2]`.
pub fn quartic_minorant(l: f64) -> Result<f64> {
    if !(-L_TOLERANCE..=2.0 + L_TOLERANCE).contains(&l) {
        return Err(TwoPieceError::OutOfDomain(l));
    }
    Ok(1.0 + l * (-1.0 + l * (0.5 + l * (-1.0 / 6.0 + l * 7.0 / 240.0))))
}

/// `G` together with the quantities it is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GEvaluation {
    pub g: f64,
    pub mass: f64,
    pub l: f64,
    /// `m²(e^{2h-2} - Var)` with `h` and `Var` taken from the density module.
    pub consistency: f64,
    /// `Σ (a-1)^i P_i(x, y)`.
    pub poly_lower_bound: f64,
}

fn g_from_stats(s: &ClosedFormStats, x: f64, l: f64) -> f64 {
    let m = s.mass;
    m.powi(4) * (-2.0 * x - l).exp() - m * s.second_moment + s.first_moment.powi(2)
}

pub fn eval_g(p: &TwoPieceParams) -> Result<GEvaluation> {
    let stats = closed_form_stats(p);
    let l = exponent_shift(p)?;
    let d = build_density(p)?;
    let h = d.shannon_entropy()?;
    let var = d.variance()?;
    Ok(GEvaluation {
        g: g_from_stats(&stats, p.x, l),
        mass: stats.mass,
        l,
        consistency: stats.mass.powi(2) * ((2.0 * h - 2.0).exp() - var),
        poly_lower_bound: poly_lower_bound(p),
    })
}

/// `G` alone, from the closed forms.
pub fn g_value(p: &TwoPieceParams) -> Result<f64> {
    Ok(g_from_stats(&closed_form_stats(p), p.x, exponent_shift(p)?))
}

/// `15·e^{2x}·G` with `e^{-L}` replaced by the quartic minorant, and a
/// magnitude scale for relative comparisons.
pub fn scaled_minorant_g(p: &TwoPieceParams) -> Result<(f64, f64)> {
    let s = closed_form_stats(p);
    let q = quartic_minorant(exponent_shift(p)?)?;
    let m4 = s.mass.powi(4);
    let e2x = (2.0 * p.x).exp();
    let value = 15.0 * (m4 * q + e2x * (s.first_moment.powi(2) - s.mass * s.second_moment));
    let scale = 15.0 * (m4 * q.abs() + e2x * (s.first_moment.powi(2) + (s.mass * s.second_moment).abs()));
    Ok((value, scale))
}

/// `P_0, …, P_4` evaluated in floating point (`P_4` ignores `y`).
pub fn eval_p(i: usize, x: f64, y: f64) -> f64 {
    let ex = x.exp();
    let ey = y.exp();
    let (x2, x3, x4) = (x * x, x * x * x, x * x * x * x);
    let (y2, y3) = (y * y, y * y * y);
    let ex2 = ex * ex;
    let ex3 = ex2 * ex;
    let ey2 = ey * ey;
    let ey3 = ey2 * ey;
    match i {
        0 => {
            let reduced = 15.0 * ex2 * ey * (2.0 * x2 + x * (6.0 - 4.0 * y) + 2.0 * y2 - 6.0 * y + 5.0)
                + 15.0 * ex3 * (x2 - 2.0 * x * (y + 1.0) + y2 + 2.0 * y - 2.0)
                - 10.0
                    * ex
                    * ey2
                    * (2.0 * x3 - 6.0 * x2 * (y - 1.0) + 3.0 * x * (2.0 * y2 - 4.0 * y + 3.0)
                        - 2.0 * y3
                        + 6.0 * y2
                        - 9.0 * y
                        + 6.0)
                + ey3
                    * (7.0 * x4 - 4.0 * x3 * (7.0 * y - 5.0)
                        + 6.0 * x2 * (7.0 * y2 - 10.0 * y + 5.0)
                        + x * (-28.0 * y3 + 60.0 * y2 - 60.0 * y + 30.0))
                + ey3 * (7.0 * y2 * y2 - 20.0 * y3 + 30.0 * y2 - 30.0 * y + 15.0);
            ey * reduced
        }
        1 => {
            15.0 * ex2 * ey * (4.0 * x2 - 4.0 * x * (y - 3.0) - y2 - 8.0 * y + 8.0)
                + 60.0 * ex2 * ey2 * (x2 + x * (3.0 - 2.0 * y) + y2 - 3.0 * y + 3.0)
                + 15.0 * ex3 * ey * (3.0 * x2 - 4.0 * x * (y + 2.0) + y2 + 8.0 * y - 8.0)
                + 15.0 * ex3 * x2
                - 30.0
                    * ex
                    * ey2
                    * (2.0 * x3 + x2 * (6.0 - 4.0 * y) + x * (2.0 * y2 - 8.0 * y + 9.0)
                        + 2.0 * (y2 - 3.0 * y + 3.0))
                - 10.0
                    * ex
                    * ey3
                    * (2.0 * x3 - 6.0 * x2 * (y - 1.0) + 3.0 * x * (2.0 * y2 - 4.0 * y + 3.0)
                        - 2.0 * y3
                        + 6.0 * y2
                        - 9.0 * y
                        + 6.0)
                - 2.0
                    * ey3
                    * (-14.0 * x4 + x3 * (42.0 * y - 40.0)
                        - 6.0 * x2 * (7.0 * y2 - 15.0 * y + 10.0)
                        + 2.0 * x * (7.0 * y3 - 30.0 * y2 + 45.0 * y - 30.0))
                - 10.0 * ey3 * (2.0 * y3 - 6.0 * y2 + 9.0 * y - 6.0)
        }
        2 => {
            let third = 10.0 * ex2 * ey2 * (x2 + x * (3.0 - 2.0 * y) + y2 - 3.0 * y + 3.0)
                + 10.0 * ex2 * ey * (4.0 * x2 - 4.0 * x * (y - 3.0) - 7.0 * y + 10.0)
                + 10.0 * ex2 * (x2 + 3.0 * x + 2.0)
                + 5.0 * ex3 * (3.0 * x2 - 2.0 * x - 4.0)
                - 10.0
                    * ex
                    * ey2
                    * (2.0 * x3 + x2 * (6.0 - 4.0 * y) + x * (2.0 * y2 - 8.0 * y + 9.0)
                        + 2.0 * (y2 - 3.0 * y + 3.0))
                - 10.0
                    * ex
                    * ey
                    * (2.0 * x3 - 2.0 * x2 * (y - 3.0) + x * (9.0 - 4.0 * y) - 3.0 * y + 6.0)
                + 2.0
                    * ey2
                    * (7.0 * x4
                        + x3 * (20.0 - 14.0 * y)
                        + x2 * (7.0 * y2 - 30.0 * y + 30.0)
                        + 10.0 * x * (y2 - 3.0 * y + 3.0)
                        + 5.0 * (y2 - 3.0 * y + 3.0))
                + 5.0 * (x - 4.0) * ex3 * ey * (3.0 * x - 2.0 * y + 2.0);
            3.0 * third
        }
        3 => {
            15.0 * ex3 * ey * (x2 - 4.0 * x + 2.0 * y - 2.0)
                + 30.0 * ex2 * ey * (2.0 * x2 - 2.0 * x * (y - 3.0) - 3.0 * y + 5.0)
                + 30.0 * ex2 * (2.0 * x2 + 6.0 * x + 5.0)
                + 15.0 * ex3 * (3.0 * x2 - 4.0 * x - 6.0)
                - 30.0
                    * ex
                    * ey
                    * (2.0 * x3 - 2.0 * x2 * (y - 3.0) + x * (9.0 - 4.0 * y) - 3.0 * y + 6.0)
                - 10.0 * ex * (2.0 * x3 + 6.0 * x2 + 9.0 * x + 6.0)
                + ey * (28.0 * x4 + x3 * (80.0 - 28.0 * y)
                    - 60.0 * x2 * (y - 2.0)
                    - 60.0 * x * (y - 2.0)
                    - 30.0 * (y - 2.0))
        }
        4 => {
            7.0 * x4 + 20.0 * x3 + 30.0 * x2 + 30.0 * x + 15.0
                + 15.0 * ex3 * (x2 - 2.0 * x - 2.0)
                + 15.0 * ex2 * (2.0 * x2 + 6.0 * x + 5.0)
                - 10.0 * ex * (2.0 * x3 + 6.0 * x2 + 9.0 * x + 6.0)
        }
        _ => panic!("P_i is defined for i in 0..=4, got {i}"),
    }
}

/// `Σ_{i=0}^{4} (a-1)^i P_i(x, y)`.
pub fn poly_lower_bound(p: &TwoPieceParams) -> f64 {
    let c = p.a - 1.0;
    (0..5)
        .rev()
        .fold(0.0, |acc, i| acc * c + eval_p(i, p.x, p.y))
}

/// Axis-aligned box of parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub a: (f64, f64),
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Region {
    pub fn new(a: (f64, f64), x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        let r = Self { a, x, y };
        for (name, (lo, hi)) in [("a", a), ("x", x), ("y", y)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(TwoPieceError::InvalidRegion(format!(
                    "{name} range [{lo}, {hi}] is empty or non-finite"
                )));
            }
        }
        if a.0 < 1.0 || a.1 > MAX_A || x.0 < 0.0 || x.1 > MAX_X || y.1 > 0.0 || y.0 < MIN_Y {
            return Err(TwoPieceError::InvalidRegion(
                "region must lie in a ∈ [1, 1e6], x ∈ [0, 500], y ∈ [-700, 0]".into(),
            ));
        }
        if x.1 == 0.0 && y.0 == 0.0 {
            return Err(TwoPieceError::InvalidRegion("region has degenerate support only".into()));
        }
        Ok(r)
    }

    /// The box used by the theorem sweep.
    pub fn standard() -> Self {
        Self { a: (1.0, 6.0), x: (0.0, 5.0), y: (-6.0, 0.0) }
    }

    /// Minimal `a`, maximal `x - y`: where the family is closest to a long
    /// one-sided exponential.
    pub fn exponential_corner(&self) -> (f64, f64, f64) {
        (self.a.0, self.x.1, self.y.0)
    }

    fn clamp(&self, v: [f64; 3]) -> [f64; 3] {
        [
            v[0].clamp(self.a.0, self.a.1),
            v[1].clamp(self.x.0, self.x.1),
            v[2].clamp(self.y.0, self.y.1),
        ]
    }

    fn widths(&self) -> [f64; 3] {
        [self.a.1 - self.a.0, self.x.1 - self.x.0, self.y.1 - self.y.0]
    }
}

fn axis(lo: f64, hi: f64, count: usize, i: usize) -> f64 {
    if count <= 1 || lo == hi {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (count - 1) as f64
    }
}

fn gap_at(v: [f64; 3]) -> f64 {
    match TwoPieceParams::new(v[0], v[1], v[2]) {
        Ok(p) => gap(&p),
        Err(_) => f64::INFINITY,
    }
}

/// Best point found by [`minimize_gap`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizeResult {
    pub params: TwoPieceParams,
    pub gap: f64,
    pub evaluations: usize,
}

/// Grid scan over half the budget, then coordinate descent with step halving.
/// Deterministic for a fixed region and budget.
pub fn minimize_gap(region: &Region, budget: usize) -> Result<MinimizeResult> {
    if budget == 0 {
        return Err(TwoPieceError::ZeroBudget);
    }
    let widths = region.widths();
    let free_axes = widths.iter().filter(|w| **w > 0.0).count().max(1);
    let per_axis = ((budget / 2).max(1) as f64).powf(1.0 / free_axes as f64).floor().max(1.0) as usize;
    let counts = widths.map(|w| if w > 0.0 { per_axis.max(2) } else { 1 });

    let mut best = [f64::NAN; 3];
    let mut best_gap = f64::INFINITY;
    let mut evaluations = 0;
    for i in 0..counts[0] {
        for j in 0..counts[1] {
            for k in 0..counts[2] {
                let v = [
                    axis(region.a.0, region.a.1, counts[0], i),
                    axis(region.x.0, region.x.1, counts[1], j),
                    axis(region.y.0, region.y.1, counts[2], k),
                ];
                let g = gap_at(v);
                evaluations += 1;
                if g < best_gap {
                    best_gap = g;
                    best = v;
                }
            }
        }
    }
    if !best_gap.is_finite() {
        return Err(TwoPieceError::InvalidRegion("no valid point in region".into()));
    }

    let mut steps = [0, 1, 2].map(|d| widths[d] / (counts[d].max(2) - 1) as f64);
    while evaluations < budget && steps.iter().zip(widths).any(|(s, w)| *s > 1e-12 * w.max(1.0)) {
        let mut improved = false;
        for d in 0..3 {
            if steps[d] == 0.0 {
                continue;
            }
            for dir in [-1.0, 1.0] {
                let mut v = best;
                v[d] += dir * steps[d];
                let v = region.clamp(v);
                let g = gap_at(v);
                evaluations += 1;
                if g < best_gap {
                    best_gap = g;
                    best = v;
                    improved = true;
                }
            }
        }
        if !improved {
            steps = steps.map(|s| s * 0.5);
        }
    }

    Ok(MinimizeResult {
        params: TwoPieceParams::new(best[0], best[1], best[2])?,
        gap: best_gap,
        evaluations,
    })
}

/// Outcome of [`sweep`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub region: Region,
    pub grid: [usize; 3],
    pub points: usize,
    pub min_gap: f64,
    pub argmin: TwoPieceParams,
    pub min_g: f64,
    pub argmin_g: TwoPieceParams,
    pub l_range: (f64, f64),
}

/// One grid point of the sweep, for CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSample {
    pub a: f64,
    pub x: f64,
    pub y: f64,
    pub gap: f64,
    pub g: f64,
    pub l: f64,
}

/// Evaluates the gap, `G` and `L` on every grid point (the degenerate
/// `x = y = 0` node is skipped).
pub fn sweep_samples(region: &Region, grid: [usize; 3]) -> Result<Vec<SweepSample>> {
    if grid.contains(&0) {
        return Err(TwoPieceError::InvalidRegion("grid counts must be positive".into()));
    }
    let per_a: Vec<Result<Vec<SweepSample>>> = (0..grid[0])
        .into_par_iter()
        .map(|i| {
            let a = axis(region.a.0, region.a.1, grid[0], i);
            let mut out = Vec::with_capacity(grid[1] * grid[2]);
            for j in 0..grid[1] {
                let x = axis(region.x.0, region.x.1, grid[1], j);
                for k in 0..grid[2] {
                    let y = axis(region.y.0, region.y.1, grid[2], k);
                    if x == 0.0 && y == 0.0 {
                        continue;
                    }
                    let p = TwoPieceParams::new(a, x, y)?;
                    let stats = closed_form_stats(&p);
                    let l = exponent_shift(&p)?;
                    out.push(SweepSample { a, x, y, gap: stats.gap(), g: g_from_stats(&stats, x, l), l });
                }
            }
            Ok(out)
        })
        .collect();
    let mut samples = Vec::with_capacity(grid.iter().product());
    for chunk in per_a {
        samples.extend(chunk?);
    }
    Ok(samples)
}

pub fn sweep(region: &Region, grid: [usize; 3]) -> Result<SweepReport> {
    let samples = sweep_samples(region, grid)?;
    let first = *samples
        .first()
        .ok_or_else(|| TwoPieceError::InvalidRegion("no valid grid point".into()))?;
    // Strict comparisons keep the first minimizer in grid order.
    let (mut best_gap, mut best_g) = (first, first);
    let mut l_range = (first.l, first.l);
    for s in &samples[1..] {
        if s.gap < best_gap.gap {
            best_gap = *s;
        }
        if s.g < best_g.g {
            best_g = *s;
        }
        l_range = (l_range.0.min(s.l), l_range.1.max(s.l));
    }
    Ok(SweepReport {
        region: *region,
        grid,
        points: samples.len(),
        min_gap: best_gap.gap,
        argmin: TwoPieceParams::new(best_gap.a, best_gap.x, best_gap.y)?,
        min_g: best_g.g,
        argmin_g: TwoPieceParams::new(best_g.a, best_g.x, best_g.y)?,
        l_range,
    })
}

/// Largest relative deviation of the quartic-minorant identity and the
/// smallest relative margin of `15e^{2x}G - Σ(a-1)^i P_i` over random points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    pub points: usize,
    pub seed: u64,
    pub max_rel_err: f64,
    pub min_rel_margin: f64,
}

/// Reads `LCENTROPY_SEED`, falling back to [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var("LCENTROPY_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Samples `(a, x, y)` uniformly in `[1, 5] × [0, 3] × [-3, 0]`.
pub fn identity_check(points: usize, seed: u64) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel_err: f64 = 0.0;
    let mut min_rel_margin = f64::INFINITY;
    for _ in 0..points {
        let p = TwoPieceParams::new(
            rng.random_range(1.0..=5.0),
            rng.random_range(0.0..=3.0),
            rng.random_range(-3.0..=0.0),
        )?;
        let (lhs, scale) = scaled_minorant_g(&p)?;
        let rhs = poly_lower_bound(&p);
        let scale = scale.max(1.0);
        max_rel_err = max_rel_err.max((lhs - rhs).abs() / scale);
        let full = 15.0 * (2.0 * p.x).exp() * g_value(&p)?;
        min_rel_margin = min_rel_margin.min((full - rhs) / scale);
    }
    Ok(IdentityReport { points, seed, max_rel_err, min_rel_margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn params(a: f64, x: f64, y: f64) -> TwoPieceParams {
        TwoPieceParams::new(a, x, y).unwrap()
    }

    #[test]
    fn kernels_match_closed_forms_away_from_zero() {
        for t in [-0.99f64, -0.5, 0.3, 0.999] {
            let direct1 = t.exp() * (1.0 - t) - 1.0;
            let direct2 = t.exp() * (t * t - 2.0 * t + 2.0) - 2.0;
            assert!((first_kernel(t) - direct1).abs() < 1e-15);
            assert!((second_kernel(t) - direct2).abs() < 1e-15);
        }
        // -t²/2 - t³/3 - t⁴/8 and t³/3 + t⁴/4 + t⁵/10
        let t = 1e-5f64;
        let series1 = -t * t / 2.0 - t.powi(3) / 3.0 - t.powi(4) / 8.0;
        let series2 = t.powi(3) / 3.0 + t.powi(4) / 4.0 + t.powi(5) / 10.0;
        assert!((first_kernel(t) - series1).abs() < 1e-14 * series1.abs());
        assert!((second_kernel(t) - series2).abs() < 1e-14 * series2);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(TwoPieceParams::new(0.5, 1.0, -1.0).is_err());
        assert!(TwoPieceParams::new(1.0, 0.0, 0.0).is_err());
        assert!(TwoPieceParams::new(1.0, 501.0, -1.0).is_err());
        assert!(TwoPieceParams::new(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn truncated_exponential_member() {
        let p = params(1.0, 0.0, -LN_2);
        let s = closed_form_stats(&p);
        assert!((s.mass - 0.5).abs() < 1e-15);
        let d = build_density(&p).unwrap();
        assert!((d.segments()[0].value_lo() - 2.0).abs() < 1e-14);
        assert!((s.entropy() - (1.0 - 2.0 * LN_2)).abs() < 1e-14);
        assert!((s.variance() - (1.0 - 2.0 * LN_2 * LN_2)).abs() < 1e-14);
        let e = eval_g(&p).unwrap();
        let expected = 0.25 * ((2.0 * (1.0 - 2.0 * LN_2) - 2.0).exp() - (1.0 - 2.0 * LN_2 * LN_2));
        assert!((e.g - expected).abs() < 1e-15);
    }

    #[test]
    fn exponential_limit() {
        let p = params(1.0, 0.0, -40.0);
        let s = closed_form_stats(&p);
        assert!((s.second_moment - 2.0).abs() < 1e-13);
        assert!(gap(&p).abs() < 1e-10);
        let e = eval_g(&p).unwrap();
        assert!(e.g.abs() <= 1e-10);
        assert!(poly_lower_bound(&p).abs() < 1e-9);
    }

    #[test]
    fn closed_forms_match_density_integrals() {
        for (a, x, y) in [(2.0, 1.0, -1.0), (1.0, 0.3, -2.5), (5.5, 4.0, -0.1), (1.0, 2.0, 0.0)] {
            let p = params(a, x, y);
            let s = closed_form_stats(&p);
            let d = build_density(&p).unwrap();
            assert!((d.shannon_entropy().unwrap() - s.entropy()).abs() < 1e-9 * s.entropy().abs().max(1.0));
            assert!((d.variance().unwrap() - s.variance()).abs() < 1e-9 * s.variance());
            assert!((d.moment(1).unwrap() - s.first_moment / s.mass).abs() < 1e-9);
            assert!(d.log_concavity().holds());
        }
    }

    #[test]
    fn g_matches_consistency_value() {
        let e = eval_g(&params(2.0, 1.0, -1.0)).unwrap();
        assert!(e.g > 0.0);
        assert!((e.g - e.consistency).abs() <= 1e-9 * e.g.abs().max(1.0));
    }

    #[test]
    fn exponent_shift_limits() {
        let p = params(1.0, 0.7, -1.1);
        let theta: f64 = 1.8;
        let l = exponent_shift(&p).unwrap();
        assert!((l - 2.0 * theta / theta.exp_m1()).abs() < 1e-14);
        let near = exponent_shift(&params(1.0, 1e-9, -1e-9)).unwrap();
        assert!((near - 2.0).abs() < 1e-8);
        let wide = exponent_shift(&params(1e6, 1.5, -0.4)).unwrap();
        assert!((wide - 3.0 / 1.5f64.exp_m1()).abs() < 1e-5);
    }

    #[test]
    fn quartic_minorant_values() {
        assert_eq!(quartic_minorant(0.0).unwrap(), 1.0);
        assert!((quartic_minorant(2.0).unwrap() - 2.0 / 15.0).abs() < 1e-15);
        assert!(quartic_minorant(2.1).is_err());
        assert!(quartic_minorant(-0.1).is_err());
    }

    #[test]
    fn p_values_at_origin() {
        assert_eq!(eval_p(4, 0.0, 0.0), 0.0);
        assert!(eval_p(0, 0.0, 0.0).abs() < 1e-12);
        assert!(eval_p(4, 1.0, 0.0) > 0.0);
    }

    #[test]
    fn poly_lower_bound_at_a_one_is_p0() {
        let p = params(1.0, 0.0, -1.0);
        assert_eq!(poly_lower_bound(&p), eval_p(0, 0.0, -1.0));
        assert!(poly_lower_bound(&p) >= 0.0);
    }

    #[test]
    fn minimizer_examples() {
        let point = Region::new((1.0, 1.0), (0.0, 0.0), (-40.0, -40.0)).unwrap();
        assert!(minimize_gap(&point, 10).unwrap().gap <= 1e-10);
        let line = Region::new((1.0, 1.0), (0.0, 0.0), (-2.0, -1.0)).unwrap();
        let r = minimize_gap(&line, 200).unwrap();
        assert_eq!(r.params.y(), -2.0);
        assert!(minimize_gap(&line, 0).is_err());
    }

    #[test]
    fn small_sweep() {
        let r = sweep(&Region::standard(), [6, 6, 6]).unwrap();
        // x = y = 0 is excluded for every a
        assert_eq!(r.points, 6 * 6 * 6 - 6);
        assert!(r.min_gap >= -1e-9);
        assert!(r.min_g >= -1e-9);
        assert!(r.l_range.0 >= 0.0 && r.l_range.1 <= 2.0);
        assert_eq!(
            (r.argmin.a(), r.argmin.x(), r.argmin.y()),
            Region::standard().exponential_corner()
        );
    }

    #[test]
    fn identity_is_tight() {
        let r = identity_check(200, 7).unwrap();
        assert!(r.max_rel_err < 1e-10, "{r:?}");
        assert!(r.min_rel_margin >= -1e-12);
    }
}
