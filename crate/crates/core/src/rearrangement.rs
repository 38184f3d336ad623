//! Decreasing rearrangement `f ↦ f↓` onto `(0, |supp f|)`.
//!
//! For a unimodal piecewise exp-affine density the level-set length
//! `L(λ) = |{f > λ}|` is, between consecutive knot values, of the form
//! `A + B·(-ln λ)`, where `B` sums `1/|slope|` over the segments that the
//! level crosses. Inverting each branch gives the rearranged density as a new
//! piecewise exp-affine density, without discretization.

use thiserror::Error;

use crate::density::{
    Density, DensityError, ExpAffineSegment, Interval, PiecewiseExpAffineDensity, StepDensity,
    StepPiece,
};

/// Potentials closer than this (relative) are the same level.
const LEVEL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RearrangementError {
    #[error("density is not unimodal")]
    NotUnimodal,
    #[error("grid densities cannot be rearranged")]
    GridUnsupported,
    #[error("level must be positive, got {0}")]
    InvalidLevel(f64),
    #[error(transparent)]
    Density(#[from] DensityError),
}

pub type Result<T> = std::result::Result<T, RearrangementError>;

pub trait Rearrange: Sized {
    /// Lebesgue measure of `{f > level}`.
    fn superlevel_measure(&self, level: f64) -> Result<f64>;

    /// The non-increasing density on `(0, |supp f|)` equimeasurable with `f`.
    fn decreasing_rearrangement(&self) -> Result<Self>;
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0) {
        return Err(RearrangementError::InvalidLevel(level));
    }
    Ok(())
}

impl Rearrange for PiecewiseExpAffineDensity {
    fn superlevel_measure(&self, level: f64) -> Result<f64> {
        check_level(level)?;
        let threshold = -level.ln();
        Ok(self
            .segments()
            .iter()
            .map(|s| segment_superlevel(s, threshold))
            .sum())
    }

    fn decreasing_rearrangement(&self) -> Result<Self> {
        if !self.is_unimodal() {
            return Err(RearrangementError::NotUnimodal);
        }
        rearrange_exp_affine(self)
    }
}

/// Measure of `{t in segment : V(t) < threshold}`.
fn segment_superlevel(s: &ExpAffineSegment, threshold: f64) -> f64 {
    let iv = s.interval();
    let slope = s.slope();
    if slope == 0.0 {
        return if s.offset() < threshold { iv.len() } else { 0.0 };
    }
    let crossing = (threshold - s.offset()) / slope;
    if slope > 0.0 {
        (crossing.min(iv.hi()) - iv.lo()).max(0.0)
    } else {
        (iv.hi() - crossing.max(iv.lo())).max(0.0)
    }
}

fn same_level(a: f64, b: f64) -> bool {
    (a - b).abs() <= LEVEL_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn nearest_level(levels: &[f64], u: f64) -> usize {
    let i = levels.partition_point(|&l| l < u);
    match (i.checked_sub(1), levels.get(i)) {
        (Some(j), Some(&above)) if (u - levels[j]) <= (above - u) => j,
        (Some(j), None) => j,
        _ => i,
    }
}

fn rearrange_exp_affine(d: &PiecewiseExpAffineDensity) -> Result<PiecewiseExpAffineDensity> {
    // Each segment spans the potential range [low, high]; low is its peak.
    let ranges: Vec<(f64, f64, &ExpAffineSegment)> = d
        .segments()
        .iter()
        .map(|s| {
            let (a, b) = (s.potential(s.interval().lo()), s.potential(s.interval().hi()));
            (a.min(b), a.max(b), s)
        })
        .collect();

    let mut levels: Vec<f64> = ranges.iter().flat_map(|(lo, hi, _)| [*lo, *hi]).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|b, a| same_level(*a, *b));

    let count = levels.len();
    let mut plateau = vec![0.0; count];
    let mut inverse_rate = vec![0.0; count.saturating_sub(1)];
    for (low, high, seg) in &ranges {
        let (i, j) = (nearest_level(&levels, *low), nearest_level(&levels, *high));
        if i == j {
            plateau[i] += seg.interval().len();
        } else {
            for b in &mut inverse_rate[i..j] {
                *b += 1.0 / seg.slope().abs();
            }
        }
    }

    let mut out: Vec<ExpAffineSegment> = Vec::new();
    let mut s = 0.0;
    let mut push = |s0: f64, len: f64, slope: f64, offset: f64| -> Result<()> {
        if len > 0.0 {
            out.push(ExpAffineSegment::new(s0, s0 + len, slope, offset)?);
        }
        Ok(())
    };
    for k in 0..count {
        if plateau[k] > 0.0 {
            push(s, plateau[k], 0.0, levels[k])?;
            s += plateau[k];
        }
        if k + 1 < count && inverse_rate[k] > 0.0 {
            let b = inverse_rate[k];
            let len = b * (levels[k + 1] - levels[k]);
            push(s, len, 1.0 / b, levels[k] - s / b)?;
            s += len;
        }
    }
    PiecewiseExpAffineDensity::new(merge_collinear(out)?).map_err(Into::into)
}

/// Joins neighbours that share a slope and meet continuously.
fn merge_collinear(segments: Vec<ExpAffineSegment>) -> Result<Vec<ExpAffineSegment>> {
    let mut merged: Vec<ExpAffineSegment> = Vec::with_capacity(segments.len());
    for seg in segments {
        if let Some(last) = merged.last_mut() {
            let knot = last.interval().hi();
            let same_slope = (last.slope() - seg.slope()).abs()
                <= LEVEL_TOLERANCE * last.slope().abs().max(1.0);
            if same_slope && same_level(last.potential(knot), seg.potential(knot)) {
                *last = ExpAffineSegment::new(
                    last.interval().lo(),
                    seg.interval().hi(),
                    last.slope(),
                    last.offset(),
                )?;
                continue;
            }
        }
        merged.push(seg);
    }
    Ok(merged)
}

impl Rearrange for StepDensity {
    fn superlevel_measure(&self, level: f64) -> Result<f64> {
        check_level(level)?;
        Ok(self
            .levels()
            .iter()
            .filter(|(_, v)| *v > level)
            .map(|(cell, _)| cell.len())
            .sum())
    }

    fn decreasing_rearrangement(&self) -> Result<Self> {
        let pieces = self
            .pieces()
            .iter()
            .map(|p| {
                Ok(StepPiece {
                    interval: Interval::new(0.0, p.interval.len())?,
                    weight: p.weight,
                })
            })
            .collect::<std::result::Result<Vec<_>, DensityError>>()?;
        Ok(StepDensity::new(pieces)?)
    }
}

impl Rearrange for Density {
    fn superlevel_measure(&self, level: f64) -> Result<f64> {
        match self {
            Density::ExpAffine(d) => d.superlevel_measure(level),
            Density::Step(d) => d.superlevel_measure(level),
            Density::Grid(_) => Err(RearrangementError::GridUnsupported),
        }
    }

    fn decreasing_rearrangement(&self) -> Result<Self> {
        match self {
            Density::ExpAffine(d) => Ok(Density::ExpAffine(d.decreasing_rearrangement()?)),
            Density::Step(d) => Ok(Density::Step(d.decreasing_rearrangement()?)),
            Density::Grid(_) => Err(RearrangementError::GridUnsupported),
        }
    }
}
