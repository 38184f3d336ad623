#![allow(dead_code)]

use lcentropy::{ExpAffineSegment, Interval, PiecewiseExpAffineDensity, StepDensity, StepPiece};
use rand::Rng;

/// Normalized `e^{-V}` with `V` continuous and convex: segments of the given
/// lengths starting at `start`, slopes sorted ascending.
pub fn log_concave(start: f64, lengths: &[f64], slopes: &[f64]) -> PiecewiseExpAffineDensity {
    let mut slopes = slopes.to_vec();
    slopes.sort_by(f64::total_cmp);
    let mut segments = Vec::with_capacity(lengths.len());
    let (mut lo, mut offset) = (start, 0.0);
    for (i, (len, slope)) in lengths.iter().zip(&slopes).enumerate() {
        if i > 0 {
            offset += (slopes[i - 1] - slope) * lo;
        }
        segments.push(ExpAffineSegment::new(lo, lo + len, *slope, offset).unwrap());
        lo += len;
    }
    PiecewiseExpAffineDensity::new(segments).unwrap().normalize().unwrap()
}

/// Strictly nested intervals: each one keeps the fractions `cuts[k]` of its
/// parent's length on either side; weights are normalized.
pub fn nested_step(lo: f64, len: f64, cuts: &[(f64, f64)], weights: &[f64]) -> StepDensity {
    let total: f64 = weights.iter().sum();
    let mut interval = (lo, lo + len);
    let mut pieces = vec![StepPiece {
        interval: Interval::new(interval.0, interval.1).unwrap(),
        weight: weights[0] / total,
    }];
    for ((left, right), w) in cuts.iter().zip(&weights[1..]) {
        let width = interval.1 - interval.0;
        interval = (interval.0 + left * width, interval.1 - right * width);
        pieces.push(StepPiece {
            interval: Interval::new(interval.0, interval.1).unwrap(),
            weight: w / total,
        });
    }
    StepDensity::new(pieces).unwrap()
}

pub fn random_log_concave(rng: &mut impl Rng) -> PiecewiseExpAffineDensity {
    let k = rng.random_range(1..=4);
    let lengths: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..3.0)).collect();
    let slopes: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
    log_concave(rng.random_range(-2.0..2.0), &lengths, &slopes)
}

pub fn random_step(rng: &mut impl Rng) -> StepDensity {
    let k = rng.random_range(1..=5);
    let cuts: Vec<(f64, f64)> = (1..k)
        .map(|_| (rng.random_range(0.02..0.45), rng.random_range(0.02..0.45)))
        .collect();
    let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    nested_step(rng.random_range(0.0..2.0), rng.random_range(0.5..4.0), &cuts, &weights)
}
