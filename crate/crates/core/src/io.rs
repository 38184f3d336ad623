//! JSON density specs.
//!
//! ```json
//! {"type":"piecewise_exp_affine","segments":[{"lo":0,"hi":40,"p":1,"q":0}]}
//! {"type":"step","pieces":[{"lo":0,"hi":1,"weight":1}]}
//! {"type":"grid","origin":0,"step":0.01,"values":[0, 1, 0]}
//! ```
//!
//! A segment carries `e^{-(p t + q)}` on `[lo, hi]`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::{
    Density, DensityError, ExpAffineSegment, GridDensity, Interval, PiecewiseExpAffineDensity,
    StepDensity, StepPiece,
};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("schema violation: {0}")]
    Schema(#[from] serde_json::Error),
    #[error(transparent)]
    Density(#[from] DensityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub lo: f64,
    pub hi: f64,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    PiecewiseExpAffine { segments: Vec<SegmentSpec> },
    Step { pieces: Vec<PieceSpec> },
    Grid { origin: f64, step: f64, values: Vec<f64> },
}

impl DensitySpec {
    pub fn build(&self) -> Result<Density, DensityError> {
        Ok(match self {
            DensitySpec::PiecewiseExpAffine { segments } => {
                let segments = segments
                    .iter()
                    .map(|s| ExpAffineSegment::new(s.lo, s.hi, s.p, s.q))
                    .collect::<Result<Vec<_>, _>>()?;
                PiecewiseExpAffineDensity::new(segments)?.into()
            }
            DensitySpec::Step { pieces } => {
                let pieces = pieces
                    .iter()
                    .map(|p| Ok(StepPiece { interval: Interval::new(p.lo, p.hi)?, weight: p.weight }))
                    .collect::<Result<Vec<_>, DensityError>>()?;
                StepDensity::new(pieces)?.into()
            }
            DensitySpec::Grid { origin, step, values } => {
                GridDensity::new(*origin, *step, values.clone())?.into()
            }
        })
    }
}

impl From<&Density> for DensitySpec {
    fn from(d: &Density) -> Self {
        match d {
            Density::ExpAffine(e) => DensitySpec::PiecewiseExpAffine {
                segments: e
                    .segments()
                    .iter()
                    .map(|s| SegmentSpec {
                        lo: s.interval().lo(),
                        hi: s.interval().hi(),
                        p: s.slope(),
                        q: s.offset(),
                    })
                    .collect(),
            },
            Density::Step(s) => DensitySpec::Step {
                pieces: s
                    .pieces()
                    .iter()
                    .map(|p| PieceSpec { lo: p.interval.lo(), hi: p.interval.hi(), weight: p.weight })
                    .collect(),
            },
            Density::Grid(g) => DensitySpec::Grid {
                origin: g.origin(),
                step: g.step(),
                values: g.values().to_vec(),
            },
        }
    }
}

/// Parses and validates a spec, optionally rescaling it to unit mass.
pub fn parse_density_spec(json: &str, normalize: bool) -> Result<Density, SpecError> {
    let spec: DensitySpec = serde_json::from_str(json)?;
    let density = spec.build()?;
    Ok(if normalize { density.normalize()? } else { density })
}

/// Accepts a path, or inline JSON when the argument starts with `{`.
pub fn load_density_spec(arg: &str, normalize: bool) -> Result<Density, SpecError> {
    if arg.trim_start().starts_with('{') {
        return parse_density_spec(arg, normalize);
    }
    let text = std::fs::read_to_string(Path::new(arg))
        .map_err(|source| SpecError::Io { path: arg.to_string(), source })?;
    parse_density_spec(&text, normalize)
}

pub fn emit_density_spec(d: &Density) -> String {
    serde_json::to_string(&DensitySpec::from(d)).expect("density specs always serialize")
}
