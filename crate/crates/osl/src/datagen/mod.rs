//! Labeled dataset generation from contaminated mixture models.
//!
//! A `MixtureModel` draws each point independently: with probability `ε`
//! from the outlier law (rejection-sampled off the group supports), and with
//! probability `(1−ε)γᵢ` uniformly on support `i`. Sampling is a pure
//! function of `(model, n, seed, stream)`; replications use disjoint RNG
//! streams so results do not depend on thread scheduling.
//!
//! The generator family is fixed: ChaCha8 seeded with `seed_from_u64(seed)`
//! and `set_stream(replication_index)`. Outputs are bit-stable across
//! releases.

mod models;
mod support;

pub use models::{
    circles_model, example2_model, gaussian_noise_sine_model, sine_highdim_model, sine_model,
    squares_model, DeltaCase,
};
pub use support::{ArcLengthTable, OutlierSpec, SupportGeom, SupportSpec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkage::PointSet;

/// Iteration cap for rejection sampling one outlier; exceeding it signals
/// supports nearly filling the ambient region.
pub const REJECTION_CAP: usize = 1_000_000;

/// The RNG stream used for replication `index` of a campaign seeded with
/// `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Contaminated mixture model: `P = ε·P₀ + (1−ε)·Σ γᵢ Pᵢ` with disjoint
/// group supports and a diffuse outlier law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    pub epsilon: f64,
    pub weights: Vec<f64>,
    pub supports: Vec<SupportSpec>,
    pub outliers: OutlierSpec,
    pub ambient_dim: usize,
}

impl MixtureModel {
    pub fn new(
        epsilon: f64,
        weights: Vec<f64>,
        supports: Vec<SupportSpec>,
        outliers: OutlierSpec,
        ambient_dim: usize,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::invalid("epsilon must lie in [0, 1)"));
        }
        if weights.is_empty() || weights.len() != supports.len() {
            return Err(Error::invalid(
                "weights and supports must be nonempty and of equal length",
            ));
        }
        if weights.iter().any(|w| *w <= 0.0) {
            return Err(Error::invalid("weights must be strictly positive"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("weights must sum to 1, got {sum}")));
        }
        for s in &supports {
            if s.dim() != ambient_dim {
                return Err(Error::invalid(format!(
                    "support dimension {} does not match ambient dimension {ambient_dim}",
                    s.dim()
                )));
            }
        }
        if outliers.dim() != ambient_dim {
            return Err(Error::invalid(
                "outlier spec dimension does not match ambient dimension",
            ));
        }
        let model = MixtureModel {
            epsilon,
            weights,
            supports,
            outliers,
            ambient_dim,
        };
        if model.supports.len() > 1 && model.min_gap() <= 0.0 {
            return Err(Error::invalid("group supports must be separated (δ > 0)"));
        }
        Ok(model)
    }

    /// Number of groups M.
    pub fn m(&self) -> usize {
        self.weights.len()
    }

    /// Return a copy with a different outlier proportion.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        MixtureModel::new(
            epsilon,
            self.weights.clone(),
            self.supports.clone(),
            self.outliers.clone(),
            self.ambient_dim,
        )
    }

    /// Minimum pairwise separation δ between group supports.
    pub fn min_gap(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.supports.len() {
            for j in i + 1..self.supports.len() {
                best = best.min(self.supports[i].distance_to(&self.supports[j]));
            }
        }
        best
    }

    /// True iff `x` lies in some group support.
    fn in_any_support(&self, x: &[f64]) -> Result<bool> {
        for s in &self.supports {
            if s.contains(x)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// A sampled dataset with its ground-truth group labels (0 = outlier).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub points: PointSet,
    pub truth: Vec<usize>,
}

impl LabeledSample {
    /// Restrict to the given 0-based indices (used by subsampling benches).
    pub fn subset(&self, indices: &[usize]) -> Result<LabeledSample> {
        Ok(LabeledSample {
            points: self.points.subset(indices)?,
            truth: indices.iter().map(|&i| self.truth[i]).collect(),
        })
    }
}

/// Draw `n` labeled points from the model, deterministically in
/// `(model, n, seed)`.
pub fn sample(model: &MixtureModel, n: usize, seed: u64) -> Result<LabeledSample> {
    sample_with_stream(model, n, seed, 0)
}

/// Like [`sample`] but on the RNG stream `stream(seed, index)`; parallel
/// replications each get their own stream.
pub fn sample_with_stream(
    model: &MixtureModel,
    n: usize,
    seed: u64,
    index: u64,
) -> Result<LabeledSample> {
    if n == 0 {
        return Err(Error::invalid("sample size must be positive"));
    }
    let mut rng = stream_rng(seed, index);

    // Arc-length tables for bare sine-curve supports, built once per call.
    let tables: Vec<Option<ArcLengthTable>> = model
        .supports
        .iter()
        .map(|s| match &s.geom {
            SupportGeom::SineCurve {
                x_lo,
                x_hi,
                amplitude,
                thickness,
            } if *thickness == 0.0 => Some(ArcLengthTable::new(*x_lo, *x_hi, *amplitude)),
            _ => None,
        })
        .collect();

    let mut points = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen();
        let component = if u < model.epsilon {
            0
        } else {
            // map the remaining mass onto the cumulative group weights
            let v = (u - model.epsilon) / (1.0 - model.epsilon);
            let mut acc = 0.0;
            let mut chosen = model.m();
            for (i, w) in model.weights.iter().enumerate() {
                acc += w;
                if v < acc {
                    chosen = i + 1;
                    break;
                }
            }
            chosen.min(model.m())
        };

        let point = if component == 0 {
            let mut accepted = None;
            for _ in 0..REJECTION_CAP {
                let cand = model.outliers.sample_base(&mut rng);
                if !model.in_any_support(&cand)? {
                    accepted = Some(cand);
                    break;
                }
            }
            accepted.ok_or_else(|| {
                Error::DegenerateModel(format!(
                    "outlier rejection sampling exceeded {REJECTION_CAP} iterations; \
                     supports nearly fill the ambient region"
                ))
            })?
        } else {
            let s = &model.supports[component - 1];
            s.sample(&mut rng, tables[component - 1].as_ref())
        };
        points.push(point);
        truth.push(component);
    }

    Ok(LabeledSample {
        points: PointSet::new(model.ambient_dim, points)?,
        truth,
    })
}
