//! Scoring clusterings against ground truth and Monte Carlo campaigns.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::datagen::{sample_with_stream, stream_rng, LabeledSample, MixtureModel};
use crate::error::{Error, Result};
use crate::linkage::build_dendrogram;
use crate::select::{osl_cluster, sl_cluster, Clustering};

/// Which radius-selection rule a campaign runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Osl,
    Sl,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Osl => "osl",
            Algorithm::Sl => "sl",
        }
    }

    pub fn cluster(self, sample: &LabeledSample, m: usize) -> Result<Clustering> {
        let d = build_dendrogram(&sample.points);
        match self {
            Algorithm::Osl => osl_cluster(&d, m),
            Algorithm::Sl => sl_cluster(&d, m),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "osl" => Ok(Algorithm::Osl),
            "sl" => Ok(Algorithm::Sl),
            other => Err(Error::invalid(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Monte Carlo estimate of the clustering risk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub replications: u64,
    pub failures: u64,
}

impl RiskEstimate {
    pub fn risk(&self) -> f64 {
        self.failures as f64 / self.replications as f64
    }

    pub fn std_error(&self) -> f64 {
        let p = self.risk();
        (p * (1.0 - p) / self.replications as f64).sqrt()
    }
}

/// True iff the predicted clustering exactly recovers every true group:
/// there is an injective map from true groups to predicted clusters `1..M`
/// such that each group's points all carry the mapped label. Outlier points
/// (truth 0) are ignored; a true group with no sampled points is vacuously
/// recovered.
pub fn exact_recovery(truth: &[usize], clustering: &Clustering) -> Result<bool> {
    if truth.len() != clustering.labels.len() {
        return Err(Error::invalid(format!(
            "truth has {} labels, clustering has {}",
            truth.len(),
            clustering.labels.len()
        )));
    }
    let m_true = truth.iter().copied().max().unwrap_or(0);
    // predicted label shared by each true group; 0 while unseen
    let mut mapped = vec![0usize; m_true + 1];
    let mut seen = vec![false; m_true + 1];
    for (&t, &p) in truth.iter().zip(&clustering.labels) {
        if t == 0 {
            continue;
        }
        if p == 0 {
            return Ok(false); // a group point fell into the outlier pool
        }
        if !seen[t] {
            seen[t] = true;
            mapped[t] = p;
        } else if mapped[t] != p {
            return Ok(false); // group split across predicted clusters
        }
    }
    // injectivity over the groups that actually appeared
    let mut used = vec![false; clustering.m + 1];
    for g in 1..=m_true {
        if seen[g] {
            let p = mapped[g];
            if p >= used.len() || used[p] {
                return Ok(false);
            }
            used[p] = true;
        }
    }
    Ok(true)
}

/// Estimate the clustering risk of `algorithm` over `b` replications.
pub fn estimate_risk(
    model: &MixtureModel,
    algorithm: Algorithm,
    m: usize,
    n: usize,
    b: u64,
    seed: u64,
) -> Result<RiskEstimate> {
    estimate_risk_with(model, m, n, b, seed, |s, m| algorithm.cluster(s, m))
}

/// Monte Carlo risk harness with a pluggable clustering procedure. Each
/// replication samples on its own RNG stream, so the failure count is
/// independent of the parallel execution order.
pub fn estimate_risk_with<F>(
    model: &MixtureModel,
    m: usize,
    n: usize,
    b: u64,
    seed: u64,
    cluster: F,
) -> Result<RiskEstimate>
where
    F: Fn(&LabeledSample, usize) -> Result<Clustering> + Sync,
{
    if b < 1 {
        return Err(Error::invalid("replication count must be at least 1"));
    }
    let failures = (1..=b)
        .into_par_iter()
        .map(|rep| -> Result<u64> {
            let run = || -> Result<bool> {
                let s = sample_with_stream(model, n, seed, rep)?;
                let c = cluster(&s, m)?;
                exact_recovery(&s.truth, &c)
            };
            match run() {
                Ok(recovered) => Ok(u64::from(!recovered)),
                Err(e) => Err(Error::Replication {
                    index: rep,
                    source: Box::new(e),
                }),
            }
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(RiskEstimate {
        replications: b,
        failures,
    })
}

/// Hubert–Arabie adjusted Rand index between two labelings. Labels are
/// arbitrary integers; the outlier pool 0 is treated as an ordinary class on
/// both sides. Returns 1 when both partitions are trivial and identical.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid("label vectors must have equal length"));
    }
    if a.is_empty() {
        return Err(Error::invalid("label vectors must be nonempty"));
    }
    let n = a.len();
    if n < 2 {
        return Ok(1.0); // single-point partitions are trivially identical
    }
    let max_a = *a.iter().max().unwrap();
    let max_b = *b.iter().max().unwrap();
    let mut table = vec![vec![0u64; max_b + 1]; max_a + 1];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let choose2 = |k: u64| (k * k.saturating_sub(1) / 2) as f64;
    let index: f64 = table.iter().flatten().map(|&c| choose2(c)).sum();
    let sum_a: f64 = table
        .iter()
        .map(|row| choose2(row.iter().sum::<u64>()))
        .sum();
    let sum_b: f64 = (0..=max_b)
        .map(|j| choose2(table.iter().map(|row| row[j]).sum::<u64>()))
        .sum();
    let expected = sum_a * sum_b / choose2(n as u64);
    let max_index = 0.5 * (sum_a + sum_b);
    if (max_index - expected).abs() < f64::EPSILON {
        // both partitions trivial; 1 iff they induce the same partition
        return Ok(if (index - expected).abs() < f64::EPSILON {
            1.0
        } else {
            0.0
        });
    }
    Ok((index - expected) / (max_index - expected))
}

/// Summary of a subsampling ARI benchmark.
#[derive(Debug, Clone)]
pub struct AriStats {
    /// ARI per successful replication, indexed by replication order.
    pub values: Vec<f64>,
    /// Wall-clock seconds of the clustering call per successful replication.
    pub times: Vec<f64>,
    /// Replications skipped because the subsample was smaller than `m`.
    pub skipped: u64,
}

impl AriStats {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn std_error(&self) -> f64 {
        let m = self.mean();
        let var = self
            .values
            .iter()
            .map(|v| (v - m) * (v - m))
            .sum::<f64>()
            / self.values.len() as f64;
        var.sqrt()
    }

    pub fn mean_time(&self) -> f64 {
        self.times.iter().sum::<f64>() / self.times.len().max(1) as f64
    }
}

/// Benchmark an algorithm on a fixed labeled dataset: `b` replications, each
/// clustering a without-replacement subsample of `⌊fraction·n⌋` points and
/// scoring ARI against the subsampled truth. Timing covers the clustering
/// call only.
pub fn subsample_bench(
    dataset: &LabeledSample,
    algorithm: Algorithm,
    m: usize,
    b: u64,
    fraction: f64,
    seed: u64,
) -> Result<AriStats> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid("fraction must lie in (0, 1]"));
    }
    if b < 1 {
        return Err(Error::invalid("replication count must be at least 1"));
    }
    let n = dataset.points.len();
    let k = ((fraction * n as f64).floor() as usize).min(n);

    let per_rep: Vec<Option<(f64, f64)>> = (1..=b)
        .into_par_iter()
        .map(|rep| -> Result<Option<(f64, f64)>> {
            let run = || -> Result<Option<(f64, f64)>> {
                let mut rng = stream_rng(seed, rep);
                let indices = sample_without_replacement(n, k, &mut rng);
                let sub = dataset.subset(&indices)?;
                if sub.points.len() < m {
                    return Ok(None);
                }
                let start = Instant::now();
                let c = algorithm.cluster(&sub, m)?;
                let secs = start.elapsed().as_secs_f64();
                let ari = adjusted_rand_index(&sub.truth, &c.labels)?;
                Ok(Some((ari, secs)))
            };
            run().map_err(|e| Error::Replication {
                index: rep,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut values = Vec::new();
    let mut times = Vec::new();
    let mut skipped = 0;
    for r in per_rep {
        match r {
            Some((ari, secs)) => {
                values.push(ari);
                times.push(secs);
            }
            None => skipped += 1,
        }
    }
    if values.is_empty() {
        return Err(Error::invalid(
            "every replication was skipped: subsample smaller than m",
        ));
    }
    Ok(AriStats {
        values,
        times,
        skipped,
    })
}

/// First `k` entries of a seeded Fisher–Yates shuffle of `0..n`, sorted to
/// preserve the dataset's point order inside each subsample.
fn sample_without_replacement<R: rand::Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    let mut chosen = pool[..k].to_vec();
    chosen.sort_unstable();
    chosen
}
