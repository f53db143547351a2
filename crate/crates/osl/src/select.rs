//! Cut-radius selection rules.
//!
//! `sl_select` is the classical single-linkage rule: the largest radius whose
//! cut still has at least `m` clusters. `osl_select` is the outlier-robust
//! rule: the largest radius maximizing the size of the `m`-th largest
//! cluster; everything outside the `m` retained clusters is pooled as
//! outliers (label 0).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linkage::{clusters_at_radius, order_clusters, Dendrogram, UnionFind};

/// Final clustering: per-point labels in `{0, 1, …, m}` where 0 is the
/// outlier pool and label `k ≥ 1` is the `k`-th largest cluster at
/// `chosen_radius` (tie-break by smallest contained index).
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub m: usize,
    pub labels: Vec<usize>,
    pub chosen_radius: f64,
}

/// One per-level record of the selection scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRecord {
    pub radius: f64,
    /// Number of clusters in the cut at this level.
    pub cluster_count: usize,
    /// Size of the `m`-th largest cluster, 0 when fewer than `m` clusters.
    pub mth_size: usize,
}

/// Audit trail of an OSL selection: every candidate level with its `m`-th
/// cluster size, the set of maximizing radii, and the chosen (largest) one.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub m: usize,
    pub records: Vec<LevelRecord>,
    pub argmax: Vec<f64>,
    pub chosen_radius: f64,
}

fn validate_m(m: usize, n: usize) -> Result<()> {
    if m < 1 || m > n {
        return Err(Error::invalid(format!(
            "target cluster count m = {m} must satisfy 1 ≤ m ≤ n = {n}"
        )));
    }
    Ok(())
}

/// Multiset of component sizes supporting "size of the m-th largest" queries.
struct SizeMultiset {
    counts: BTreeMap<usize, usize>,
    total: usize,
}

impl SizeMultiset {
    fn singletons(n: usize) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(1, n);
        SizeMultiset { counts, total: n }
    }

    fn remove(&mut self, s: usize) {
        let c = self.counts.get_mut(&s).expect("size present");
        *c -= 1;
        if *c == 0 {
            self.counts.remove(&s);
        }
        self.total -= 1;
    }

    fn insert(&mut self, s: usize) {
        *self.counts.entry(s).or_insert(0) += 1;
        self.total += 1;
    }

    /// Size of the m-th largest element, or 0 when fewer than m elements.
    fn mth_largest(&self, m: usize) -> usize {
        if m > self.total {
            return 0;
        }
        let mut remaining = m;
        for (&size, &count) in self.counts.iter().rev() {
            if remaining <= count {
                return size;
            }
            remaining -= count;
        }
        unreachable!("m ≤ total");
    }
}

/// Scan every dendrogram level and pick the largest radius maximizing the
/// size of the `m`-th largest cluster.
pub fn osl_select(d: &Dendrogram, m: usize) -> Result<SelectionTrace> {
    validate_m(m, d.n())?;

    let mut uf = UnionFind::new(d.n());
    let mut sizes = SizeMultiset::singletons(d.n());
    let mut records = Vec::with_capacity(d.levels().len());

    let mut done = 0usize;
    for (k, &radius) in d.levels().iter().enumerate() {
        let end = d.merges_up_to_level(k).len();
        for merge in &d.merges()[done..end] {
            let sa = uf.size_of(merge.a);
            let sb = uf.size_of(merge.b);
            if uf.union(merge.a, merge.b).is_some() {
                sizes.remove(sa);
                sizes.remove(sb);
                sizes.insert(sa + sb);
            }
        }
        done = end;
        records.push(LevelRecord {
            radius,
            cluster_count: sizes.total,
            mth_size: sizes.mth_largest(m),
        });
    }

    let best = records.iter().map(|r| r.mth_size).max().unwrap_or(0);
    let argmax: Vec<f64> = records
        .iter()
        .filter(|r| r.mth_size == best)
        .map(|r| r.radius)
        .collect();
    let chosen_radius = *argmax.last().expect("at least one level");

    Ok(SelectionTrace {
        m,
        records,
        argmax,
        chosen_radius,
    })
}

/// Classical single-linkage rule: the largest level whose cluster count is
/// still at least `m`.
pub fn sl_select(d: &Dendrogram, m: usize) -> Result<f64> {
    validate_m(m, d.n())?;
    let mut best = None;
    for k in 0..d.levels().len() {
        if d.clusters_at_level(k) >= m {
            best = Some(d.levels()[k]);
        }
    }
    best.ok_or_else(|| {
        Error::NoValidRadius(format!(
            "fewer than {m} distinct points: no cut has {m} clusters"
        ))
    })
}

/// Label the `m` largest ordered clusters of the cut at `r` with 1..m and
/// pool every remaining point under label 0. If the cut has fewer than `m`
/// clusters the surplus labels stay unused.
pub fn assign(d: &Dendrogram, r: f64, m: usize) -> Result<Clustering> {
    validate_m(m, d.n())?;
    let partition = clusters_at_radius(d, r)?;
    let ordered = order_clusters(&partition);
    let mut labels = vec![0usize; d.n()];
    for (label, cluster) in ordered.iter().take(m).enumerate() {
        for &idx in cluster {
            labels[idx - 1] = label + 1;
        }
    }
    Ok(Clustering {
        m,
        labels,
        chosen_radius: r,
    })
}

/// Run the full OSL pipeline: select the radius, then assign labels.
pub fn osl_cluster(d: &Dendrogram, m: usize) -> Result<Clustering> {
    let trace = osl_select(d, m)?;
    assign(d, trace.chosen_radius, m)
}

/// Run the classical SL pipeline with the top-`m` labeling convention.
pub fn sl_cluster(d: &Dendrogram, m: usize) -> Result<Clustering> {
    let r = sl_select(d, m)?;
    assign(d, r, m)
}
