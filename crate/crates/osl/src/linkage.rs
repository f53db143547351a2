//! Single-linkage dendrograms over Euclidean point sets.
//!
//! The dendrogram is built from the minimum spanning tree of the complete
//! pairwise-distance graph. Cutting it at a radius `r` yields exactly the
//! connected components of the graph with an edge wherever `‖x − y‖ ≤ r`.

use crate::error::{Error, Result};

/// A finite set of points in `D`-dimensional Euclidean space.
///
/// Input order is preserved; the 1-based position of a point is its stable
/// identifier and is what cluster tie-breaking refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if points.is_empty() {
            return Err(Error::invalid("point set must contain at least one point"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::invalid(format!(
                    "point {} has {} coordinates, expected {}",
                    i + 1,
                    p.len(),
                    dim
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(format!(
                    "point {} has a non-finite coordinate",
                    i + 1
                )));
            }
        }
        Ok(PointSet { dim, points })
    }

    /// Convenience constructor for 1-D data.
    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        PointSet::new(1, xs.iter().map(|&x| vec![x]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinates of the point with 0-based index `i`.
    pub fn coords(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Euclidean distance between points `i` and `j` (0-based).
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(&self.points[i], &self.points[j])
    }

    /// Keep only the points at the given 0-based indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        PointSet::new(
            self.dim,
            indices.iter().map(|&i| self.points[i].clone()).collect(),
        )
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// One merge of the single-linkage agglomeration: at `radius`, the components
/// containing points `a` and `b` (0-based) become one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    pub radius: f64,
    pub a: usize,
    pub b: usize,
}

/// The full single-linkage merge structure of a point set.
///
/// `levels` holds the distinct cut radii `ρ₀ = 0 < ρ₁ < … < ρ_K`; the cut
/// partition is constant for radii between consecutive levels. Zero-radius
/// merges coming from duplicate points are folded into level `ρ₀`.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<MergeEvent>,
    levels: Vec<f64>,
    /// `level_end[k]` = number of merges with radius ≤ `levels[k]`.
    level_end: Vec<usize>,
}

impl Dendrogram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[MergeEvent] {
        &self.merges
    }

    /// Distinct cut radii, starting at 0 and strictly increasing.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of clusters in the cut at `levels[k]`.
    pub fn clusters_at_level(&self, k: usize) -> usize {
        self.n - self.level_end[k]
    }

    /// Merges belonging to the cut at `levels[k]`, i.e. all merges with
    /// radius ≤ `levels[k]`.
    pub fn merges_up_to_level(&self, k: usize) -> &[MergeEvent] {
        &self.merges[..self.level_end[k]]
    }

    /// Index of the level whose partition is active at radius `r`, i.e. the
    /// largest `k` with `levels[k] ≤ r`.
    pub fn level_at_radius(&self, r: f64) -> Result<usize> {
        if !(r >= 0.0) {
            return Err(Error::invalid("cut radius must be nonnegative"));
        }
        // levels[0] = 0 ≤ r always holds.
        Ok(self.levels.partition_point(|&l| l <= r) - 1)
    }
}

/// A partition of the point set into the connected components of the
/// threshold graph at `radius`. Clusters hold 1-based point indices, each
/// sorted ascending; clusters are listed by ascending minimum index.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub clusters: Vec<Vec<usize>>,
    pub radius: f64,
}

/// Build the single-linkage dendrogram via Prim's algorithm on the complete
/// Euclidean distance graph (O(n²) time, O(n) memory).
pub fn build_dendrogram(points: &PointSet) -> Dendrogram {
    let n = points.len();
    let mut merges: Vec<MergeEvent> = Vec::with_capacity(n.saturating_sub(1));

    if n > 1 {
        // Prim: grow the tree from point 0, tracking for every outside point
        // its distance to the tree and the tree point realizing it.
        let mut in_tree = vec![false; n];
        let mut best_dist = vec![f64::INFINITY; n];
        let mut best_from = vec![0usize; n];
        in_tree[0] = true;
        for j in 1..n {
            best_dist[j] = points.distance(0, j);
        }
        for _ in 1..n {
            let mut next = usize::MAX;
            let mut next_dist = f64::INFINITY;
            for j in 0..n {
                if !in_tree[j] && best_dist[j] < next_dist {
                    next = j;
                    next_dist = best_dist[j];
                }
            }
            in_tree[next] = true;
            merges.push(MergeEvent {
                radius: next_dist,
                a: best_from[next],
                b: next,
            });
            for j in 0..n {
                if !in_tree[j] {
                    let d = points.distance(next, j);
                    if d < best_dist[j] {
                        best_dist[j] = d;
                        best_from[j] = next;
                    }
                }
            }
        }
        merges.sort_by(|x, y| {
            (x.radius, x.a, x.b)
                .partial_cmp(&(y.radius, y.a, y.b))
                .expect("finite radii")
        });
    }

    // Distinct radii with ρ₀ = 0 prepended; exact float equality groups a
    // level, so zero-radius merges from duplicates land in level 0.
    let mut levels = vec![0.0];
    let mut level_end = vec![0usize];
    for (i, m) in merges.iter().enumerate() {
        if m.radius > *levels.last().unwrap() {
            levels.push(m.radius);
            level_end.push(i);
        }
        *level_end.last_mut().unwrap() = i + 1;
    }
    if level_end.len() == 1 {
        level_end[0] = merges.len();
    }

    Dendrogram {
        n,
        merges,
        levels,
        level_end,
    }
}

/// Connected components of the threshold graph at radius `r`.
pub fn clusters_at_radius(d: &Dendrogram, r: f64) -> Result<Partition> {
    let k = d.level_at_radius(r)?;
    let mut uf = UnionFind::new(d.n);
    for m in d.merges_up_to_level(k) {
        uf.union(m.a, m.b);
    }
    Ok(Partition {
        clusters: uf.components(),
        radius: r,
    })
}

/// Order clusters by size descending, ties broken by the smallest contained
/// point index (ascending).
pub fn order_clusters(p: &Partition) -> Vec<Vec<usize>> {
    let mut ordered = p.clusters.clone();
    ordered.sort_by_key(|c| (std::cmp::Reverse(c.len()), c[0]));
    ordered
}

/// Union-find with union by size; component minima stay deterministic since
/// members are emitted in point order.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns the surviving root, or `None` if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        Some(big)
    }

    pub(crate) fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }

    /// Components as sorted 1-based index lists, ordered by minimum index.
    pub(crate) fn components(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut order: Vec<usize> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            if by_root[r].is_empty() {
                order.push(r);
            }
            by_root[r].push(i + 1);
        }
        order
            .into_iter()
            .map(|r| std::mem::take(&mut by_root[r]))
            .collect()
    }
}
