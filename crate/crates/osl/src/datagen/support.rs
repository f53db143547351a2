//! Support geometry: membership tests, uniform sampling and pairwise
//! separation distances for the shapes used by the built-in mixture models.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of a group support in its intrinsic coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SupportGeom {
    /// Axis-aligned box `[lo, hi]` (any dimension).
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// 2-D annulus: `inner ≤ ‖x − center‖ ≤ outer`.
    Annulus {
        center: [f64; 2],
        inner: f64,
        outer: f64,
    },
    /// Vertical band of thickness `thickness` around the curve
    /// `{(t, amplitude·sin t) : t ∈ [x_lo, x_hi]}`. Thickness 0 gives the
    /// bare curve, sampled uniformly with respect to arc length.
    SineCurve {
        x_lo: f64,
        x_hi: f64,
        amplitude: f64,
        thickness: f64,
    },
    /// Dirac mass at a single location.
    PointMass { location: Vec<f64> },
    /// 1-D interval.
    Interval { lo: f64, hi: f64 },
}

/// A group support: intrinsic geometry plus fixed trailing coordinates used
/// to embed low-dimensional shapes into a higher ambient dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSpec {
    pub geom: SupportGeom,
    /// Fixed values of coordinates beyond the geometry's own dimension.
    #[serde(default)]
    pub tail: Vec<f64>,
}

impl SupportGeom {
    pub fn dim(&self) -> usize {
        match self {
            SupportGeom::Box { lo, .. } => lo.len(),
            SupportGeom::Annulus { .. } => 2,
            SupportGeom::SineCurve { .. } => 2,
            SupportGeom::PointMass { location } => location.len(),
            SupportGeom::Interval { .. } => 1,
        }
    }
}

impl SupportSpec {
    pub fn plain(geom: SupportGeom) -> Self {
        SupportSpec { geom, tail: Vec::new() }
    }

    pub fn embedded(geom: SupportGeom, tail: Vec<f64>) -> Self {
        SupportSpec { geom, tail }
    }

    pub fn dim(&self) -> usize {
        self.geom.dim() + self.tail.len()
    }

    /// Exact membership test. Point-mass membership and embedding
    /// coordinates use exact equality; the thickness-0 sine curve allows a
    /// 1e-9 slack on `|y − A·sin x|` so points constructed as `(t, A·sin t)`
    /// always test positive.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "point has dimension {}, support has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        let g = self.geom.dim();
        if x[g..] != self.tail[..] {
            return Ok(false);
        }
        let x = &x[..g];
        Ok(match &self.geom {
            SupportGeom::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(x)
                .all(|((l, h), c)| *l <= *c && *c <= *h),
            SupportGeom::Annulus { center, inner, outer } => {
                let d = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)).sqrt();
                *inner <= d && d <= *outer
            }
            SupportGeom::SineCurve {
                x_lo,
                x_hi,
                amplitude,
                thickness,
            } => {
                x[0] >= *x_lo
                    && x[0] <= *x_hi
                    && (x[1] - amplitude * x[0].sin()).abs() <= thickness / 2.0 + 1e-9
            }
            SupportGeom::PointMass { location } => location == x,
            SupportGeom::Interval { lo, hi } => *lo <= x[0] && x[0] <= *hi,
        })
    }

    /// Draw one point uniformly on the support (area/arc-length uniform).
    pub fn sample<R: Rng>(&self, rng: &mut R, sine_table: Option<&ArcLengthTable>) -> Vec<f64> {
        let mut p = match &self.geom {
            SupportGeom::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| rng.gen_range(*l..=*h))
                .collect(),
            SupportGeom::Annulus { center, inner, outer } => {
                let u: f64 = rng.gen();
                let r = (u * (outer * outer - inner * inner) + inner * inner).sqrt();
                let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                vec![center[0] + r * theta.cos(), center[1] + r * theta.sin()]
            }
            SupportGeom::SineCurve {
                x_lo,
                x_hi,
                amplitude,
                thickness,
            } => {
                if *thickness > 0.0 {
                    // The band is a vertical shear of a rectangle, so
                    // uniform (x, vertical offset) is area-uniform.
                    let t = rng.gen_range(*x_lo..=*x_hi);
                    let v = rng.gen_range(-thickness / 2.0..=thickness / 2.0);
                    vec![t, amplitude * t.sin() + v]
                } else {
                    let table = sine_table.expect("arc-length table for bare sine curve");
                    let t = table.inverse(rng.gen());
                    vec![t, amplitude * t.sin()]
                }
            }
            SupportGeom::PointMass { location } => location.clone(),
            SupportGeom::Interval { lo, hi } => vec![rng.gen_range(*lo..=*hi)],
        };
        p.extend_from_slice(&self.tail);
        p
    }

    /// Minimum Euclidean distance to another support.
    ///
    /// Exact for the pairings used by the built-in models (box/box,
    /// concentric annuli, point masses, intervals, curve/box via 1-D
    /// refinement); other pairings fall back to dense mesh sampling with
    /// roughly 1e-6 accuracy.
    pub fn distance_to(&self, other: &SupportSpec) -> f64 {
        let tail_sq: f64 = self
            .tail
            .iter()
            .zip(&other.tail)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let planar = geom_distance(&self.geom, &other.geom);
        (planar * planar + tail_sq).sqrt()
    }
}

fn geom_distance(a: &SupportGeom, b: &SupportGeom) -> f64 {
    use SupportGeom::*;
    match (a, b) {
        (Box { lo: l1, hi: h1 }, Box { lo: l2, hi: h2 }) => box_box(l1, h1, l2, h2),
        (Interval { lo: l1, hi: h1 }, Interval { lo: l2, hi: h2 }) => {
            box_box(&[*l1], &[*h1], &[*l2], &[*h2])
        }
        (PointMass { location: p }, PointMass { location: q }) => crate::linkage::euclidean(p, q),
        (PointMass { location: p }, Box { lo, hi }) | (Box { lo, hi }, PointMass { location: p }) => {
            point_box(p, lo, hi)
        }
        (PointMass { location: p }, Interval { lo, hi })
        | (Interval { lo, hi }, PointMass { location: p }) => point_box(p, &[*lo], &[*hi]),
        (
            Annulus { center: c1, inner: i1, outer: o1 },
            Annulus { center: c2, inner: i2, outer: o2 },
        ) => {
            let cc = ((c1[0] - c2[0]).powi(2) + (c1[1] - c2[1]).powi(2)).sqrt();
            if cc < 1e-12 {
                // concentric
                (i2 - o1).max(i1 - o2).max(0.0)
            } else {
                mesh_distance(a, b)
            }
        }
        (SineCurve { .. }, Box { lo, hi }) => curve_box(a, lo, hi),
        (Box { lo, hi }, SineCurve { .. }) => curve_box(b, lo, hi),
        _ => mesh_distance(a, b),
    }
}

fn box_box(l1: &[f64], h1: &[f64], l2: &[f64], h2: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..l1.len() {
        let g = (l2[i] - h1[i]).max(l1[i] - h2[i]).max(0.0);
        s += g * g;
    }
    s.sqrt()
}

fn point_box(p: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        let g = (lo[i] - p[i]).max(p[i] - hi[i]).max(0.0);
        s += g * g;
    }
    s.sqrt()
}

/// Distance from a sine band to an axis-aligned box: grid scan over the
/// curve parameter with golden-section refinement around the best cell.
fn curve_box(curve: &SupportGeom, lo: &[f64], hi: &[f64]) -> f64 {
    let SupportGeom::SineCurve { x_lo, x_hi, amplitude, thickness } = curve else {
        unreachable!()
    };
    let offsets: &[f64] = if *thickness > 0.0 {
        &[-thickness / 2.0, 0.0, thickness / 2.0]
    } else {
        &[0.0]
    };
    let f = |t: f64, v: f64| point_box(&[t, amplitude * t.sin() + v], lo, hi);
    let mut best = f64::INFINITY;
    for &v in offsets {
        let grid = 4096;
        let mut bt = *x_lo;
        for k in 0..=grid {
            let t = x_lo + (x_hi - x_lo) * k as f64 / grid as f64;
            let d = f(t, v);
            if d < best {
                best = d;
                bt = t;
            }
        }
        let h = (x_hi - x_lo) / grid as f64;
        let (mut a, mut b) = ((bt - h).max(*x_lo), (bt + h).min(*x_hi));
        for _ in 0..200 {
            let m1 = a + (b - a) * 0.381_966_011_250_105;
            let m2 = b - (b - a) * 0.381_966_011_250_105;
            if f(m1, v) < f(m2, v) {
                b = m2;
            } else {
                a = m1;
            }
        }
        best = best.min(f(0.5 * (a + b), v));
    }
    best
}

/// Last-resort numeric distance: minimum over dense boundary meshes.
fn mesh_distance(a: &SupportGeom, b: &SupportGeom) -> f64 {
    let ma = mesh(a, 2000);
    let mb = mesh(b, 2000);
    let mut best = f64::INFINITY;
    for p in &ma {
        for q in &mb {
            let d = crate::linkage::euclidean(p, q);
            if d < best {
                best = d;
            }
        }
    }
    best
}

fn mesh(g: &SupportGeom, k: usize) -> Vec<Vec<f64>> {
    match g {
        SupportGeom::Box { lo, hi } if lo.len() == 2 => {
            let mut v = Vec::new();
            for i in 0..=k / 4 {
                let f = i as f64 / (k / 4) as f64;
                v.push(vec![lo[0] + f * (hi[0] - lo[0]), lo[1]]);
                v.push(vec![lo[0] + f * (hi[0] - lo[0]), hi[1]]);
                v.push(vec![lo[0], lo[1] + f * (hi[1] - lo[1])]);
                v.push(vec![hi[0], lo[1] + f * (hi[1] - lo[1])]);
            }
            v
        }
        SupportGeom::Box { lo, hi } => vec![lo.clone(), hi.clone()],
        SupportGeom::Annulus { center, inner, outer } => {
            let mut v = Vec::new();
            for i in 0..k {
                let th = std::f64::consts::TAU * i as f64 / k as f64;
                v.push(vec![center[0] + inner * th.cos(), center[1] + inner * th.sin()]);
                v.push(vec![center[0] + outer * th.cos(), center[1] + outer * th.sin()]);
            }
            v
        }
        SupportGeom::SineCurve { x_lo, x_hi, amplitude, thickness } => {
            let mut v = Vec::new();
            for i in 0..=k {
                let t = x_lo + (x_hi - x_lo) * i as f64 / k as f64;
                v.push(vec![t, amplitude * t.sin() - thickness / 2.0]);
                v.push(vec![t, amplitude * t.sin() + thickness / 2.0]);
            }
            v
        }
        SupportGeom::PointMass { location } => vec![location.clone()],
        SupportGeom::Interval { lo, hi } => vec![vec![*lo], vec![*hi]],
    }
}

/// Inverse-CDF table for arc-length-uniform sampling on a sine curve.
#[derive(Debug, Clone)]
pub struct ArcLengthTable {
    ts: Vec<f64>,
    cum: Vec<f64>,
}

impl ArcLengthTable {
    pub fn new(x_lo: f64, x_hi: f64, amplitude: f64) -> Self {
        let n = 4096;
        let mut ts = Vec::with_capacity(n + 1);
        let mut cum = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        let mut prev = [x_lo, amplitude * x_lo.sin()];
        ts.push(x_lo);
        cum.push(0.0);
        for i in 1..=n {
            let t = x_lo + (x_hi - x_lo) * i as f64 / n as f64;
            let p = [t, amplitude * t.sin()];
            acc += ((p[0] - prev[0]).powi(2) + (p[1] - prev[1]).powi(2)).sqrt();
            ts.push(t);
            cum.push(acc);
            prev = p;
        }
        ArcLengthTable { ts, cum }
    }

    /// Map `u ∈ [0,1)` to a curve parameter, uniform in arc length.
    pub fn inverse(&self, u: f64) -> f64 {
        let target = u * self.cum.last().unwrap();
        let i = self.cum.partition_point(|&c| c < target).max(1);
        let (c0, c1) = (self.cum[i - 1], self.cum[i]);
        let f = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
        self.ts[i - 1] + f * (self.ts[i] - self.ts[i - 1])
    }
}

/// Distribution of the outliers: a base law sampled by rejection against the
/// group supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum OutlierSpec {
    /// Uniform on an ambient box, minus the supports.
    UniformBox { lo: Vec<f64>, hi: Vec<f64> },
    /// Uniform on a 2-D annulus, minus the supports.
    UniformAnnulus {
        center: [f64; 2],
        inner: f64,
        outer: f64,
    },
    /// Bivariate Gaussian with per-axis variances and correlation `rho`,
    /// truncated off the supports. `|rho| = 1` degenerates to sampling along
    /// the principal axis.
    TruncatedGaussian {
        mean: Vec<f64>,
        variances: Vec<f64>,
        rho: f64,
    },
}

impl OutlierSpec {
    pub fn dim(&self) -> usize {
        match self {
            OutlierSpec::UniformBox { lo, .. } => lo.len(),
            OutlierSpec::UniformAnnulus { .. } => 2,
            OutlierSpec::TruncatedGaussian { mean, .. } => mean.len(),
        }
    }

    /// One draw from the base law (before rejection against supports).
    pub fn sample_base<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            OutlierSpec::UniformBox { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| rng.gen_range(*l..=*h))
                .collect(),
            OutlierSpec::UniformAnnulus { center, inner, outer } => {
                let u: f64 = rng.gen();
                let r = (u * (outer * outer - inner * inner) + inner * inner).sqrt();
                let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                vec![center[0] + r * theta.cos(), center[1] + r * theta.sin()]
            }
            OutlierSpec::TruncatedGaussian { mean, variances, rho } => {
                let (z1, z2) = box_muller(rng);
                let s1 = variances[0].sqrt();
                let s2 = variances[1].sqrt();
                // Cholesky factor of [[v1, ρ√(v1 v2)], [ρ√(v1 v2), v2]];
                // for |ρ| = 1 the z2 coefficient vanishes and the draw lies
                // on the principal axis.
                let x = mean[0] + s1 * z1;
                let y = mean[1] + s2 * (rho * z1 + (1.0 - rho * rho).max(0.0).sqrt() * z2);
                vec![x, y]
            }
        }
    }
}

/// Standard normal pair via Box-Muller; fixed so sampler output is
/// bit-stable across releases.
fn box_muller<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}
