//! The built-in mixture models used by the simulation studies.
//!
//! The literature fixes shape classes, weights and intergroup distances δ
//! but not absolute coordinates; the placements below are the concrete
//! choices shipped with this crate (see README for the layout rationale):
//!
//! * squares: three unit-weight-ratio squares of side 0.1 on a horizontal
//!   row inside [0,1]², consecutive gaps equal to δ;
//! * concentric circles: annuli [1,2] and [2+δ, 3+δ] around the origin,
//!   outliers only in the open ring between them;
//! * sine: the curve {(t, 1.5 sin t) : t ∈ [0, 2π]} plus two unit squares
//!   stacked vertically above its descending half, square–square gap exactly
//!   δ and lower-square–curve distance also exactly δ;
//! * high-dimensional sine: same supports embedded at coordinate value π in
//!   the extra axes, outliers uniform on [0, 2π]^D.

use std::f64::consts::{PI, TAU};

use super::support::{OutlierSpec, SupportGeom, SupportSpec};
use super::MixtureModel;
use crate::error::{Error, Result};

/// Separation regime of a built-in model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaCase {
    Easy,
    Tricky,
}

const SQUARE_SIDE: f64 = 0.1;

/// Three equal-weight squares on a row; δ = 0.35 (easy) or 0.07 (tricky).
pub fn squares_model(case: DeltaCase) -> MixtureModel {
    let delta = match case {
        DeltaCase::Easy => 0.35,
        DeltaCase::Tricky => 0.07,
    };
    let width = 3.0 * SQUARE_SIDE + 2.0 * delta;
    let x0 = (1.0 - width) / 2.0;
    let y0 = 0.5 - SQUARE_SIDE / 2.0;
    let square = |k: f64| {
        let lo_x = x0 + k * (SQUARE_SIDE + delta);
        SupportSpec::plain(SupportGeom::Box {
            lo: vec![lo_x, y0],
            hi: vec![lo_x + SQUARE_SIDE, y0 + SQUARE_SIDE],
        })
    };
    MixtureModel::new(
        0.0,
        vec![1.0 / 3.0; 3],
        vec![square(0.0), square(1.0), square(2.0)],
        OutlierSpec::UniformBox {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        },
        2,
    )
    .expect("valid built-in model")
}

/// Two nested rings, weights (0.4, 0.6); δ = 2.6 (easy) or 1.6 (tricky).
/// Outliers live only in the open annulus between the rings.
pub fn circles_model(case: DeltaCase) -> MixtureModel {
    let delta = match case {
        DeltaCase::Easy => 2.6,
        DeltaCase::Tricky => 1.6,
    };
    MixtureModel::new(
        0.0,
        vec![0.4, 0.6],
        vec![
            SupportSpec::plain(SupportGeom::Annulus {
                center: [0.0, 0.0],
                inner: 1.0,
                outer: 2.0,
            }),
            SupportSpec::plain(SupportGeom::Annulus {
                center: [0.0, 0.0],
                inner: 2.0 + delta,
                outer: 3.0 + delta,
            }),
        ],
        OutlierSpec::UniformAnnulus {
            center: [0.0, 0.0],
            inner: 2.0,
            outer: 2.0 + delta,
        },
        2,
    )
    .expect("valid built-in model")
}

/// The two unit squares are stacked vertically above the descending half of
/// the curve with gap exactly δ; the lower square's bottom is solved so its
/// distance to the curve (attained near its bottom-left corner, facing the
/// descending branch through (π, 0)) is also exactly δ. Both intergroup
/// distances involving the lower square therefore bind at δ, while the upper
/// square stays strictly farther than δ from the curve.
fn sine_supports(delta: f64) -> Vec<SupportSpec> {
    let curve = SupportSpec::plain(SupportGeom::SineCurve {
        x_lo: 0.0,
        x_hi: TAU,
        amplitude: 1.5,
        thickness: 0.0,
    });
    let x1 = if delta > 1.0 { PI - 0.2 } else { PI + 0.7 };
    let b = square_bottom_at_gap(&curve, x1, delta);
    let lower = unit_square(x1, b);
    let upper = unit_square(x1, b + 1.0 + delta);
    vec![curve, lower, upper]
}

fn unit_square(x: f64, y: f64) -> SupportSpec {
    SupportSpec::plain(SupportGeom::Box {
        lo: vec![x, y],
        hi: vec![x + 1.0, y + 1.0],
    })
}

/// Bottom height `b` of the unit square `[x₁, x₁+1] × [b, b+1]` at which its
/// distance to the curve equals `delta`. The distance is increasing in `b`
/// over the bracket, so plain bisection converges; the upper endpoint is
/// returned so the realized gap never undershoots `delta`.
fn square_bottom_at_gap(curve: &SupportSpec, x1: f64, delta: f64) -> f64 {
    let dist = |b: f64| curve.distance_to(&unit_square(x1, b));
    let (mut lo, mut hi) = (0.0, 4.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if dist(mid) < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn sine_delta(case: DeltaCase) -> f64 {
    match case {
        DeltaCase::Easy => 1.18,
        DeltaCase::Tricky => 0.76,
    }
}

/// One sine-curve group and two square groups, equal weights; δ = 1.18
/// (easy) or 0.76 (tricky).
pub fn sine_model(case: DeltaCase) -> MixtureModel {
    let delta = sine_delta(case);
    MixtureModel::new(
        0.0,
        vec![1.0 / 3.0; 3],
        sine_supports(delta),
        OutlierSpec::UniformBox {
            lo: vec![0.0, 0.0],
            hi: vec![TAU, TAU],
        },
        2,
    )
    .expect("valid built-in model")
}

/// The tricky sine model embedded in `D ≥ 2` dimensions: supports keep their
/// planar geometry (extra coordinates pinned at π, the box center), outliers
/// are uniform on `[0, 2π]^D`.
pub fn sine_highdim_model(ambient_dim: usize) -> Result<MixtureModel> {
    if ambient_dim < 2 {
        return Err(Error::invalid("ambient dimension must be at least 2"));
    }
    let tail = vec![PI; ambient_dim - 2];
    let supports = sine_supports(sine_delta(DeltaCase::Tricky))
        .into_iter()
        .map(|s| SupportSpec::embedded(s.geom, tail.clone()))
        .collect();
    MixtureModel::new(
        0.0,
        vec![1.0 / 3.0; 3],
        supports,
        OutlierSpec::UniformBox {
            lo: vec![0.0; ambient_dim],
            hi: vec![TAU; ambient_dim],
        },
        ambient_dim,
    )
}

/// The tricky sine model with Gaussian outliers centered at (π, 0):
/// variances 2σ² (x-axis) and σ² (y-axis), correlation ρ, truncated off the
/// supports.
pub fn gaussian_noise_sine_model(sigma2: f64, rho: f64) -> Result<MixtureModel> {
    if sigma2 <= 0.0 {
        return Err(Error::invalid("sigma2 must be positive"));
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::invalid("rho must lie in [-1, 1]"));
    }
    MixtureModel::new(
        0.0,
        vec![1.0 / 3.0; 3],
        sine_supports(sine_delta(DeltaCase::Tricky)),
        OutlierSpec::TruncatedGaussian {
            mean: vec![PI, 0.0],
            variances: vec![2.0 * sigma2, sigma2],
            rho,
        },
        2,
    )
}

/// The univariate toy model: point masses at ∓1 with weight ½ each, uniform
/// outliers on [−3, 3].
pub fn example2_model(epsilon: f64) -> Result<MixtureModel> {
    MixtureModel::new(
        epsilon,
        vec![0.5, 0.5],
        vec![
            SupportSpec::plain(SupportGeom::PointMass {
                location: vec![-1.0],
            }),
            SupportSpec::plain(SupportGeom::PointMass { location: vec![1.0] }),
        ],
        OutlierSpec::UniformBox {
            lo: vec![-3.0],
            hi: vec![3.0],
        },
        1,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::sample;

    #[test]
    fn squares_gaps_match_delta() {
        let easy = squares_model(DeltaCase::Easy);
        assert_eq!(easy.weights, vec![1.0 / 3.0; 3]);
        assert!((easy.min_gap() - 0.35).abs() < 1e-9);
        let tricky = squares_model(DeltaCase::Tricky);
        assert!((tricky.min_gap() - 0.07).abs() < 1e-9);
    }

    #[test]
    fn circles_gaps_and_weights() {
        let easy = circles_model(DeltaCase::Easy);
        assert_eq!(easy.weights, vec![0.4, 0.6]);
        assert!((easy.min_gap() - 2.6).abs() < 1e-9);
        let tricky = circles_model(DeltaCase::Tricky);
        assert!((tricky.min_gap() - 1.6).abs() < 1e-9);
    }

    #[test]
    fn sine_gaps() {
        let easy = sine_model(DeltaCase::Easy);
        assert!((easy.min_gap() - 1.18).abs() < 1e-9, "{}", easy.min_gap());
        let tricky = sine_model(DeltaCase::Tricky);
        assert!(
            (tricky.min_gap() - 0.76).abs() < 1e-9,
            "{}",
            tricky.min_gap()
        );
    }

    #[test]
    fn highdim_base_case_matches_tricky_sine() {
        let base = sine_highdim_model(2).unwrap();
        let tricky = sine_model(DeltaCase::Tricky);
        assert_eq!(base, tricky);
        assert!(sine_highdim_model(1).is_err());
    }

    #[test]
    fn highdim_group_points_sit_on_embedding_plane() {
        let model = sine_highdim_model(5).unwrap().with_epsilon(0.2).unwrap();
        let s = sample(&model, 500, 21).unwrap();
        for (i, &t) in s.truth.iter().enumerate() {
            if t != 0 {
                let c = s.points.coords(i);
                assert_eq!(&c[2..], &[PI, PI, PI]);
            }
        }
    }

    #[test]
    fn example2_epsilon_zero_is_atomic() {
        let model = example2_model(0.0).unwrap();
        let s = sample(&model, 200, 4).unwrap();
        for p in s.points.points() {
            assert!(p[0] == -1.0 || p[0] == 1.0);
        }
    }

    #[test]
    fn gaussian_model_validation() {
        assert!(gaussian_noise_sine_model(0.0, 0.0).is_err());
        assert!(gaussian_noise_sine_model(0.25, 1.0).is_ok());
        assert!(gaussian_noise_sine_model(0.25, 1.5).is_err());
    }
}
