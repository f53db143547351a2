//! Closed-form quantities of the risk theory: generalized ball volumes, the
//! concentration exponent ψ, admissible-η thresholds, the complexity
//! constants 𝔞 and 𝔟, the weight-balance feasibility check, and the
//! three-term risk upper bound with grid minimization.
//!
//! The bound's leading constant Λ is not computable from model parameters
//! (it arises from covering numbers in the proofs) and is a required user
//! input; the CLI defaults it to 1 with a documented caveat.

use serde::Deserialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Model parameters entering the risk bound.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ModelConstants {
    /// Smallest group weight γ_*.
    pub gamma_star: f64,
    /// Largest group weight γ^*.
    pub gamma_sup: f64,
    /// Outlier proportion ε.
    pub epsilon: f64,
    /// Outlier density bound κ₀.
    pub kappa0: f64,
    /// Largest group density constant κ* = max κᵢ.
    pub kappa_sup: f64,
    /// Support regularity constant κ_c.
    pub kappa_c: f64,
    /// Maximum Hausdorff dimension d of the group supports.
    pub d: f64,
    /// Ambient dimension D.
    pub big_d: f64,
    /// Minimum intergroup separation δ.
    pub delta: f64,
    /// Sample size n.
    pub n: u64,
    /// Number of groups M.
    pub m: u64,
    /// Leading constant Λ of the covering term (user-supplied).
    pub lambda: f64,
    /// Concentration parameter η for the tail term.
    pub eta: f64,
}

impl ModelConstants {
    /// γ̄ = γ_* − γ^*/2.
    pub fn gamma_bar(&self) -> f64 {
        self.gamma_star - self.gamma_sup / 2.0
    }
}

/// Volume of the unit ball generalized to non-integer dimension:
/// `π^{s/2} / Γ(1 + s/2)`.
pub fn ball_volume(s: f64) -> f64 {
    std::f64::consts::PI.powf(s / 2.0) / gamma(1.0 + s / 2.0)
}

/// The concentration exponent `ψ(η) = (1+η)(log(1+η) − 1) + 1`, strictly
/// positive for η > 0.
pub fn psi(eta: f64) -> Result<f64> {
    if eta <= 0.0 {
        return Err(Error::invalid("psi is defined for η > 0"));
    }
    Ok((1.0 + eta) * ((1.0 + eta).ln() - 1.0) + 1.0)
}

/// True iff the weight-balance feasibility condition holds:
/// `γ^* < 2γ_*` and `0 ≤ ε < γ̄/(1+γ̄)`.
pub fn check_a6(weights: &[f64], epsilon: f64) -> Result<bool> {
    if weights.is_empty() || weights.iter().any(|w| *w <= 0.0) {
        return Err(Error::invalid("weights must be nonempty and positive"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("weights must sum to 1"));
    }
    if epsilon < 0.0 {
        return Err(Error::invalid("epsilon must be nonnegative"));
    }
    let g_min = weights.iter().cloned().fold(f64::INFINITY, f64::min);
    let g_max = weights.iter().cloned().fold(0.0, f64::max);
    if g_max >= 2.0 * g_min {
        return Ok(false);
    }
    let g_bar = g_min - g_max / 2.0;
    Ok(epsilon < g_bar / (1.0 + g_bar))
}

/// The admissible-η thresholds `(η₀, η₁)`:
/// `η₀ = 1 − [(1−ε)(1+γ̄)]⁻¹` and `η₁` solving
/// `4η₁/(1−η₁) = γ_*/γ^* − 1/2`.
pub fn eta_thresholds(c: &ModelConstants) -> Result<(f64, f64)> {
    let weights_ok = c.gamma_sup < 2.0 * c.gamma_star;
    let g_bar = c.gamma_bar();
    if !weights_ok || !(c.epsilon >= 0.0 && c.epsilon < g_bar / (1.0 + g_bar)) {
        return Err(Error::InfeasibleModel(
            "weight-balance condition fails for these parameters".into(),
        ));
    }
    let eta0 = 1.0 - 1.0 / ((1.0 - c.epsilon) * (1.0 + g_bar));
    let t = c.gamma_star / c.gamma_sup - 0.5;
    let eta1 = t / (4.0 + t);
    Ok((eta0, eta1))
}

/// The complexity constants of the bound:
/// `𝔞 = γ_* (κ* κ_c)⁻¹ η_*(d) / (1+γ̄)` with `η_*(d) = min(1, η(d))`, and
/// `𝔟 = η(D) κ₀`.
pub fn constants_ab(c: &ModelConstants) -> Result<(f64, f64)> {
    if c.kappa_sup <= 0.0 || c.kappa_c <= 0.0 || c.kappa0 <= 0.0 {
        return Err(Error::invalid("κ constants must be positive"));
    }
    let eta_star = ball_volume(c.d).min(1.0);
    let a = c.gamma_star * eta_star / (c.kappa_sup * c.kappa_c * (1.0 + c.gamma_bar()));
    let b = ball_volume(c.big_d) * c.kappa0;
    Ok((a, b))
}

/// The three-term risk upper bound at cut radius `r`:
/// `Λ r^{−d} e^{−𝔞 n r^d} + nε (𝔟 ε n r^D)^{⌊δ/r⌋} + 2M e^{−ψ(η)(1−ε)γ̄ n}`.
///
/// Terms are evaluated in log space so large `n` cannot overflow
/// intermediates; the raw (unclamped) sum is returned.
pub fn risk_bound(r: f64, c: &ModelConstants) -> Result<f64> {
    let tail = tail_term(c, 2.0)?;
    let (covering, chaining) = main_terms(r, c)?;
    Ok(exp_sum(&[covering, chaining, tail]))
}

/// log of the covering and outlier-chaining terms at radius `r`.
fn main_terms(r: f64, c: &ModelConstants) -> Result<(f64, f64)> {
    if !(r > 0.0 && r < c.delta) {
        return Err(Error::invalid(format!(
            "radius {r} must lie in (0, δ = {})",
            c.delta
        )));
    }
    let (a, b) = constants_ab(c)?;
    let n = c.n as f64;
    let covering = c.lambda.ln() - c.d * r.ln() - a * n * r.powf(c.d);
    let chaining = if c.epsilon == 0.0 {
        f64::NEG_INFINITY // exactly zero without outliers
    } else {
        let k = (c.delta / r).floor();
        let inner = b * c.epsilon * n * r.powf(c.big_d);
        if inner == 0.0 && k > 0.0 {
            f64::NEG_INFINITY
        } else {
            (n * c.epsilon).ln() + k * inner.ln()
        }
    };
    Ok((covering, chaining))
}

/// log of `factor·M·exp(−ψ(η)(1−ε)γ̄n)`, validating `0 < η < η₀`.
fn tail_term(c: &ModelConstants, factor: f64) -> Result<f64> {
    let (eta0, _eta1) = eta_thresholds(c)?;
    if !(c.eta > 0.0 && c.eta < eta0) {
        return Err(Error::invalid(format!(
            "η = {} must lie in (0, η₀ = {eta0})",
            c.eta
        )));
    }
    let p = psi(c.eta)?;
    Ok((factor * c.m as f64).ln() - p * (1.0 - c.epsilon) * c.gamma_bar() * c.n as f64)
}

fn exp_sum(logs: &[f64]) -> f64 {
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return 0.0;
    }
    let s: f64 = logs.iter().map(|l| (l - m).exp()).sum();
    m.exp() * s
}

/// Grid search for the radius minimizing the combined bound (the two main
/// terms plus the `4M` tail); ties break toward the larger radius.
pub fn minimize_bound(c: &ModelConstants, grid: &[f64]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::invalid("radius grid must be nonempty"));
    }
    let tail = tail_term(c, 4.0)?;
    let mut best: Option<(f64, f64)> = None;
    for &r in grid {
        let (covering, chaining) = main_terms(r, c)?;
        let value = exp_sum(&[covering, chaining, tail]);
        best = match best {
            Some((br, bv)) if bv < value || (bv == value && br >= r) => Some((br, bv)),
            _ => Some((r, value)),
        };
    }
    Ok(best.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_constants() -> ModelConstants {
        ModelConstants {
            gamma_star: 1.0 / 3.0,
            gamma_sup: 1.0 / 3.0,
            epsilon: 0.0,
            kappa0: 1.0,
            kappa_sup: 1.0,
            kappa_c: 1.0,
            d: 1.0,
            big_d: 2.0,
            delta: 1.0,
            n: 100,
            m: 2,
            lambda: 1.0,
            eta: 0.1,
        }
    }

    #[test]
    fn ball_volume_integer_dims() {
        let expect = [
            1.0,
            2.0,
            std::f64::consts::PI,
            4.0 * std::f64::consts::PI / 3.0,
            std::f64::consts::PI * std::f64::consts::PI / 2.0,
        ];
        for (s, e) in expect.iter().enumerate() {
            assert!((ball_volume(s as f64) - e).abs() < 1e-12, "s = {s}");
        }
    }

    #[test]
    fn ball_volume_fractional_dim() {
        // π^1.25 / Γ(2.25), frozen from an independent Γ evaluation
        assert!((ball_volume(2.5) - 3.691_528_656_864_961_5).abs() < 1e-9);
    }

    #[test]
    fn psi_values() {
        assert!(psi(1e-9).unwrap().abs() < 1e-15);
        assert!((psi(std::f64::consts::E - 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((psi(1.0).unwrap() - (2.0 * 2.0_f64.ln() - 1.0)).abs() < 1e-12);
        assert!(psi(0.0).is_err());
        assert!(psi(-1.0).is_err());
    }

    #[test]
    fn psi_increasing_convex_positive() {
        let mut prev = psi(1e-6).unwrap();
        let mut prev_slope = f64::NEG_INFINITY;
        for i in 1..60 {
            let eta = 1e-6 * 1.5f64.powi(i);
            let v = psi(eta).unwrap();
            assert!(v > 0.0);
            assert!(v > prev);
            let slope = (v - prev) / (eta - eta / 1.5);
            assert!(slope >= prev_slope * 0.999);
            prev = v;
            prev_slope = slope;
        }
    }

    #[test]
    fn a6_thresholds() {
        let equal = [1.0 / 3.0; 3];
        assert!(check_a6(&equal, 0.1).unwrap());
        assert!(!check_a6(&equal, 0.2).unwrap());
        // boundary 1/7 exactly
        assert!(!check_a6(&equal, 1.0 / 7.0).unwrap());
        assert!(check_a6(&equal, 1.0 / 7.0 - 1e-13).unwrap());

        // threshold is 1/11; allow a few ulps of slack around the boundary
        let rings = [0.4, 0.6];
        assert!(check_a6(&rings, 1.0 / 11.0 - 1e-12).unwrap());
        assert!(!check_a6(&rings, 1.0 / 11.0 + 1e-12).unwrap());

        assert!(!check_a6(&[0.25, 0.75], 0.0).unwrap());
        assert!(check_a6(&[0.5, 0.5, 0.1], 0.0).is_err());
        assert!(check_a6(&[], 0.0).is_err());
    }

    #[test]
    fn thresholds_equal_weights() {
        let c = base_constants();
        let (eta0, eta1) = eta_thresholds(&c).unwrap();
        // γ̄ = 1/6 → η₀ = 1 − 6/7 = 1/7
        assert!((eta0 - 1.0 / 7.0).abs() < 1e-12);
        // γ_*/γ^* = 1 → t = 1/2, η₁ = 1/9
        assert!((eta1 - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn thresholds_boundary_and_infeasible() {
        let mut c = base_constants();
        c.gamma_star = 0.25;
        c.gamma_sup = 0.5;
        assert!(eta_thresholds(&c).is_err()); // γ^* = 2γ_* boundary

        // t = 0 ⇒ η₁ = 0 right at γ^* = 2γ_*; check just inside
        c.gamma_sup = 0.5 - 1e-9;
        let (_, eta1) = eta_thresholds(&c).unwrap();
        assert!(eta1 < 1e-9);
    }

    #[test]
    fn complexity_constants() {
        let mut c = base_constants();
        c.d = 2.0;
        let (a, b) = constants_ab(&c).unwrap();
        // 𝔞 = (1/3)·min(1, π)/(7/6) = 2/7
        assert!((a - 2.0 / 7.0).abs() < 1e-12);
        // 𝔟 = η(2)·1 = π
        assert!((b - std::f64::consts::PI).abs() < 1e-12);

        c.d = 0.0;
        let (a0, _) = constants_ab(&c).unwrap();
        assert!((a0 - (1.0 / 3.0) / (7.0 / 6.0)).abs() < 1e-12);

        c.kappa0 = 0.0;
        assert!(constants_ab(&c).is_err());
    }

    #[test]
    fn bound_epsilon_zero_drops_chaining_term() {
        let c = base_constants();
        let (_, chaining) = main_terms(0.5, &c).unwrap();
        assert_eq!(chaining, f64::NEG_INFINITY);
    }

    #[test]
    fn bound_term_by_term() {
        // Λ=1, d=1, D=2, κ's = 1 with weights making 𝔞 = 2/7·…; instead pin
        // 𝔞 = 1 artificially via κ_c.
        let mut c = base_constants();
        c.d = 1.0;
        let (a, _) = constants_ab(&c).unwrap();
        c.kappa_c = a; // rescale so the effective 𝔞 becomes 1
        let (a, _) = constants_ab(&c).unwrap();
        assert!((a - 1.0).abs() < 1e-12);

        let r = 0.5;
        let got = risk_bound(r, &c).unwrap();
        let psi_eta = psi(0.1).unwrap();
        let g_bar = 1.0 / 6.0;
        let want = (1.0 / r) * (-100.0 * r).exp()
            + 0.0
            + 4.0 * (-psi_eta * g_bar * 100.0).exp();
        assert!((got - want).abs() < 1e-12 * want.max(1.0), "{got} vs {want}");
    }

    #[test]
    fn bound_validates_inputs() {
        let c = base_constants();
        assert!(risk_bound(0.0, &c).is_err());
        assert!(risk_bound(1.0, &c).is_err());
        let mut bad = c.clone();
        bad.eta = 0.5; // above η₀ = 1/7
        assert!(risk_bound(0.5, &bad).is_err());
    }

    #[test]
    fn bound_monotone_in_complexity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let mut c = base_constants();
            c.eta = 0.05; // admissible: η₀ > 0.09 over the whole ε range below
            c.epsilon = rng.gen_range(0.0..0.04);
            c.n = rng.gen_range(50..500);
            let r = rng.gen_range(0.05..0.95);
            let v = risk_bound(r, &c).unwrap();

            // smaller κ_c ⇒ larger 𝔞 ⇒ bound can only shrink
            let mut sharper = c.clone();
            sharper.kappa_c = c.kappa_c / 2.0;
            assert!(risk_bound(r, &sharper).unwrap() <= v + 1e-12);

            // larger κ₀ ⇒ larger 𝔟 ⇒ bound can only grow
            let mut noisier = c.clone();
            noisier.kappa0 = c.kappa0 * 3.0;
            assert!(risk_bound(r, &noisier).unwrap() >= v - 1e-12);

            // larger ε grows the bound
            let mut dirtier = c.clone();
            dirtier.epsilon = c.epsilon + 0.01;
            assert!(risk_bound(r, &dirtier).unwrap() >= v - 1e-12);
        }
    }

    #[test]
    fn minimize_singleton_grid() {
        let c = base_constants();
        let (r, _) = minimize_bound(&c, &[0.3]).unwrap();
        assert_eq!(r, 0.3);
    }

    #[test]
    fn minimize_epsilon_zero_prefers_large_radius() {
        let c = base_constants();
        let grid: Vec<f64> = (1..1000).map(|i| i as f64 * 0.999e-3).collect();
        let (r, _) = minimize_bound(&c, &grid).unwrap();
        assert_eq!(r, *grid.last().unwrap());
    }

    #[test]
    fn minimize_beats_closed_form_rate_choice() {
        let mut c = base_constants();
        c.epsilon = 0.05;
        c.eta = 0.05; // η₀ ≈ 0.098 at this ε
        c.d = 2.0;
        c.n = 2000;
        let (a, _) = constants_ab(&c).unwrap();
        // the closed-form consistency choice r^d = D log n / (𝔞 d n)
        let n = c.n as f64;
        let r_rate = (c.big_d * n.ln() / (a * c.d * n)).powf(1.0 / c.d);
        assert!(r_rate > 0.0 && r_rate < c.delta);
        let mut grid: Vec<f64> = (1..500).map(|i| i as f64 * 1.99e-3).collect();
        grid.push(r_rate);
        grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let (_, best_value) = minimize_bound(&c, &grid).unwrap();
        let tail = tail_term(&c, 4.0).unwrap();
        let (cov, chain) = main_terms(r_rate, &c).unwrap();
        let at_rate = exp_sum(&[cov, chain, tail]);
        assert!(best_value <= at_rate + 1e-12);
    }
}
