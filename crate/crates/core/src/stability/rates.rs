//! Theoretical polynomial decay rates.
//!
//! With `M = ⌊(1-η)^{-1}⌋ + 1` and margin `λ1 - λ2 M > 0`:
//!
//! * bounded delay: `C̃0` is the positive root of
//!   `F(C) = C - (λ1 - ε) + (λ2 + ε) M (1+τ)^C`, for `0 < ε < margin/(M+1)`;
//! * unbounded delay: `C̃0 = λ1 - ε - (λ2 + ε) M < 1` in closed form, for
//!   `max{0, (margin-1)/(M+1)} < ε < margin/(M+1)`;
//!
//! and in both cases `C̃ = C̃0 ∧ λ0`. For the exact solution the rate is
//! `γ* = λ0 ∧ γ0` with `γ0` the root of
//! `G(γ) = γ - λ1 + λ2 (1 ∨ (1+τ)^{γ-1}) / (1-η)` (bounded delay), or
//! `γ* = λ0 ∧ (λ1 - λ2/(1-η)) ∧ 1` (unbounded delay).

use serde::{Deserialize, Serialize};

use crate::error::{MtemError, Result};
use crate::model::{delay_multiplicity_bound, stability_margin};
use crate::stability::roots::bisect_increasing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Bounded,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCertificate {
    pub regime: Regime,
    pub epsilon: f64,
    pub c_tilde0: f64,
    pub c_tilde: f64,
    /// Value of the defining equation at `c_tilde0` (exactly 0 for the closed form).
    pub residual: f64,
    pub window: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRateCertificate {
    pub regime: Regime,
    pub gamma0: Option<f64>,
    pub gamma_star: f64,
    pub residual: Option<f64>,
}

/// Open interval of admissible `ε`.
pub fn epsilon_window(lambda1: f64, lambda2: f64, eta: f64, regime: Regime) -> Result<(f64, f64)> {
    let margin = stability_margin(lambda1, lambda2, eta);
    if !(margin > 0.0) {
        return Err(MtemError::MarginNonPositive { margin });
    }
    let denom = (delay_multiplicity_bound(eta) + 1) as f64;
    let hi = margin / denom;
    let lo = match regime {
        Regime::Bounded => 0.0,
        Regime::Unbounded => ((margin - 1.0) / denom).max(0.0),
    };
    Ok((lo, hi))
}

pub fn window_midpoint(lambda1: f64, lambda2: f64, eta: f64, regime: Regime) -> Result<f64> {
    let (lo, hi) = epsilon_window(lambda1, lambda2, eta, regime)?;
    Ok(0.5 * (lo + hi))
}

fn check_epsilon(epsilon: f64, window: (f64, f64)) -> Result<()> {
    if epsilon > window.0 && epsilon < window.1 {
        Ok(())
    } else {
        Err(MtemError::EpsilonOutsideWindow {
            epsilon,
            lo: window.0,
            hi: window.1,
        })
    }
}

/// Bounded-delay rate `C̃0` by bisection on `F`.
pub fn solve_c_tilde_bounded(
    lambda1: f64,
    lambda2: f64,
    eta: f64,
    tau: f64,
    epsilon: f64,
    lambda0: f64,
) -> Result<RateCertificate> {
    let window = epsilon_window(lambda1, lambda2, eta, Regime::Bounded)?;
    check_epsilon(epsilon, window)?;
    if !(lambda0 > 0.0) || !(tau >= 0.0) {
        return Err(MtemError::InvalidArgument(format!(
            "need lambda0 > 0 and tau >= 0 (lambda0 = {lambda0}, tau = {tau})"
        )));
    }
    let m = delay_multiplicity_bound(eta) as f64;
    let f = |c: f64| c - (lambda1 - epsilon) + (lambda2 + epsilon) * m * (1.0 + tau).powf(c);
    let root = bisect_increasing(f, 0.0, 1.0)?;
    Ok(RateCertificate {
        regime: Regime::Bounded,
        epsilon,
        c_tilde0: root.x,
        c_tilde: root.x.min(lambda0),
        residual: root.residual,
        window: [window.0, window.1],
    })
}

/// Unbounded-delay rate `C̃0` in closed form, written as `margin - ε (M + 1)`.
pub fn c_tilde_unbounded(
    lambda1: f64,
    lambda2: f64,
    eta: f64,
    epsilon: f64,
    lambda0: f64,
) -> Result<RateCertificate> {
    let window = epsilon_window(lambda1, lambda2, eta, Regime::Unbounded)?;
    check_epsilon(epsilon, window)?;
    if !(lambda0 > 0.0) {
        return Err(MtemError::InvalidArgument(format!(
            "need lambda0 > 0, got {lambda0}"
        )));
    }
    let m = delay_multiplicity_bound(eta) as f64;
    let c0 = stability_margin(lambda1, lambda2, eta) - epsilon * (m + 1.0);
    debug_assert!(c0 > 0.0 && c0 < 1.0, "closed form left (0, 1): {c0}");
    Ok(RateCertificate {
        regime: Regime::Unbounded,
        epsilon,
        c_tilde0: c0,
        c_tilde: c0.min(lambda0),
        residual: 0.0,
        window: [window.0, window.1],
    })
}

/// Exact-solution rate for a bounded delay: `γ0` by bisection on `G`, `γ* = λ0 ∧ γ0`.
pub fn solve_gamma0_exact(
    lambda1: f64,
    lambda2: f64,
    eta: f64,
    tau: f64,
    lambda0: f64,
) -> Result<ExactRateCertificate> {
    let margin = lambda1 - lambda2 / (1.0 - eta);
    if !(margin > 0.0) {
        return Err(MtemError::MarginNonPositive { margin });
    }
    let g = |gamma: f64| {
        gamma - lambda1 + lambda2 * 1f64.max((1.0 + tau).powf(gamma - 1.0)) / (1.0 - eta)
    };
    let root = bisect_increasing(g, 0.0, 1.0)?;
    Ok(ExactRateCertificate {
        regime: Regime::Bounded,
        gamma0: Some(root.x),
        gamma_star: lambda0.min(root.x),
        residual: Some(root.residual),
    })
}

/// Exact-solution rate for an unbounded delay: `γ* = λ0 ∧ (λ1 - λ2/(1-η)) ∧ 1`.
pub fn gamma_star_unbounded(
    lambda1: f64,
    lambda2: f64,
    eta: f64,
    lambda0: f64,
) -> Result<ExactRateCertificate> {
    let margin = lambda1 - lambda2 / (1.0 - eta);
    if !(margin > 0.0) {
        return Err(MtemError::MarginNonPositive { margin });
    }
    Ok(ExactRateCertificate {
        regime: Regime::Unbounded,
        gamma0: None,
        gamma_star: lambda0.min(margin).min(1.0),
        residual: None,
    })
}
