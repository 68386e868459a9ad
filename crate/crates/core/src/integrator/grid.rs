use serde::{Deserialize, Serialize};

use crate::error::{MtemError, Result};

const RATIO_TOLERANCE: f64 = 1e-9;

/// Uniform grid with `m` history points (`τ = m Δ`) and `n_steps` forward steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationGrid {
    pub dt: f64,
    pub m: usize,
    pub n_steps: usize,
}

impl SimulationGrid {
    /// Fails unless `τ/Δ` is within `1e-9` of an integer; the error lists
    /// nearby admissible step sizes.
    pub fn new(dt: f64, tau: f64, n_steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(MtemError::InvalidArgument(format!(
                "dt must be positive and finite, got {dt}"
            )));
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(MtemError::InvalidArgument(format!(
                "tau must be finite and >= 0, got {tau}"
            )));
        }
        if n_steps == 0 {
            return Err(MtemError::InvalidArgument("n_steps must be >= 1".into()));
        }
        let ratio = tau / dt;
        let m = ratio.round();
        if (ratio - m).abs() > RATIO_TOLERANCE {
            return Err(MtemError::GridNotAdmissible {
                tau,
                dt,
                ratio,
                suggestions: admissible_steps(tau, dt),
            });
        }
        Ok(Self {
            dt,
            m: m as usize,
            n_steps,
        })
    }

    pub fn tau(&self) -> f64 {
        self.m as f64 * self.dt
    }

    /// `t_k = k Δ` (negative for history indices).
    pub fn time(&self, k: i64) -> f64 {
        k as f64 * self.dt
    }

    /// Number of stored states, `m + n_steps + 1`.
    pub fn len(&self) -> usize {
        self.m + self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The first four step sizes `τ/m` no larger than `dt` that have a short
/// terminating decimal expansion (at most six digits), e.g. for `τ = 1`,
/// `dt = 0.3`: `[0.25, 0.2, 0.125, 0.1]`. Falls back to `τ/⌈τ/dt⌉` alone.
pub fn admissible_steps(tau: f64, dt: f64) -> Vec<f64> {
    if !(tau > 0.0 && dt > 0.0) {
        return Vec::new();
    }
    let first = (tau / dt).ceil().max(1.0) as u64;
    let mut out: Vec<f64> = (first..first.saturating_mul(64).max(first + 1))
        .map(|m| tau / m as f64)
        .filter(|&s| {
            let scaled = s * 1e6;
            (scaled - scaled.round()).abs() < 1e-6
        })
        .take(4)
        .map(|s| (s * 1e6).round() / 1e6)
        .collect();
    if out.is_empty() {
        out.push(tau / first as f64);
    }
    out
}
