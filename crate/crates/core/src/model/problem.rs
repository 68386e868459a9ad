use serde::Serialize;

use crate::error::{MtemError, Result};
use crate::linalg::guarded_floor;
use crate::model::{CoefficientSet, DelayFunction, InitialHistory};
use crate::truncation::TruncationPolicy;

/// `⌊(1-η)^{-1}⌋ + 1`: the maximum number of grid indices that can share the
/// same delayed index, which also multiplies `λ2` in the stability margin.
pub fn delay_multiplicity_bound(eta: f64) -> i64 {
    guarded_floor(1.0 / (1.0 - eta), 1e-12) + 1
}

/// A stochastic delay differential equation
/// `dx = f(x(t), x(t-δ(t)), t) dt + g(x(t), x(t-δ(t)), t) dB(t)` with its initial segment.
#[derive(Debug, Clone)]
pub struct SddeProblem {
    coefficients: CoefficientSet,
    delay: DelayFunction,
    history: InitialHistory,
}

impl SddeProblem {
    pub fn new(
        coefficients: CoefficientSet,
        delay: DelayFunction,
        history: InitialHistory,
    ) -> Result<Self> {
        if (history.tau() - delay.tau()).abs() > 1e-12 * delay.tau().max(1.0) {
            return Err(MtemError::InvalidArgument(format!(
                "history tau {} does not match delay tau {}",
                history.tau(),
                delay.tau()
            )));
        }
        if history.dim() != coefficients.dim() {
            return Err(MtemError::InvalidArgument(format!(
                "history dimension {} does not match state dimension {}",
                history.dim(),
                coefficients.dim()
            )));
        }
        Ok(Self {
            coefficients,
            delay,
            history,
        })
    }

    pub fn coefficients(&self) -> &CoefficientSet {
        &self.coefficients
    }

    pub fn delay(&self) -> &DelayFunction {
        &self.delay
    }

    pub fn history(&self) -> &InitialHistory {
        &self.history
    }

    pub fn tau(&self) -> f64 {
        self.delay.tau()
    }

    pub fn with_history(&self, history: InitialHistory) -> Result<Self> {
        Self::new(self.coefficients.clone(), self.delay.clone(), history)
    }

    /// `λ1 - λ2 (⌊(1-η)^{-1}⌋ + 1)`. The discrete stability results need it positive.
    pub fn stability_margin(&self) -> f64 {
        let c = self.coefficients.constants();
        stability_margin(c.lambda1, c.lambda2, self.delay.eta())
    }

    /// Worst residual of the growth bound over `points`; the bound holds when
    /// the result is `<= 1e-9`.
    pub fn check_khasminskii(&self, points: &[(Vec<f64>, Vec<f64>, f64)]) -> Result<f64> {
        if points.is_empty() {
            return Err(MtemError::InvalidArgument("no sample points".into()));
        }
        let c = self.coefficients.constants();
        let mut worst = f64::NEG_INFINITY;
        for (x, y, t) in points {
            if *t < 0.0 {
                return Err(MtemError::InvalidArgument(format!("negative time {t}")));
            }
            let lhs = self.coefficients.growth_lhs(x, y, *t)?;
            worst = worst.max(lhs - c.growth_bound(x, y, *t));
        }
        Ok(worst)
    }

    /// Tabulates `s(R) = max_t (1+t) L_{R,t}^2 h^{-1}(R)` over the sampled radii.
    pub fn check_truncation_compatibility(
        &self,
        policy: &TruncationPolicy,
        r_values: &[f64],
        t_grid: &[f64],
    ) -> Result<CompatibilityReport> {
        if r_values.is_empty() || r_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MtemError::InvalidArgument(
                "r_values must be nonempty and strictly increasing".into(),
            ));
        }
        if t_grid.is_empty() {
            return Err(MtemError::InvalidArgument("t_grid must be nonempty".into()));
        }
        let mut values = Vec::with_capacity(r_values.len());
        for &r in r_values {
            let inv = policy.inverse(r)?;
            let s = t_grid
                .iter()
                .map(|&t| {
                    let l = self.coefficients.lipschitz(r, t);
                    (1.0 + t) * l * l * inv
                })
                .fold(f64::NEG_INFINITY, f64::max);
            values.push(s);
        }
        Ok(CompatibilityReport::from_values(r_values.to_vec(), values))
    }
}

pub fn stability_margin(lambda1: f64, lambda2: f64, eta: f64) -> f64 {
    lambda1 - lambda2 * delay_multiplicity_bound(eta) as f64
}

/// Sampled tail of `s(R)`; "decreasing" means the last value is below both
/// the first value and `COMPATIBILITY_TOLERANCE`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub r_values: Vec<f64>,
    pub values: Vec<f64>,
    pub decreasing: bool,
    pub strictly_decreasing: bool,
}

pub const COMPATIBILITY_TOLERANCE: f64 = 1e-2;

impl CompatibilityReport {
    fn from_values(r_values: Vec<f64>, values: Vec<f64>) -> Self {
        let first = values[0];
        let last = values[values.len() - 1];
        let decreasing =
            values.iter().all(|v| v.is_finite()) && last < first && last < COMPATIBILITY_TOLERANCE;
        let strictly_decreasing = values.windows(2).all(|w| w[1] < w[0]);
        Self {
            r_values,
            values,
            decreasing,
            strictly_decreasing,
        }
    }
}
