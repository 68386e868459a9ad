use std::fmt;
use std::sync::Arc;

use crate::error::{MtemError, Result};

pub type DelayFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Time-dependent delay `δ(t)` with a declared derivative bound `δ'(t) ≤ η < 1`.
///
/// The declared values (`tau`, `eta`, `bound`) are not verified at construction;
/// [`validate_problem`](crate::model::validate_problem) falsifies them by sampling.
#[derive(Clone)]
pub struct DelayFunction {
    eval: DelayFn,
    eta: f64,
    tau: f64,
    bound: Option<f64>,
}

impl DelayFunction {
    /// `bound` is `Some(sup δ)` for a bounded delay and `None` for an unbounded one.
    pub fn new<F>(eval: F, tau: f64, eta: f64, bound: Option<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(0.0..1.0).contains(&eta) {
            return Err(MtemError::InvalidArgument(format!(
                "eta must lie in [0, 1), got {eta}"
            )));
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(MtemError::InvalidArgument(format!(
                "tau must be finite and >= 0, got {tau}"
            )));
        }
        Ok(Self {
            eval: Arc::new(eval),
            eta,
            tau,
            bound,
        })
    }

    /// `δ(t) ≡ τ`.
    pub fn constant(tau: f64) -> Result<Self> {
        Self::new(move |_| tau, tau, 0.0, Some(tau))
    }

    /// Pantograph delay `δ(t) = t - q t`, so the delayed time is `q t`.
    /// Unbounded, `τ = 0`, `η = 1 - q`.
    pub fn pantograph(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(MtemError::InvalidArgument(format!(
                "pantograph ratio q must lie in (0, 1), got {q}"
            )));
        }
        Self::new(move |t| t - q * t, 0.0, 1.0 - q, None)
    }

    /// `δ(t) = τ + c (1 - e^{-t})`, increasing from `τ` to `τ + c` with `δ' ≤ c`.
    pub fn saturating(tau: f64, c: f64) -> Result<Self> {
        if !(c >= 0.0) {
            return Err(MtemError::InvalidArgument(format!(
                "saturating delay requires c >= 0, got {c}"
            )));
        }
        Self::new(move |t| tau + c * (1.0 - (-t).exp()), tau, c, Some(tau + c))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_bounded(&self) -> bool {
        self.bound.is_some()
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }
}

impl fmt::Debug for DelayFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DelayFunction")
            .field("tau", &self.tau)
            .field("eta", &self.eta)
            .field("bound", &self.bound)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pantograph_delayed_time_is_q_t() {
        let d = DelayFunction::pantograph(0.5).unwrap();
        assert_eq!(d.eval(2.0), 1.0);
        assert_eq!(d.tau(), 0.0);
        assert_eq!(d.eta(), 0.5);
        assert!(!d.is_bounded());
    }

    #[test]
    fn saturating_starts_at_tau() {
        let d = DelayFunction::saturating(1.0, 0.5).unwrap();
        assert_eq!(d.eval(0.0), 1.0);
        assert!((d.eval(1.0) - (1.5 - 0.5 * (-1f64).exp())).abs() < 1e-15);
        assert_eq!(d.bound(), Some(1.5));
    }

    #[test]
    fn rejects_eta_at_one() {
        assert!(DelayFunction::new(|t| t, 0.0, 1.0, None).is_err());
        assert!(DelayFunction::pantograph(1.0).is_err());
    }
}
