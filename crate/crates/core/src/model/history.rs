use std::fmt;
use std::sync::Arc;

use crate::error::{MtemError, Result};
use crate::linalg::norm;

pub type HistoryFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Initial segment `ξ(θ)`, `θ ∈ [-τ, 0]`.
#[derive(Clone)]
pub struct InitialHistory {
    xi: HistoryFn,
    tau: f64,
    n: usize,
}

impl InitialHistory {
    pub fn new<F>(n: usize, tau: f64, xi: F) -> Result<Self>
    where
        F: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        if n == 0 || !(tau >= 0.0 && tau.is_finite()) {
            return Err(MtemError::InvalidArgument(format!(
                "history needs n > 0 and finite tau >= 0 (n = {n}, tau = {tau})"
            )));
        }
        Ok(Self {
            xi: Arc::new(xi),
            tau,
            n,
        })
    }

    /// `ξ(θ) ≡ value` on `[-τ, 0]`.
    pub fn constant(value: Vec<f64>, tau: f64) -> Result<Self> {
        let n = value.len();
        Self::new(n, tau, move |_| value.clone())
    }

    /// Point initial value `x(0) = x0` with an empty history segment (`τ = 0`).
    pub fn point(x0: Vec<f64>) -> Result<Self> {
        Self::constant(x0, 0.0)
    }

    pub fn eval(&self, theta: f64) -> Vec<f64> {
        (self.xi)(theta)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Sampled `sup_θ |ξ(θ)|` over `samples + 1` equispaced points.
    pub fn sup_norm(&self, samples: usize) -> f64 {
        self.sample_points(samples)
            .map(|theta| norm(&self.eval(theta)))
            .fold(0.0, f64::max)
    }

    pub(crate) fn sample_points(&self, samples: usize) -> impl Iterator<Item = f64> + '_ {
        let samples = samples.max(1);
        let tau = self.tau;
        (0..=samples).map(move |i| -tau + tau * i as f64 / samples as f64)
    }
}

impl fmt::Debug for InitialHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialHistory")
            .field("n", &self.n)
            .field("tau", &self.tau)
            .field("xi(0)", &self.eval(0.0))
            .finish()
    }
}
