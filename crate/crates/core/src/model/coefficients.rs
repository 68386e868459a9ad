use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{MtemError, Result};
use crate::linalg::{all_finite, dot, Matrix};

pub type DriftFn = Arc<dyn Fn(&[f64], &[f64], f64) -> Vec<f64> + Send + Sync>;
pub type DiffusionFn = Arc<dyn Fn(&[f64], &[f64], f64) -> Matrix + Send + Sync>;
pub type EnvelopeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Declared constants of the one-sided growth bound
/// `2<x, f> + |g|^2 <= (K (1+t)^{-λ0} - λ1 |x|^2 + λ2 |y|^2) / (1+t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralConstants {
    #[serde(rename = "K")]
    pub k: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl StructuralConstants {
    pub fn validate(&self) -> Result<()> {
        let ok = self.k >= 0.0
            && self.lambda0 > 0.0
            && self.lambda1 > 0.0
            && self.lambda2 >= 0.0
            && [self.k, self.lambda0, self.lambda1, self.lambda2]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(MtemError::InvalidArgument(format!(
                "structural constants out of range: {self:?}"
            )))
        }
    }

    /// Right-hand side of the growth bound at `(x, y, t)`.
    pub fn growth_bound(&self, x: &[f64], y: &[f64], t: f64) -> f64 {
        (self.k * (1.0 + t).powf(-self.lambda0) - self.lambda1 * dot(x, x)
            + self.lambda2 * dot(y, y))
            / (1.0 + t)
    }
}

/// Drift `f: R^n x R^n x [0,∞) -> R^n`, diffusion `g: -> R^{n x d}`, the
/// local Lipschitz envelope `L_{R,t}` and the declared growth constants.
#[derive(Clone)]
pub struct CoefficientSet {
    n: usize,
    d: usize,
    drift: DriftFn,
    diffusion: DiffusionFn,
    lipschitz: EnvelopeFn,
    constants: StructuralConstants,
}

impl CoefficientSet {
    pub fn new<F, G, L>(
        n: usize,
        d: usize,
        drift: F,
        diffusion: G,
        lipschitz: L,
        constants: StructuralConstants,
    ) -> Result<Self>
    where
        F: Fn(&[f64], &[f64], f64) -> Vec<f64> + Send + Sync + 'static,
        G: Fn(&[f64], &[f64], f64) -> Matrix + Send + Sync + 'static,
        L: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if n == 0 || d == 0 {
            return Err(MtemError::InvalidArgument(
                "state and noise dimensions must be positive".into(),
            ));
        }
        constants.validate()?;
        Ok(Self {
            n,
            d,
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            lipschitz: Arc::new(lipschitz),
            constants,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn noise_dim(&self) -> usize {
        self.d
    }

    pub fn constants(&self) -> &StructuralConstants {
        &self.constants
    }

    pub fn with_constants(mut self, constants: StructuralConstants) -> Result<Self> {
        constants.validate()?;
        self.constants = constants;
        Ok(self)
    }

    pub fn drift(&self, x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
        (self.drift)(x, y, t)
    }

    pub fn diffusion(&self, x: &[f64], y: &[f64], t: f64) -> Matrix {
        (self.diffusion)(x, y, t)
    }

    pub fn lipschitz(&self, r: f64, t: f64) -> f64 {
        (self.lipschitz)(r, t)
    }

    /// `2<x, f(x,y,t)> + |g(x,y,t)|_F^2`, failing on non-finite coefficient output.
    pub fn growth_lhs(&self, x: &[f64], y: &[f64], t: f64) -> Result<f64> {
        let f = self.drift(x, y, t);
        let g = self.diffusion(x, y, t);
        if !all_finite(&f) || !g.is_finite() {
            return Err(MtemError::CoefficientOverflow {
                x: x.to_vec(),
                y: y.to_vec(),
                t,
            });
        }
        let gf = g.frobenius();
        Ok(2.0 * dot(x, &f) + gf * gf)
    }
}

impl fmt::Debug for CoefficientSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSet")
            .field("n", &self.n)
            .field("d", &self.d)
            .field("constants", &self.constants)
            .finish_non_exhaustive()
    }
}
