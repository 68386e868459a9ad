//! Radial truncation of the coefficients onto the ball of radius `h(Δ)`.
//!
//! For `|x| ∨ |y| > h(Δ)` the truncated drift is
//!
//! ```text
//! f_Δ(x, y, t) = (|x| ∨ |y|) / h(Δ) · f( h(Δ) x / (|x| ∨ |y|), h(Δ) y / (|x| ∨ |y|), t )
//! ```
//!
//! and `f_Δ = f` inside the (closed) ball; `g_Δ` is built the same way. The
//! truncated pair is globally Lipschitz with constant `5 L_{h(Δ),t}` and keeps
//! a dissipativity bound whose constants degrade by `K / h(Δ)^2`; both facts
//! are exposed as witness functions that tests can sample.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{MtemError, Result};
use crate::linalg::{all_finite, distance, dot, norm, Matrix};
use crate::model::{CoefficientSet, StructuralConstants};

pub type LevelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Serializable description of a policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PolicyKind {
    /// `h(Δ) = Δ^{-exponent}`.
    Power {
        exponent: f64,
    },
    Custom,
}

/// Strictly decreasing `h: (0, Δ*] -> (0, ∞)` with `h(Δ) -> ∞` as `Δ -> 0`.
#[derive(Clone)]
pub struct TruncationPolicy {
    h: LevelFn,
    h_inverse: Option<LevelFn>,
    delta_star: f64,
    kind: PolicyKind,
}

impl TruncationPolicy {
    /// `h(Δ) = Δ^{-exponent}` on `(0, 1]`, with inverse `R^{-1/exponent}`.
    pub fn power(exponent: f64) -> Result<Self> {
        Self::power_on(exponent, 1.0)
    }

    pub fn power_on(exponent: f64, delta_star: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(MtemError::InvalidArgument(format!(
                "power policy exponent must be positive, got {exponent}"
            )));
        }
        if !(delta_star > 0.0 && delta_star.is_finite()) {
            return Err(MtemError::InvalidArgument(format!(
                "delta_star must be positive, got {delta_star}"
            )));
        }
        Ok(Self {
            h: Arc::new(move |dt: f64| dt.powf(-exponent)),
            h_inverse: Some(Arc::new(move |r: f64| r.powf(-1.0 / exponent))),
            delta_star,
            kind: PolicyKind::Power { exponent },
        })
    }

    pub fn custom<H>(h: H, h_inverse: Option<LevelFn>, delta_star: f64) -> Result<Self>
    where
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(delta_star > 0.0 && delta_star.is_finite()) {
            return Err(MtemError::InvalidArgument(format!(
                "delta_star must be positive, got {delta_star}"
            )));
        }
        Ok(Self {
            h: Arc::new(h),
            h_inverse,
            delta_star,
            kind: PolicyKind::Custom,
        })
    }

    pub fn kind(&self) -> &PolicyKind {
        &self.kind
    }

    pub fn delta_star(&self) -> f64 {
        self.delta_star
    }

    /// Truncation level `h(Δ)` for a step size inside `(0, Δ*]`.
    pub fn level(&self, dt: f64) -> Result<f64> {
        if !(dt > 0.0 && dt <= self.delta_star) {
            return Err(MtemError::InvalidArgument(format!(
                "step size {dt} outside policy domain (0, {}]",
                self.delta_star
            )));
        }
        let level = (self.h)(dt);
        if !(level > 0.0 && level.is_finite()) {
            return Err(MtemError::InvalidArgument(format!(
                "h({dt}) = {level} is not a positive finite level"
            )));
        }
        Ok(level)
    }

    /// `h^{-1}(R)`.
    pub fn inverse(&self, r: f64) -> Result<f64> {
        self.h_inverse
            .as_ref()
            .map(|inv| inv(r))
            .ok_or(MtemError::PolicyInverseUnavailable)
    }

    /// Sampled check of the policy invariants: strictly decreasing on a grid of
    /// `(0, Δ*]`, and `h(Δ*/2^k)` increasing for `k = 0..=20`. Returns the first
    /// violating pair of step sizes, if any.
    pub fn check_monotone(&self, samples: usize) -> Option<(f64, f64)> {
        let samples = samples.max(2);
        let grid: Vec<f64> = (1..=samples)
            .map(|i| self.delta_star * i as f64 / samples as f64)
            .collect();
        let halvings: Vec<f64> = (0..=20)
            .rev()
            .map(|k| self.delta_star / 2f64.powi(k))
            .collect();
        for seq in [&grid, &halvings] {
            for w in seq.windows(2) {
                if (self.h)(w[0]) <= (self.h)(w[1]) {
                    return Some((w[0], w[1]));
                }
            }
        }
        None
    }

    /// Binds the policy to a step size.
    pub fn truncate(&self, base: &CoefficientSet, dt: f64) -> Result<TruncatedCoefficients> {
        TruncatedCoefficients::new(base.clone(), self.level(dt)?)
    }
}

impl fmt::Debug for TruncationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncationPolicy")
            .field("kind", &self.kind)
            .field("delta_star", &self.delta_star)
            .field("has_inverse", &self.h_inverse.is_some())
            .finish()
    }
}

/// Result of projecting `(x, y)` onto the truncation ball.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationFactor {
    /// `1` inside the ball, `level / (|x| ∨ |y|)` outside.
    pub a: f64,
    pub scaled_x: Vec<f64>,
    pub scaled_y: Vec<f64>,
}

impl TruncationFactor {
    pub fn is_identity(&self) -> bool {
        self.a == 1.0
    }
}

pub fn truncation_factor(x: &[f64], y: &[f64], level: f64) -> Result<TruncationFactor> {
    if !all_finite(x) || !all_finite(y) {
        return Err(MtemError::NonFiniteState);
    }
    if !(level > 0.0 && level.is_finite()) {
        return Err(MtemError::InvalidArgument(format!(
            "truncation level must be positive and finite, got {level}"
        )));
    }
    let radius = norm(x).max(norm(y));
    // Boundary belongs to the identity branch.
    if radius <= level {
        return Ok(TruncationFactor {
            a: 1.0,
            scaled_x: x.to_vec(),
            scaled_y: y.to_vec(),
        });
    }
    let a = level / radius;
    Ok(TruncationFactor {
        a,
        scaled_x: x.iter().map(|v| a * v).collect(),
        scaled_y: y.iter().map(|v| a * v).collect(),
    })
}

/// A coefficient set paired with a fixed truncation level `h(Δ)`.
#[derive(Debug, Clone)]
pub struct TruncatedCoefficients {
    base: CoefficientSet,
    level: f64,
}

impl TruncatedCoefficients {
    pub fn new(base: CoefficientSet, level: f64) -> Result<Self> {
        if !(level > 0.0 && level.is_finite()) {
            return Err(MtemError::InvalidArgument(format!(
                "truncation level must be positive and finite, got {level}"
            )));
        }
        Ok(Self { base, level })
    }

    pub fn base(&self) -> &CoefficientSet {
        &self.base
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    fn overflow(x: &[f64], y: &[f64], t: f64) -> MtemError {
        MtemError::CoefficientOverflow {
            x: x.to_vec(),
            y: y.to_vec(),
            t,
        }
    }

    /// `f_Δ(x, y, t)`.
    pub fn drift(&self, x: &[f64], y: &[f64], t: f64) -> Result<Vec<f64>> {
        let tf = truncation_factor(x, y, self.level)?;
        let mut f = self.base.drift(&tf.scaled_x, &tf.scaled_y, t);
        if !tf.is_identity() {
            f.iter_mut().for_each(|v| *v /= tf.a);
        }
        if !all_finite(&f) {
            return Err(Self::overflow(x, y, t));
        }
        Ok(f)
    }

    /// `g_Δ(x, y, t)`.
    pub fn diffusion(&self, x: &[f64], y: &[f64], t: f64) -> Result<Matrix> {
        let tf = truncation_factor(x, y, self.level)?;
        let mut g = self.base.diffusion(&tf.scaled_x, &tf.scaled_y, t);
        if !tf.is_identity() {
            g = g.scaled(1.0 / tf.a);
        }
        if !g.is_finite() {
            return Err(Self::overflow(x, y, t));
        }
        Ok(g)
    }

    /// Both truncated coefficients from a single projection.
    pub fn evaluate(&self, x: &[f64], y: &[f64], t: f64) -> Result<(Vec<f64>, Matrix)> {
        let tf = truncation_factor(x, y, self.level)?;
        let mut f = self.base.drift(&tf.scaled_x, &tf.scaled_y, t);
        let mut g = self.base.diffusion(&tf.scaled_x, &tf.scaled_y, t);
        if !tf.is_identity() {
            let inv = 1.0 / tf.a;
            f.iter_mut().for_each(|v| *v *= inv);
            g = g.scaled(inv);
        }
        if !all_finite(&f) || !g.is_finite() {
            return Err(Self::overflow(x, y, t));
        }
        Ok((f, g))
    }

    /// `|f_Δ(x,y,t) - f_Δ(x̄,ȳ,t)| / (L_{h,t} (|x - x̄| + |y - ȳ|))`, which the
    /// global Lipschitz bound of the truncated drift caps at 5.
    pub fn lipschitz_witness(
        &self,
        x: &[f64],
        y: &[f64],
        xb: &[f64],
        yb: &[f64],
        t: f64,
    ) -> Result<f64> {
        let (numerator, sep) = {
            let f1 = self.drift(x, y, t)?;
            let f2 = self.drift(xb, yb, t)?;
            (distance(&f1, &f2), distance(x, xb) + distance(y, yb))
        };
        self.witness_ratio(numerator, sep, t)
    }

    /// Diffusion counterpart of [`lipschitz_witness`](Self::lipschitz_witness), in Frobenius norm.
    pub fn lipschitz_witness_diffusion(
        &self,
        x: &[f64],
        y: &[f64],
        xb: &[f64],
        yb: &[f64],
        t: f64,
    ) -> Result<f64> {
        let g1 = self.diffusion(x, y, t)?;
        let g2 = self.diffusion(xb, yb, t)?;
        let sep = distance(x, xb) + distance(y, yb);
        self.witness_ratio(g1.sub(&g2).frobenius(), sep, t)
    }

    fn witness_ratio(&self, numerator: f64, sep: f64, t: f64) -> Result<f64> {
        let denom = self.base.lipschitz(self.level, t) * sep;
        if sep == 0.0 || denom == 0.0 {
            return Err(MtemError::CoincidentInputs);
        }
        Ok(numerator / denom)
    }

    /// `[2<x, f_Δ> + |g_Δ|_F^2] - [K(1+t)^{-λ0} - (λ1 - K/h^2)|x|^2 + (λ2 + K/h^2)|y|^2]/(1+t)`,
    /// nonpositive whenever the untruncated growth bound holds with `constants`.
    pub fn dissipativity_witness(
        &self,
        x: &[f64],
        y: &[f64],
        t: f64,
        constants: &StructuralConstants,
    ) -> Result<f64> {
        let (f, g) = self.evaluate(x, y, t)?;
        let gf = g.frobenius();
        let lhs = 2.0 * dot(x, &f) + gf * gf;
        let shift = constants.k / (self.level * self.level);
        let rhs = (constants.k * (1.0 + t).powf(-constants.lambda0)
            - (constants.lambda1 - shift) * dot(x, x)
            + (constants.lambda2 + shift) * dot(y, y))
            / (1.0 + t);
        Ok(lhs - rhs)
    }
}
