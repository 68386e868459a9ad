//! Scalar polynomial coefficient family usable from data-only configs.
//!
//! ```text
//! f(x, y, t)   = Σ c_i x^{a_i} y^{b_i} / (1 + t)
//! g(x, y, t)   = sqrt( Σ c_j x^{a_j} y^{b_j} / (1 + t) )
//! L_{R,t}      = Σ c_k R^{p_k} / (1 + t)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{MtemError, Result};
use crate::linalg::Matrix;
use crate::model::{CoefficientSet, StructuralConstants};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub c: f64,
    #[serde(default)]
    pub x: u32,
    #[serde(default)]
    pub y: u32,
}

impl Monomial {
    pub fn new(c: f64, x: u32, y: u32) -> Self {
        Self { c, x, y }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        self.c * x.powi(self.x as i32) * y.powi(self.y as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusTerm {
    pub c: f64,
    pub p: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialCoefficients {
    pub drift: Vec<Monomial>,
    /// Terms of `g^2 (1 + t)`; the diffusion is the square root of their sum over `1 + t`.
    pub diffusion_sq: Vec<Monomial>,
    pub lipschitz: Vec<RadiusTerm>,
    #[serde(flatten)]
    pub constants: StructuralConstants,
}

impl PolynomialCoefficients {
    /// Coefficients of the two worked examples:
    /// `f = (-2x + y/2 - x^3 - x y^4)/(1+t)`,
    /// `g = sqrt((2 x^2 y^4 + y^2/2 + 2 x^4)/(1+t))`,
    /// `L_{R,t} = 5 (R^4 + 2)/(1+t)`, with `K = 0`, `λ1 = 7/2`, `λ2 = 1`.
    pub fn worked_example(lambda0: f64) -> Self {
        Self {
            drift: vec![
                Monomial::new(-2.0, 1, 0),
                Monomial::new(0.5, 0, 1),
                Monomial::new(-1.0, 3, 0),
                Monomial::new(-1.0, 1, 4),
            ],
            diffusion_sq: vec![
                Monomial::new(2.0, 2, 4),
                Monomial::new(0.5, 0, 2),
                Monomial::new(2.0, 4, 0),
            ],
            lipschitz: vec![RadiusTerm { c: 5.0, p: 4 }, RadiusTerm { c: 10.0, p: 0 }],
            constants: StructuralConstants {
                k: 0.0,
                lambda0,
                lambda1: 3.5,
                lambda2: 1.0,
            },
        }
    }

    pub fn to_coefficient_set(&self) -> Result<CoefficientSet> {
        if self.lipschitz.iter().any(|r| r.c < 0.0) {
            return Err(MtemError::InvalidArgument(
                "lipschitz envelope terms must have nonnegative coefficients".into(),
            ));
        }
        let drift = self.drift.clone();
        let diffusion = self.diffusion_sq.clone();
        let envelope = self.lipschitz.clone();
        CoefficientSet::new(
            1,
            1,
            move |x, y, t| {
                let s: f64 = drift.iter().map(|m| m.eval(x[0], y[0])).sum();
                vec![s / (1.0 + t)]
            },
            move |x, y, t| {
                let s: f64 = diffusion.iter().map(|m| m.eval(x[0], y[0])).sum();
                // A negative radicand yields NaN, which callers report as coefficient overflow.
                Matrix::column(vec![(s / (1.0 + t)).sqrt()])
            },
            move |r, t| {
                envelope
                    .iter()
                    .map(|c| c.c * r.powi(c.p as i32))
                    .sum::<f64>()
                    / (1.0 + t)
            },
            self.constants,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_values() {
        let c = PolynomialCoefficients::worked_example(1.0)
            .to_coefficient_set()
            .unwrap();
        // f(2,0,0) = (-4 - 8)/1
        assert_eq!(c.drift(&[2.0], &[0.0], 0.0), vec![-12.0]);
        assert_eq!(c.diffusion(&[2.0], &[0.0], 0.0).get(0, 0), 32f64.sqrt());
        assert_eq!(c.lipschitz(1.0, 0.0), 15.0);
        assert_eq!(c.drift(&[0.0], &[0.0], 3.0), vec![0.0]);
    }

    #[test]
    fn growth_lhs_matches_closed_form() {
        let c = PolynomialCoefficients::worked_example(1.0)
            .to_coefficient_set()
            .unwrap();
        for &(x, y, t) in &[(1.0, 1.0, 0.0), (-2.0, 0.5, 3.0), (0.3, -1.7, 10.0)] {
            let expected = (-4.0 * x * x + x * y + 0.5 * y * y) / (1.0 + t);
            let got = c.growth_lhs(&[x], &[y], t).unwrap();
            assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        }
    }
}
