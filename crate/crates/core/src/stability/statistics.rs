use serde::Serialize;

use crate::error::{MtemError, Result};
use crate::integrator::PathRecord;
use crate::linalg::{dot, pairwise_sum};

/// States below this norm are reported as `-inf` instead of taking a log.
pub const VANISHING_FLOOR: f64 = 1e-300;
/// Share of final steps used as the finite-horizon limsup proxy.
pub const TAIL_FRACTION: f64 = 0.1;

/// Per-step decay statistics of one path, defined for `k >= valid_from = 1`:
/// `log|X_k| / log(1 + kΔ)` and `log|X_k| / (kΔ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayStatistics {
    pub dt: f64,
    pub valid_from: usize,
    /// Entry `i` belongs to step `k = valid_from + i`.
    pub as_statistic: Vec<f64>,
    pub exp_statistic: Vec<f64>,
}

impl DecayStatistics {
    fn index(&self, k: usize) -> Option<usize> {
        k.checked_sub(self.valid_from)
            .filter(|&i| i < self.as_statistic.len())
    }

    pub fn as_at(&self, k: usize) -> Option<f64> {
        self.index(k).map(|i| self.as_statistic[i])
    }

    pub fn exp_at(&self, k: usize) -> Option<f64> {
        self.index(k).map(|i| self.exp_statistic[i])
    }

    pub fn last_step(&self) -> usize {
        self.valid_from + self.as_statistic.len() - 1
    }

    pub fn final_as(&self) -> f64 {
        self.as_statistic[self.as_statistic.len() - 1]
    }

    pub fn final_exp(&self) -> f64 {
        self.exp_statistic[self.exp_statistic.len() - 1]
    }

    /// Max of the almost-sure statistic over the final 10% of steps.
    pub fn tail_limsup(&self) -> f64 {
        tail_max(&self.as_statistic)
    }

    pub fn tail_limsup_exp(&self) -> f64 {
        tail_max(&self.exp_statistic)
    }

    /// Plot-data rows `(k, t, as_statistic, exp_statistic)`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64, f64)> + '_ {
        self.as_statistic
            .iter()
            .zip(&self.exp_statistic)
            .enumerate()
            .map(move |(i, (&a, &e))| {
                let k = self.valid_from + i;
                (k, k as f64 * self.dt, a, e)
            })
    }
}

fn tail_max(values: &[f64]) -> f64 {
    let len = values.len();
    let take = ((len as f64 * TAIL_FRACTION).ceil() as usize).clamp(1, len);
    values[len - take..]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn decay_statistics(path: &PathRecord) -> Result<DecayStatistics> {
    if path.grid.n_steps < 2 {
        return Err(MtemError::InvalidArgument(
            "decay statistics need at least 2 forward steps".into(),
        ));
    }
    let dt = path.grid.dt;
    let norms = path.forward_norms();
    let (mut as_statistic, mut exp_statistic) = (
        Vec::with_capacity(norms.len()),
        Vec::with_capacity(norms.len()),
    );
    for (k, &r) in norms.iter().enumerate().skip(1) {
        let t = k as f64 * dt;
        if r < VANISHING_FLOOR {
            as_statistic.push(f64::NEG_INFINITY);
            exp_statistic.push(f64::NEG_INFINITY);
        } else {
            let l = r.ln();
            as_statistic.push(l / t.ln_1p());
            exp_statistic.push(l / t);
        }
    }
    Ok(DecayStatistics {
        dt,
        valid_from: 1,
        as_statistic,
        exp_statistic,
    })
}

/// `(1 + kΔ)^C · mean_paths |X_k|^2` for `k = 0..=n_steps`. The mean uses a
/// fixed pairwise summation over paths in index order.
pub fn mean_square_statistic(ensemble: &[PathRecord], c: f64) -> Result<Vec<f64>> {
    let first = ensemble
        .first()
        .ok_or_else(|| MtemError::InconsistentEnsemble("empty ensemble".into()))?;
    if !(c >= 0.0 && c.is_finite()) {
        return Err(MtemError::InvalidArgument(format!(
            "weight exponent must be finite and >= 0, got {c}"
        )));
    }
    if ensemble
        .iter()
        .any(|p| p.grid != first.grid || p.dim != first.dim)
    {
        return Err(MtemError::InconsistentEnsemble(
            "paths do not share one grid".into(),
        ));
    }
    let grid = first.grid;
    let mut column = vec![0.0; ensemble.len()];
    let mut out = Vec::with_capacity(grid.n_steps + 1);
    for k in 0..=grid.n_steps as i64 {
        for (slot, p) in column.iter_mut().zip(ensemble) {
            let s = p.state(k)?;
            *slot = dot(s, s);
        }
        let mean = pairwise_sum(&column) / ensemble.len() as f64;
        out.push((1.0 + grid.time(k)).powf(c) * mean);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::SimulationGrid;

    fn synthetic(dt: f64, n: usize, f: impl Fn(f64) -> f64) -> PathRecord {
        let grid = SimulationGrid::new(dt, 0.0, n).unwrap();
        let rows: Vec<Vec<f64>> = (0..=n).map(|k| vec![f(k as f64 * dt)]).collect();
        PathRecord::from_states(grid, &rows).unwrap()
    }

    #[test]
    fn zero_path_gives_markers() {
        let p = synthetic(0.1, 10, |_| 0.0);
        let s = decay_statistics(&p).unwrap();
        assert_eq!(s.valid_from, 1);
        assert!(s.as_statistic.iter().all(|v| *v == f64::NEG_INFINITY));
        assert!(s.exp_statistic.iter().all(|v| *v == f64::NEG_INFINITY));
        assert!(!s.as_statistic.iter().any(|v| v.is_nan()));
    }

    #[test]
    fn inverse_time_path_has_unit_rate() {
        let p = synthetic(0.1, 100, |t| 1.0 / (1.0 + t));
        let s = decay_statistics(&p).unwrap();
        for v in &s.as_statistic {
            assert!((v + 1.0).abs() < 1e-12);
        }
        assert_eq!(s.as_at(0), None);
        assert!(s.as_at(100).is_some());
        assert_eq!(s.as_at(101), None);
    }

    #[test]
    fn too_short_path_rejected() {
        let p = synthetic(0.1, 1, |_| 1.0);
        assert!(decay_statistics(&p).is_err());
    }

    #[test]
    fn mean_square_of_zero_ensemble() {
        let p = synthetic(0.1, 10, |_| 0.0);
        let ms = mean_square_statistic(&[p.clone(), p], 0.5).unwrap();
        assert!(ms.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn mean_square_rejects_mixed_grids() {
        let a = synthetic(0.1, 10, |_| 1.0);
        let b = synthetic(0.1, 11, |_| 1.0);
        assert!(matches!(
            mean_square_statistic(&[a, b], 0.1),
            Err(MtemError::InconsistentEnsemble(_))
        ));
    }

    #[test]
    fn mean_square_weighting() {
        let a = synthetic(0.5, 4, |_| 1.0);
        let b = synthetic(0.5, 4, |_| 3.0);
        let ms = mean_square_statistic(&[a, b], 1.0).unwrap();
        for (k, v) in ms.iter().enumerate() {
            let expected = (1.0 + 0.5 * k as f64) * 5.0;
            assert!((v - expected).abs() < 1e-12);
        }
    }
}
