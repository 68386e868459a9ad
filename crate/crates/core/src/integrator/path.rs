use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{MtemError, Result};
use crate::integrator::SimulationGrid;
use crate::linalg::norm;

/// One simulated trajectory `X_k`, `k = -m, ..., n_steps`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub grid: SimulationGrid,
    pub dim: usize,
    pub master_seed: u64,
    pub path_index: u64,
    pub truncation_level: f64,
    states: Vec<f64>,
}

impl PathRecord {
    pub(crate) fn new(
        grid: SimulationGrid,
        dim: usize,
        master_seed: u64,
        path_index: u64,
        truncation_level: f64,
        states: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(states.len(), grid.len() * dim);
        Self {
            grid,
            dim,
            master_seed,
            path_index,
            truncation_level,
            states,
        }
    }

    /// Builds a record from explicit states, one row per `k = -m..=n_steps`.
    /// Used for synthetic paths.
    pub fn from_states(grid: SimulationGrid, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != grid.len() {
            return Err(MtemError::InvalidArgument(format!(
                "expected {} states, got {}",
                grid.len(),
                rows.len()
            )));
        }
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(MtemError::InvalidArgument("ragged or empty states".into()));
        }
        Ok(Self::new(grid, dim, 0, 0, f64::INFINITY, rows.concat()))
    }

    fn offset(&self, index: i64) -> Result<usize> {
        let m = self.grid.m as i64;
        if index < -m {
            return Err(MtemError::IndexBeforeHistory {
                index,
                m: self.grid.m,
            });
        }
        if index > self.grid.n_steps as i64 {
            return Err(MtemError::IndexAfterRecord {
                index,
                max: self.grid.n_steps,
            });
        }
        Ok((index + m) as usize * self.dim)
    }

    /// `X_index`; non-positive indices read the initial history segment.
    pub fn state(&self, index: i64) -> Result<&[f64]> {
        let o = self.offset(index)?;
        Ok(&self.states[o..o + self.dim])
    }

    pub fn final_state(&self) -> &[f64] {
        &self.states[self.states.len() - self.dim..]
    }

    /// `(k, X_k)` for `k = -m..=n_steps`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &[f64])> {
        let m = self.grid.m as i64;
        self.states
            .chunks_exact(self.dim)
            .enumerate()
            .map(move |(i, s)| (i as i64 - m, s))
    }

    /// `|X_k|` for `k = 0..=n_steps`.
    pub fn forward_norms(&self) -> Vec<f64> {
        self.iter()
            .filter(|(k, _)| *k >= 0)
            .map(|(_, s)| norm(s))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.states.iter().all(|v| v.is_finite())
    }

    pub fn raw_states(&self) -> &[f64] {
        &self.states
    }

    fn header(dim: usize, with_path: bool) -> Vec<String> {
        let mut h = Vec::with_capacity(dim + 3);
        if with_path {
            h.push("path_index".to_string());
        }
        h.push("k".into());
        h.push("t".into());
        h.extend((1..=dim).map(|i| format!("x_{i}")));
        h
    }

    fn write_rows<W: Write>(&self, w: &mut csv::Writer<W>, with_path: bool) -> Result<()> {
        let mut row = Vec::with_capacity(self.dim + 3);
        for (k, s) in self.iter() {
            row.clear();
            if with_path {
                row.push(self.path_index.to_string());
            }
            row.push(k.to_string());
            row.push(format_float(self.grid.time(k)));
            row.extend(s.iter().map(|&v| format_float(v)));
            w.write_record(&row)?;
        }
        Ok(())
    }

    /// CSV with columns `k, t, x_1..x_n`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::header(self.dim, false))?;
        self.write_rows(&mut w, false)?;
        w.flush()?;
        Ok(())
    }

    /// JSON with grid metadata and a `states` array of rows (`k = -m` first).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "grid": self.grid,
            "dim": self.dim,
            "master_seed": self.master_seed,
            "path_index": self.path_index,
            "truncation_level": self.truncation_level,
            "k_start": -(self.grid.m as i64),
            "states": self.states.chunks_exact(self.dim).collect::<Vec<_>>(),
        })
    }
}

/// Shortest round-trip decimal representation; independent of locale.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

/// Ensemble CSV: `path_index, k, t, x_1..x_n`, paths in index order.
pub fn write_ensemble_csv<W: Write>(paths: &[PathRecord], writer: W) -> Result<()> {
    let dim = paths.first().map_or(1, |p| p.dim);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PathRecord::header(dim, true))?;
    for p in paths {
        if p.dim != dim {
            return Err(MtemError::InconsistentEnsemble(
                "mixed state dimensions".into(),
            ));
        }
        p.write_rows(&mut w, true)?;
    }
    w.flush()?;
    Ok(())
}

pub fn ensemble_to_json(paths: &[PathRecord]) -> serde_json::Value {
    serde_json::Value::Array(paths.iter().map(PathRecord::to_json).collect())
}
