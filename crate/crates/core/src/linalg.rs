//! Small dense helpers for state vectors (`[f64]`) and diffusion matrices.

use serde::{Deserialize, Serialize};

/// Row-major `rows x cols` matrix. Diffusion coefficients are `n x d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row-major data. Panics if the length does not match.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    /// `n x 1` column matrix, the usual shape for scalar noise.
    pub fn column(values: Vec<f64>) -> Self {
        let rows = values.len();
        Self::from_row_major(rows, 1, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Frobenius norm `sqrt(trace(A^T A))`.
    pub fn frobenius(&self) -> f64 {
        norm(&self.data)
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.data.iter_mut().for_each(|v| *v *= factor);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Accumulates `self * v` into `out`.
    pub fn mul_vec_add(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (row, o) in self.data.chunks_exact(self.cols).zip(out.iter_mut()) {
            *o += dot(row, v);
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Integer part of `v`, snapping to the nearest integer when `v` lies within
/// `tol` (relative to `max(1, |v|)`) of it. Floating noise on analytically
/// integral quotients must not move the result by one.
pub fn guarded_floor(v: f64, tol: f64) -> i64 {
    let nearest = v.round();
    if (v - nearest).abs() <= tol * v.abs().max(1.0) {
        nearest as i64
    } else {
        v.floor() as i64
    }
}

/// Pairwise (fixed binary tree) summation. The result depends only on the
/// order of `values`, never on how work was scheduled.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_matches_trace_definition() {
        let a = Matrix::from_row_major(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        // trace(A^T A) = 1 + 4 + 9 + 16
        assert!((a.frobenius() - 30f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mat_vec() {
        let a = Matrix::from_row_major(2, 3, vec![1.0, 0.0, 2.0, 0.0, 1.0, -1.0]);
        let mut out = vec![1.0, 1.0];
        a.mul_vec_add(&[1.0, 2.0, 3.0], &mut out);
        assert_eq!(out, vec![8.0, 0.0]);
    }

    #[test]
    fn guarded_floor_snaps_float_noise() {
        assert_eq!(guarded_floor(2.0 - 1e-15, 1e-12), 2);
        assert_eq!(guarded_floor(1.0 / (1.0 - 0.5), 1e-12), 2);
        assert_eq!(guarded_floor(13.1606, 1e-9), 13);
        assert_eq!(guarded_floor(9.9999, 1e-9), 9);
        assert_eq!(guarded_floor(0.0, 1e-9), 0);
    }

    #[test]
    fn pairwise_sum_agrees_with_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499500.0);
    }
}
