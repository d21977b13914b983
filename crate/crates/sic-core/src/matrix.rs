//! A minimal row-major matrix of `f64`, sized for per-frame feature tables.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Row-major dense matrix. Rows are frames, columns are feature dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
}

impl Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Matrix {
        Matrix {
            values: vec![0.0; n_rows * n_cols],
            n_rows,
            n_cols,
        }
    }

    /// Build from a flat row-major buffer. Panics if the buffer length is not
    /// `n_rows * n_cols`; this is a programming error, not input validation.
    pub fn from_rows(values: Vec<f64>, n_cols: usize) -> Matrix {
        assert!(n_cols > 0, "matrix must have at least one column");
        assert_eq!(values.len() % n_cols, 0, "ragged row-major buffer");
        let n_rows = values.len() / n_cols;
        Matrix {
            values,
            n_rows,
            n_cols,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.values[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.n_cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.values[r * self.n_cols + c] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Per-column arithmetic means. Returns zeros for an empty matrix.
    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.n_cols];
        if self.n_rows == 0 {
            return means;
        }
        for row in self.rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= self.n_rows as f64;
        }
        means
    }

    /// Stack matrices with identical column counts into one tall matrix.
    pub fn vstack(parts: &[&Matrix]) -> Matrix {
        assert!(!parts.is_empty(), "cannot stack zero matrices");
        let n_cols = parts[0].n_cols;
        assert!(
            parts.iter().all(|m| m.n_cols == n_cols),
            "column count mismatch in vstack"
        );
        let mut values = Vec::with_capacity(parts.iter().map(|m| m.values.len()).sum());
        for m in parts {
            values.extend_from_slice(&m.values);
        }
        Matrix::from_rows(values, n_cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_means_and_stacking() {
        let a = Matrix::from_rows(vec![1.0, 2.0, 3.0, 4.0], 2);
        let b = Matrix::from_rows(vec![5.0, 6.0], 2);
        let m = Matrix::vstack(&[&a, &b]);
        assert_eq!(m.n_rows(), 3);
        assert_eq!(m.column_means(), vec![3.0, 4.0]);
        assert_eq!(m.row(2), &[5.0, 6.0]);
    }
}
