//! Estimation back-ends: least squares, coordinate-descent Lasso, K-fold
//! cross-validation, and the incoherence diagnostic.
//!
//! Designs are matrices of Fourier character values, so every entry is
//! `±1`. The constant character is an ordinary column; nothing is centered.

mod characters;
mod cv;
mod lasso;
mod ols;

use alloc::vec;
use alloc::vec::Vec;

pub use characters::CharacterDesign;
pub(crate) use cv::lambda_grid_from_max;
pub use cv::{cross_validate, fold_assignment, CvEstimator, CvReport};
pub use lasso::{lasso_fit, lasso_fit_with, soft_threshold, LassoSettings};
pub(crate) use lasso::{solve_lasso, LassoProblem};
pub use ols::ols_fit;

use crate::{Error, Result};

/// Row-major `rows × cols` matrix with entries in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DesignMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::param("design needs at least one row"));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, actual: data.len() });
        }
        if data.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::NotSignMatrix);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::param("ragged design rows"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self { rows: idx.len(), cols: self.cols, data }
    }

    /// `XᵀX`, row-major `cols × cols`.
    pub fn gram(&self) -> Vec<f64> {
        let d = self.cols;
        let mut g = vec![0.0; d * d];
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..d {
                let ra = r[a];
                let out = &mut g[a * d..a * d + d];
                for b in a..d {
                    out[b] += ra * r[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                g[a * d + b] = g[b * d + a];
            }
        }
        g
    }

    pub fn xty(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (o, &x) in out.iter_mut().zip(self.row(i)) {
                *o += x * yi;
            }
        }
        out
    }

    pub fn predict_row(&self, i: usize, theta: &[f64]) -> f64 {
        self.row(i).iter().zip(theta).map(|(x, t)| x * t).sum()
    }

    fn check_response(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.rows {
            return Err(Error::LengthMismatch { expected: self.rows, actual: y.len() });
        }
        Ok(())
    }
}

/// Output of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta_hat: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each sweep (Lasso); a single entry for least squares.
    pub objective_history: Vec<f64>,
}

/// `λ = 4√(log(2A^N)/E) + 4√(log(2N/δ)/E)`.
pub fn theoretical_lambda(explore: usize, arms: u32, units: usize, delta: f64) -> Result<f64> {
    if explore == 0 || arms == 0 || units == 0 {
        return Err(Error::param("theoretical lambda needs E, A, N >= 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta must lie in (0, 1)"));
    }
    let e = explore as f64;
    let log_dim = core::f64::consts::LN_2 + units as f64 * libm::log(f64::from(arms));
    let log_conf = libm::log(2.0 * units as f64 / delta);
    Ok(4.0 * libm::sqrt(log_dim / e) + 4.0 * libm::sqrt(log_conf / e))
}

/// `max_{i,j} |(XᵀX/E − I)_{ij}|`.
pub fn incoherence_stat(x: &DesignMatrix) -> f64 {
    let d = x.cols();
    let g = x.gram();
    let e = x.rows() as f64;
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g[a * d + b] / e - target).abs());
        }
    }
    worst
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Sylvester Hadamard matrix of order `2^k`, keeping the first `cols`
    /// columns; columns are exactly orthogonal with squared norm `2^k`.
    pub fn hadamard(k: u32, cols: usize) -> DesignMatrix {
        let n = 1usize << k;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..cols).map(|j| if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 }).collect())
            .collect();
        DesignMatrix::from_rows(&rows).unwrap()
    }
}
