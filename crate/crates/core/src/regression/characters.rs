//! Designs whose columns are Fourier characters of sampled profiles.
//!
//! For characters, `(XᵀX)_{jk} = Σ_i χ_{S_j Δ S_k}(x_i)`, so the whole Gram
//! matrix is determined by the parity sums `g[m] = Σ_i χ_m(x_i)`. When the
//! encoding is narrow those sums come from one Walsh–Hadamard pass over the
//! histogram of sampled points, and `G` never needs to be stored.

use alloc::vec;
use alloc::vec::Vec;

use super::lasso::{DenseGram, Gram};
use super::DesignMatrix;
use crate::fourier::character_bits;
use crate::{Error, Result};

/// Widest encoding for which the parity-sum route is considered.
const PARITY_MAX_WIDTH: usize = 22;

/// Unnormalized in-place Walsh–Hadamard transform:
/// `out[m] = Σ_x in[x] (−1)^{|m ∧ x|}`.
pub(crate) fn fwht(values: &mut [f64]) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (values[i], values[i + h]);
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Rows are encoded profiles (sign words), columns are subset masks.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterDesign {
    width: usize,
    rows: Vec<u64>,
    masks: Vec<u64>,
}

impl CharacterDesign {
    pub fn new(width: usize, rows: Vec<u64>, masks: Vec<u64>) -> Result<Self> {
        if width > 64 {
            return Err(Error::param("character designs support encodings of at most 64 bits"));
        }
        let full = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        if rows.iter().chain(&masks).any(|&w| w & !full != 0) {
            return Err(Error::param("row or mask wider than the encoding"));
        }
        Ok(Self { width, rows, masks })
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.masks.len()
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn row_words(&self) -> &[u64] {
        &self.rows
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self { width: self.width, rows: idx.iter().map(|&i| self.rows[i]).collect(), masks: self.masks.clone() }
    }

    pub fn to_matrix(&self) -> Result<DesignMatrix> {
        let mut data = Vec::with_capacity(self.rows() * self.cols());
        for &sw in &self.rows {
            data.extend(self.masks.iter().map(|&m| character_bits(m, sw)));
        }
        DesignMatrix::new(self.rows(), self.cols(), data)
    }

    fn parity_cost(&self) -> Option<usize> {
        (self.width <= PARITY_MAX_WIDTH).then(|| self.rows() + self.width.max(1) * (1usize << self.width))
    }

    fn use_parity_for_gram(&self) -> bool {
        self.parity_cost().is_some_and(|c| c < self.rows() * self.cols() * self.cols() / 2)
    }

    fn use_parity_for_xty(&self) -> bool {
        self.parity_cost().is_some_and(|c| c < self.rows() * self.cols())
    }

    /// Histogram of sampled points in the Walsh convention (bit set = −1).
    fn histogram(&self, weights: Option<&[f64]>) -> Vec<f64> {
        let full = (1usize << self.width) - 1;
        let mut hist = vec![0.0; 1 << self.width];
        for (i, &sw) in self.rows.iter().enumerate() {
            hist[!(sw as usize) & full] += weights.map_or(1.0, |w| w[i]);
        }
        hist
    }

    pub(crate) fn gram(&self) -> CharacterGram {
        if self.use_parity_for_gram() {
            let mut sums = self.histogram(None);
            fwht(&mut sums);
            CharacterGram::Parity { masks: self.masks.clone(), sums, rows: self.rows() as f64 }
        } else {
            let d = self.cols();
            let mut g = vec![0.0; d * d];
            for a in 0..d {
                for b in a..d {
                    let m = self.masks[a] ^ self.masks[b];
                    let v: f64 = self.rows.iter().map(|&sw| character_bits(m, sw)).sum();
                    g[a * d + b] = v;
                    g[b * d + a] = v;
                }
            }
            CharacterGram::Dense(DenseGram::new(d, g))
        }
    }

    pub fn xty(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows());
        if self.use_parity_for_xty() {
            let mut w = self.histogram(Some(y));
            fwht(&mut w);
            self.masks.iter().map(|&m| w[m as usize]).collect()
        } else {
            self.masks
                .iter()
                .map(|&m| self.rows.iter().zip(y).map(|(&sw, yi)| character_bits(m, sw) * yi).sum())
                .collect()
        }
    }

    /// `Σ_j θ_j χ_{S_j}(x)` at an encoded point.
    pub fn predict(&self, theta: &[f64], sign_word: u64) -> f64 {
        self.masks.iter().zip(theta).filter(|(_, &t)| t != 0.0).map(|(&m, &t)| t * character_bits(m, sign_word)).sum()
    }
}

pub(crate) enum CharacterGram {
    Dense(DenseGram),
    Parity { masks: Vec<u64>, sums: Vec<f64>, rows: f64 },
}

impl Gram for CharacterGram {
    fn dim(&self) -> usize {
        match self {
            CharacterGram::Dense(g) => g.dim(),
            CharacterGram::Parity { masks, .. } => masks.len(),
        }
    }

    fn diag(&self, j: usize) -> f64 {
        match self {
            CharacterGram::Dense(g) => g.diag(j),
            CharacterGram::Parity { rows, .. } => *rows,
        }
    }

    fn axpy_column(&self, j: usize, alpha: f64, out: &mut [f64]) {
        match self {
            CharacterGram::Dense(g) => g.axpy_column(j, alpha, out),
            CharacterGram::Parity { masks, sums, .. } => {
                let mj = masks[j];
                for (o, &mk) in out.iter_mut().zip(masks) {
                    *o += alpha * sums[(mj ^ mk) as usize];
                }
            }
        }
    }
}
