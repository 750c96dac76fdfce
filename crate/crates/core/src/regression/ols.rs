use alloc::vec;
use alloc::vec::Vec;

use super::{DesignMatrix, FitResult};
use crate::{Error, Result};

/// Smallest admissible eigenvalue of `XᵀX/E`.
pub(crate) const MIN_EIGENVALUE: f64 = 1e-8;

const INVERSE_ITERATIONS: usize = 60;

/// Least squares via a Cholesky factorization of the normal equations.
///
/// Fails with [`Error::IllConditioned`] when `XᵀX/E` has an eigenvalue below
/// `1e-8` (or more columns than rows).
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<FitResult> {
    x.check_response(y)?;
    let theta = ols_normal(&x.gram(), &x.xty(y), x.cols(), x.rows())?;
    let rss: f64 = (0..x.rows())
        .map(|i| {
            let r = y[i] - x.predict_row(i, &theta);
            r * r
        })
        .sum();
    Ok(FitResult { theta_hat: theta, objective: rss, iterations: 1, converged: true, objective_history: vec![rss] })
}

/// Solves `G θ = b` for a Gram matrix `G = XᵀX` built from `rows` samples.
pub(crate) fn ols_normal(gram: &[f64], xty: &[f64], d: usize, rows: usize) -> Result<Vec<f64>> {
    if rows < d {
        return Err(Error::IllConditioned { min_eigenvalue: 0.0 });
    }
    let scale = 1.0 / rows as f64;
    let scaled: Vec<f64> = gram.iter().map(|g| g * scale).collect();
    let chol = cholesky(&scaled, d).ok_or(Error::IllConditioned { min_eigenvalue: 0.0 })?;
    let min_eigenvalue = min_eigenvalue(&chol, d);
    if !(min_eigenvalue >= MIN_EIGENVALUE) {
        return Err(Error::IllConditioned { min_eigenvalue });
    }
    let rhs: Vec<f64> = xty.iter().map(|b| b * scale).collect();
    let mut theta = solve_cholesky(&chol, d, &rhs);
    // One step of iterative refinement.
    let mut residual = rhs;
    for a in 0..d {
        let row = &scaled[a * d..(a + 1) * d];
        residual[a] -= row.iter().zip(&theta).map(|(g, t)| g * t).sum::<f64>();
    }
    let correction = solve_cholesky(&chol, d, &residual);
    for (t, c) in theta.iter_mut().zip(correction) {
        *t += c;
    }
    Ok(theta)
}

/// Lower-triangular `L` with `L Lᵀ = A`, or `None` if `A` is not positive
/// definite.
fn cholesky(a: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = a[i * d + j];
            for k in 0..j {
                sum -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return None;
                }
                l[i * d + i] = libm::sqrt(sum);
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    Some(l)
}

fn solve_cholesky(l: &[f64], d: usize, b: &[f64]) -> Vec<f64> {
    let mut z = b.to_vec();
    for i in 0..d {
        for k in 0..i {
            z[i] -= l[i * d + k] * z[k];
        }
        z[i] /= l[i * d + i];
    }
    for i in (0..d).rev() {
        for k in i + 1..d {
            z[i] -= l[k * d + i] * z[k];
        }
        z[i] /= l[i * d + i];
    }
    z
}

/// Smallest eigenvalue of `L Lᵀ` by inverse power iteration.
fn min_eigenvalue(l: &[f64], d: usize) -> f64 {
    if d == 0 {
        return f64::INFINITY;
    }
    let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 0.01 * i as f64).collect();
    let mut estimate = f64::INFINITY;
    for _ in 0..INVERSE_ITERATIONS {
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
        v.iter_mut().for_each(|x| *x /= norm);
        let w = solve_cholesky(l, d, &v);
        let rayleigh: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        if !(rayleigh > 0.0) || !rayleigh.is_finite() {
            return 0.0;
        }
        estimate = 1.0 / rayleigh;
        v = w;
    }
    estimate
}
