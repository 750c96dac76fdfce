//! Cyclic coordinate descent for `(1/2E)‖Xθ − y‖² + λ‖θ‖₁`.
//!
//! The solver only touches the data through the Gram matrix `G = XᵀX` and
//! `Xᵀy` (covariance updates): it keeps `c = Xᵀy − Gθ` current, so a
//! coordinate that stays at zero costs O(1) and a change costs one column
//! of `G`.

use alloc::vec;
use alloc::vec::Vec;

use super::{DesignMatrix, FitResult};
use crate::{Error, Result};

/// Read access to a symmetric Gram matrix.
pub(crate) trait Gram {
    fn dim(&self) -> usize;
    fn diag(&self, j: usize) -> f64;
    /// `out += alpha · G[:, j]`.
    fn axpy_column(&self, j: usize, alpha: f64, out: &mut [f64]);
}

pub(crate) struct DenseGram {
    d: usize,
    g: Vec<f64>,
}

impl DenseGram {
    pub(crate) fn new(d: usize, g: Vec<f64>) -> Self {
        debug_assert_eq!(g.len(), d * d);
        Self { d, g }
    }
}

impl Gram for DenseGram {
    fn dim(&self) -> usize {
        self.d
    }

    fn diag(&self, j: usize) -> f64 {
        self.g[j * self.d + j]
    }

    fn axpy_column(&self, j: usize, alpha: f64, out: &mut [f64]) {
        // Symmetric: column j equals row j.
        for (o, g) in out.iter_mut().zip(&self.g[j * self.d..(j + 1) * self.d]) {
            *o += alpha * g;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoSettings {
    /// Stop once no coordinate moves by more than this in a sweep.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoSettings {
    fn default() -> Self {
        Self { tol: 1e-7, max_sweeps: 10_000 }
    }
}

pub(crate) struct LassoProblem<'a, G: Gram + ?Sized> {
    pub gram: &'a G,
    pub xty: &'a [f64],
    pub yty: f64,
    pub rows: usize,
}

/// `sign(z) · max(|z| − γ, 0)`.
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

fn objective(problem_yty: f64, xty: &[f64], theta: &[f64], c: &[f64], rows: usize, lambda: f64) -> f64 {
    // ‖y − Xθ‖² = yᵀy − θᵀXᵀy − θᵀc with c = Xᵀy − Gθ.
    let mut fit = problem_yty;
    let mut l1 = 0.0;
    for ((&t, &b), &cj) in theta.iter().zip(xty).zip(c) {
        fit -= t * b + t * cj;
        l1 += t.abs();
    }
    fit.max(0.0) / (2.0 * rows as f64) + lambda * l1
}

pub(crate) fn solve_lasso<G: Gram + ?Sized>(
    problem: &LassoProblem<'_, G>,
    lambda: f64,
    warm_start: Option<&[f64]>,
    settings: LassoSettings,
) -> FitResult {
    let d = problem.gram.dim();
    let mut theta = warm_start.map_or_else(|| vec![0.0; d], <[f64]>::to_vec);
    let mut c = problem.xty.to_vec();
    for (j, &t) in theta.iter().enumerate() {
        if t != 0.0 {
            problem.gram.axpy_column(j, -t, &mut c);
        }
    }
    let threshold = lambda * problem.rows as f64;
    let mut history = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < settings.max_sweeps {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for j in 0..d {
            let gjj = problem.gram.diag(j);
            let old = theta[j];
            let new = if gjj > 0.0 { soft_threshold(c[j] + gjj * old, threshold) / gjj } else { 0.0 };
            if new != old {
                problem.gram.axpy_column(j, old - new, &mut c);
                theta[j] = new;
                max_change = max_change.max((new - old).abs());
            }
        }
        let value = objective(problem.yty, problem.xty, &theta, &c, problem.rows, lambda);
        if let Some(&prev) = history.last() {
            debug_assert!(value <= prev + 1e-9 * (1.0 + f64::abs(prev)), "objective rose from {prev} to {value}");
        }
        history.push(value);
        if max_change <= settings.tol {
            converged = true;
            break;
        }
    }
    FitResult {
        objective: history
            .last()
            .copied()
            .unwrap_or_else(|| objective(problem.yty, problem.xty, &theta, &c, problem.rows, lambda)),
        theta_hat: theta,
        iterations: sweeps,
        converged,
        objective_history: history,
    }
}

/// Lasso on an explicit design; non-convergence is reported through
/// `converged = false`.
pub fn lasso_fit(x: &DesignMatrix, y: &[f64], lambda: f64) -> Result<FitResult> {
    lasso_fit_with(x, y, lambda, LassoSettings::default())
}

pub fn lasso_fit_with(x: &DesignMatrix, y: &[f64], lambda: f64, settings: LassoSettings) -> Result<FitResult> {
    x.check_response(y)?;
    if !(lambda >= 0.0) {
        return Err(Error::param("lambda must be nonnegative"));
    }
    let gram = DenseGram::new(x.cols(), x.gram());
    let xty = x.xty(y);
    let problem = LassoProblem { gram: &gram, xty: &xty, yty: y.iter().map(|v| v * v).sum(), rows: x.rows() };
    Ok(solve_lasso(&problem, lambda, None, settings))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::hadamard;
    use super::super::{ols_fit, DesignMatrix};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sign_design(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DesignMatrix {
        let data = (0..rows * cols).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        DesignMatrix::new(rows, cols, data).unwrap()
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
    }

    #[test]
    fn zero_lambda_matches_ols() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_sign_design(&mut rng, 80, 6);
        let y: Vec<f64> = (0..80).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ols = ols_fit(&x, &y).unwrap();
        let lasso = lasso_fit(&x, &y, 0.0).unwrap();
        assert!(lasso.converged);
        for (a, b) in ols.theta_hat.iter().zip(&lasso.theta_hat) {
            assert!((a - b).abs() <= 1e-5);
        }
    }

    #[test]
    fn large_lambda_zeroes_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_sign_design(&mut rng, 40, 10);
        let y: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lambda_max = x.xty(&y).iter().fold(0.0f64, |m, v| m.max(v.abs())) / 40.0;
        let fit = lasso_fit(&x, &y, lambda_max).unwrap();
        assert!(fit.theta_hat.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn orthonormal_design_is_soft_threshold() {
        let x = hadamard(5, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
        for lambda in [0.0, 0.01, 0.05, 0.2] {
            let fit = lasso_fit(&x, &y, lambda).unwrap();
            for j in 0..12 {
                let z: f64 = (0..32).map(|i| x.get(i, j) * y[i]).sum::<f64>() / 32.0;
                let expected = if z.abs() > lambda { z - lambda * z.signum() } else { 0.0 };
                assert!((fit.theta_hat[j] - expected).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn objective_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = random_sign_design(&mut rng, 30, 40);
            let y: Vec<f64> = (0..30).map(|_| rng.random_range(-2.0..2.0)).collect();
            let fit = lasso_fit(&x, &y, rng.random_range(0.001..0.3)).unwrap();
            for w in fit.objective_history.windows(2) {
                assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()));
            }
        }
    }

    #[test]
    fn reports_non_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_sign_design(&mut rng, 20, 30);
        let y: Vec<f64> = (0..20).map(|_| rng.random_range(-2.0..2.0)).collect();
        let fit = lasso_fit_with(&x, &y, 1e-4, LassoSettings { tol: 1e-15, max_sweeps: 3 }).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 3);
        assert!(lasso_fit(&x, &y, -1.0).is_err());
    }
}
