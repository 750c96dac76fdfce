use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::lasso::{solve_lasso, DenseGram, LassoProblem, LassoSettings};
use super::{ols_fit, DesignMatrix};
use crate::seed::rng_from_seed;
use crate::{Error, Result};

/// What to cross-validate.
#[derive(Debug, Clone, PartialEq)]
pub enum CvEstimator {
    /// Plain least squares; a single candidate reported as `0.0`.
    Ols,
    /// Lasso over the given penalties.
    Lasso { grid: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: usize,
    pub candidate_grid: Vec<f64>,
    /// Pooled held-out mean squared error, aligned with `candidate_grid`.
    pub cv_errors: Vec<f64>,
    pub chosen: f64,
}

/// Fold id of each row: a seeded shuffle of `0..rows`, dealt round-robin.
pub fn fold_assignment(rows: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let mut fold = vec![0; rows];
    for (pos, &row) in order.iter().enumerate() {
        fold[row] = pos % folds;
    }
    fold
}

/// `points` penalties from `lambda_max` down to `lambda_max · ratio`,
/// geometrically spaced, largest first.
pub(crate) fn lambda_grid_from_max(lambda_max: f64, points: usize, ratio: f64) -> Vec<f64> {
    if points <= 1 || lambda_max <= 0.0 {
        return vec![lambda_max.max(0.0)];
    }
    let step = libm::pow(ratio, 1.0 / (points - 1) as f64);
    let mut out = Vec::with_capacity(points);
    let mut l = lambda_max;
    for _ in 0..points {
        out.push(l);
        l *= step;
    }
    out
}

/// K-fold cross-validation.
///
/// Rows are first put in a canonical order (by content), so the report does
/// not depend on the order in which samples were supplied. The chosen
/// candidate minimizes the held-out error; ties go to the larger penalty.
pub fn cross_validate(
    estimator: &CvEstimator,
    x: &DesignMatrix,
    y: &[f64],
    folds: usize,
    seed: u64,
) -> Result<CvReport> {
    x.check_response(y)?;
    if folds < 2 || x.rows() < folds {
        return Err(Error::param("cross-validation needs 2 <= K <= rows"));
    }
    let grid = match estimator {
        CvEstimator::Ols => vec![0.0],
        CvEstimator::Lasso { grid } if grid.is_empty() => return Err(Error::param("empty lambda grid")),
        CvEstimator::Lasso { grid } => {
            if grid.iter().any(|l| !(*l >= 0.0)) {
                return Err(Error::param("lambda must be nonnegative"));
            }
            grid.clone()
        }
    };

    let mut order: Vec<usize> = (0..x.rows()).collect();
    order.sort_by(|&a, &b| {
        x.row(a)
            .iter()
            .zip(x.row(b))
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| y[a].total_cmp(&y[b]))
    });
    let xs = x.select_rows(&order);
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let assignment = fold_assignment(xs.rows(), folds, seed);

    // Solve along the path from the strongest penalty down, warm-starting.
    let mut by_strength: Vec<usize> = (0..grid.len()).collect();
    by_strength.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]));

    let mut sq_err = vec![0.0; grid.len()];
    for k in 0..folds {
        let train: Vec<usize> = (0..xs.rows()).filter(|&i| assignment[i] != k).collect();
        let test: Vec<usize> = (0..xs.rows()).filter(|&i| assignment[i] == k).collect();
        let xt = xs.select_rows(&train);
        let yt: Vec<f64> = train.iter().map(|&i| ys[i]).collect();
        match estimator {
            CvEstimator::Ols => {
                let fit = ols_fit(&xt, &yt)?;
                sq_err[0] += test.iter().map(|&i| sq(ys[i] - xs.predict_row(i, &fit.theta_hat))).sum::<f64>();
            }
            CvEstimator::Lasso { .. } => {
                let gram = DenseGram::new(xt.cols(), xt.gram());
                let xty = xt.xty(&yt);
                let problem =
                    LassoProblem { gram: &gram, xty: &xty, yty: yt.iter().map(|v| v * v).sum(), rows: xt.rows() };
                let mut warm: Option<Vec<f64>> = None;
                for &c in &by_strength {
                    let fit = solve_lasso(&problem, grid[c], warm.as_deref(), LassoSettings::default());
                    sq_err[c] += test.iter().map(|&i| sq(ys[i] - xs.predict_row(i, &fit.theta_hat))).sum::<f64>();
                    warm = Some(fit.theta_hat);
                }
            }
        }
    }
    let cv_errors: Vec<f64> = sq_err.iter().map(|s| s / xs.rows() as f64).collect();
    let mut best = by_strength[0];
    for &c in &by_strength[1..] {
        if cv_errors[c] < cv_errors[best] {
            best = c;
        }
    }
    Ok(CvReport { folds, chosen: grid[best], candidate_grid: grid, cv_errors })
}

fn sq(v: f64) -> f64 {
    v * v
}
