//! Bandit policies over joint action profiles.
//!
//! Every policy follows the same round contract: the driver calls
//! [`Policy::next_action`], samples the environment, then hands the
//! observation back through [`Policy::observe`]. Policies own their random
//! stream, so a policy seeded identically replays identically.

mod elimination;
mod etc;
mod ucb;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use elimination::{epoch_budget, EpochSummary, SequentialElimination};
pub use etc::{EtcKind, NetworkEtc};
pub use ucb::Ucb;

use crate::environment::RewardObservation;
use crate::fourier::{character_bits, sign_word, ActionProfile};
use crate::{Error, Result};

/// What the policy was doing when it emitted its last action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Explore,
    Commit,
    /// Exploration sweep of elimination epoch `ℓ`.
    Epoch(u32),
    Exploit,
}

impl Phase {
    pub fn is_committed(self) -> bool {
        self == Phase::Commit
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Explore => f.write_str("explore"),
            Phase::Commit => f.write_str("commit"),
            Phase::Epoch(l) => write!(f, "epoch{l}"),
            Phase::Exploit => f.write_str("exploit"),
        }
    }
}

/// Run-level facts a policy reports for trace metadata.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicyDiagnostics {
    /// Exploration rounds used so far (ETC policies).
    pub explore_rounds: Option<usize>,
    /// Penalty used per Lasso target at commit time.
    pub lambdas: Vec<f64>,
    /// Whether each Lasso fit at commit time converged.
    pub converged: Vec<bool>,
    pub epochs_completed: Option<usize>,
    pub committed: Option<ActionProfile>,
    pub warnings: Vec<String>,
}

pub trait Policy {
    fn name(&self) -> &'static str;
    fn next_action(&mut self) -> ActionProfile;
    /// Phase of the most recent [`Policy::next_action`].
    fn phase(&self) -> Phase;
    fn observe(&mut self, action: &ActionProfile, observation: &RewardObservation) -> Result<()>;
    fn diagnostics(&self) -> PolicyDiagnostics;
}

/// How exploration length and Lasso penalty are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum HyperparameterMode {
    /// `E` (and `λ`) from the regret-bound formulas at failure level `delta`.
    Theoretical {
        delta: f64,
    },
    CrossValidated(CvSettings),
    Fixed {
        explore: usize,
        lambda: f64,
    },
}

impl Default for HyperparameterMode {
    fn default() -> Self {
        HyperparameterMode::CrossValidated(CvSettings::default())
    }
}

/// Cross-validated exploration.
///
/// At geometrically spaced rounds (`growth`) every regression target is
/// refitted with K-fold cross-validation, Lasso penalties being picked per
/// target by the same folds. The pooled held-out predictions of the averaged
/// model give `ε̂`, an upper-confidence estimate of its RMS error on the mean
/// reward; the fitted model itself gives `Δ̂`, its predicted gap between the
/// best profile and the profiles explored so far. The policy commits at round
/// `t` once `ε̂ · (T − t) <= threshold · Δ̂ · t`: the projected cost of
/// committing with the current error no longer exceeds the exploration regret
/// already paid.
#[derive(Debug, Clone, PartialEq)]
pub struct CvSettings {
    pub folds: usize,
    pub threshold: f64,
    pub growth: f64,
    /// Explicit penalties; when `None`, `lambda_points` values from
    /// `λ_max = max_{S≠∅} |X_Sᵀy|/E` down to `λ_max · lambda_ratio`.
    pub lambda_grid: Option<Vec<f64>>,
    pub lambda_points: usize,
    pub lambda_ratio: f64,
}

impl Default for CvSettings {
    fn default() -> Self {
        Self { folds: 3, threshold: 1.0, growth: 1.25, lambda_grid: None, lambda_points: 8, lambda_ratio: 0.05 }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::param("delta must lie in (0, 1)"))
    }
}

fn theoretical_e(
    horizon: usize,
    arms: u32,
    sparsity: usize,
    units: usize,
    delta: f64,
    dim_units: usize,
) -> Result<usize> {
    if horizon == 0 || arms == 0 || units == 0 {
        return Err(Error::param("need T, A, N >= 1"));
    }
    check_delta(delta)?;
    let log_a = libm::log(f64::from(arms));
    let base = horizon as f64 * libm::exp(sparsity as f64 * log_a);
    let log_term = libm::log(units as f64 / delta) + dim_units as f64 * log_a;
    let e = libm::ceil(libm::pow(base, 2.0 / 3.0) * libm::cbrt(log_term.max(0.0)));
    Ok(if e.is_nan() { horizon } else { (e.min(horizon as f64) as usize).max(1) })
}

/// `⌈(T A^s)^{2/3} [log(N/δ) + s log A]^{1/3}⌉`, clamped to `[1, T]`.
#[allow(non_snake_case)]
pub fn theoretical_E_known(horizon: usize, arms: u32, sparsity: usize, units: usize, delta: f64) -> Result<usize> {
    theoretical_e(horizon, arms, sparsity, units, delta, sparsity)
}

/// `⌈(T A^s)^{2/3} [log(N/δ) + N log A]^{1/3}⌉`, clamped to `[1, T]`.
#[allow(non_snake_case)]
pub fn theoretical_E_unknown(horizon: usize, arms: u32, sparsity: usize, units: usize, delta: f64) -> Result<usize> {
    theoretical_e(horizon, arms, sparsity, units, delta, units)
}

/// Exhaustive `argmax_a Σ_S θ_S χ_S(v(a))` over `profiles` profiles; ties to
/// the smallest index.
pub(crate) fn argmax_profile(coeffs: &[(u64, f64)], width: usize, profiles: u64) -> (u64, f64) {
    let mut best = (0u64, f64::NEG_INFINITY);
    for index in 0..profiles {
        let sw = sign_word(index, width);
        let value: f64 = coeffs.iter().map(|&(m, c)| c * character_bits(m, sw)).sum();
        if value > best.1 {
            best = (index, value);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_formula_example() {
        assert_eq!(theoretical_E_known(1000, 2, 1, 2, 0.1).unwrap(), 246);
        let e = theoretical_E_known(5120, 2, 4, 9, 0.1).unwrap();
        let expected =
            libm::ceil(libm::pow(5120.0 * 16.0, 2.0 / 3.0) * libm::cbrt(libm::log(90.0) + 4.0 * libm::log(2.0)));
        assert_eq!(e, expected as usize);
    }

    #[test]
    fn unknown_formula_example() {
        let e = theoretical_E_unknown(1000, 2, 1, 2, 0.1).unwrap();
        let expected = libm::ceil(libm::pow(2000.0, 2.0 / 3.0) * libm::cbrt(libm::log(20.0) + 2.0 * libm::log(2.0)));
        assert_eq!(e, expected as usize);
        assert!(e >= theoretical_E_known(1000, 2, 1, 2, 0.1).unwrap());
    }

    #[test]
    fn clamps_and_monotonicity() {
        assert_eq!(theoretical_E_known(10, 2, 4, 9, 0.1).unwrap(), 10);
        assert_eq!(theoretical_E_unknown(10, 2, 4, 9, 0.1).unwrap(), 10);
        let mut prev = 0;
        for t in (100..20_000).step_by(700) {
            let e = theoretical_E_known(t, 2, 3, 9, 0.1).unwrap();
            assert!(e >= prev);
            prev = e;
        }
        for s in 1..6 {
            assert!(
                theoretical_E_known(100_000, 2, s + 1, 9, 0.1).unwrap()
                    >= theoretical_E_known(100_000, 2, s, 9, 0.1).unwrap()
            );
        }
        assert!(theoretical_E_known(100, 2, 1, 2, 1.5).is_err());
        assert!(theoretical_E_known(0, 2, 1, 2, 0.5).is_err());
    }

    #[test]
    fn phase_labels() {
        assert_eq!(alloc::format!("{}", Phase::Epoch(3)), "epoch3");
        assert_eq!(alloc::format!("{}", Phase::Commit), "commit");
    }
}
