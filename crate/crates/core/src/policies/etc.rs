//! Network explore-then-commit.
//!
//! One engine covers the known-graph, unknown-graph, partially known and
//! global-regression variants. They differ only in their regression targets:
//! a target is a response (one unit's reward, or the mean reward) paired with
//! a basis of characters and an estimator (OLS on an explicit basis, Lasso on
//! the shared basis). Exploration, aggregation and commitment are shared, so
//! the partial variant reproduces the other two exactly at its extremes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    argmax_profile, theoretical_E_known, theoretical_E_unknown, CvSettings, HyperparameterMode, Phase, Policy,
    PolicyDiagnostics,
};
use crate::environment::{InterferenceGraph, RewardObservation};
use crate::fourier::{
    bits_per_unit, block_positions, character_bits, checked_profile_count, local_subsets, scatter_bits, sign_word,
    ActionProfile,
};
use crate::regression::{
    fold_assignment, lambda_grid_from_max, ols_fit, solve_lasso, theoretical_lambda, CharacterDesign, LassoProblem,
    LassoSettings,
};
use crate::seed::{derive_rep_seed, derive_stream_seed, rng_from_seed, Stream};
use crate::{Error, Result, DEFAULT_PROFILE_CAP};

/// Largest shared Lasso basis accepted.
const LASSO_BASIS_CAP: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtcKind {
    Known,
    Unknown,
    Partial,
    Global,
}

impl EtcKind {
    fn name(self) -> &'static str {
        match self {
            EtcKind::Known => "etc-known",
            EtcKind::Unknown => "etc-unknown",
            EtcKind::Partial => "etc-partial",
            EtcKind::Global => "global-etc",
        }
    }
}

#[derive(Debug, Clone)]
enum Basis {
    /// OLS on these masks.
    Own(Vec<u64>),
    /// Lasso on the engine's shared basis.
    Shared,
}

#[derive(Debug, Clone)]
struct Target {
    /// `None` regresses the mean reward.
    unit: Option<usize>,
    basis: Basis,
    weight: f64,
}

#[derive(Debug, Clone)]
struct TargetFit {
    theta: Vec<f64>,
    lambda: Option<f64>,
    converged: bool,
}

struct CvOutcome {
    fits: Vec<TargetFit>,
    /// Held-out prediction of the aggregated response, per explored round.
    held_out: Vec<f64>,
    /// In-sample noise-variance estimate of the aggregated response.
    noise: f64,
}

#[derive(Debug, Clone)]
struct Commitment {
    action: ActionProfile,
    fits: Vec<TargetFit>,
}

/// Canonical subset order on bit words: cardinality, then ascending
/// position lists.
fn canonical_cmp(a: u64, b: u64) -> Ordering {
    a.count_ones().cmp(&b.count_ones()).then_with(|| {
        if a == b {
            Ordering::Equal
        } else if a & (a ^ b) & (a ^ b).wrapping_neg() != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    })
}

fn unit_basis(graph: &InterferenceGraph, n: usize, bits: usize) -> Vec<u64> {
    let positions = block_positions(graph.neighborhood(n), bits);
    local_subsets(positions.len(), None).into_iter().map(|l| scatter_bits(l, &positions)).collect()
}

#[derive(Debug, Clone)]
pub struct NetworkEtc {
    kind: EtcKind,
    units: usize,
    arms: u32,
    width: usize,
    horizon: usize,
    profiles: u64,
    targets: Vec<Target>,
    shared: Vec<u64>,
    mode: HyperparameterMode,
    rng: ChaCha8Rng,
    fold_seed: u64,
    words: Vec<u64>,
    per_unit: Vec<Vec<f64>>,
    means: Vec<f64>,
    round: usize,
    /// Round after which the next commit attempt happens.
    decision_round: usize,
    committed: Option<Commitment>,
    phase: Phase,
    warnings: Vec<String>,
}

impl NetworkEtc {
    /// Per-unit OLS on the subsets of each `B(n)`.
    pub fn known(
        graph: &InterferenceGraph,
        arms: u32,
        horizon: usize,
        mode: HyperparameterMode,
        seed: u64,
    ) -> Result<Self> {
        let known: Vec<usize> = (0..graph.units()).collect();
        Self::build(EtcKind::Known, graph.units(), Some(graph), &known, arms, horizon, mode, None, seed)
    }

    /// Per-unit Lasso on all characters, or those of degree at most
    /// `max_degree`.
    pub fn unknown(
        units: usize,
        arms: u32,
        horizon: usize,
        mode: HyperparameterMode,
        max_degree: Option<usize>,
        seed: u64,
    ) -> Result<Self> {
        Self::build(EtcKind::Unknown, units, None, &[], arms, horizon, mode, max_degree, seed)
    }

    /// OLS for the units listed in `known`, Lasso for the rest.
    #[allow(clippy::too_many_arguments)]
    pub fn partial(
        graph: &InterferenceGraph,
        known: &[usize],
        arms: u32,
        horizon: usize,
        mode: HyperparameterMode,
        max_degree: Option<usize>,
        seed: u64,
    ) -> Result<Self> {
        if let Some(&n) = known.iter().find(|&&n| n >= graph.units()) {
            return Err(Error::param(format!("known unit {n} out of range")));
        }
        Self::build(EtcKind::Partial, graph.units(), Some(graph), known, arms, horizon, mode, max_degree, seed)
    }

    /// A single OLS of the mean reward on the union of all unit bases.
    pub fn global(
        graph: &InterferenceGraph,
        arms: u32,
        horizon: usize,
        mode: HyperparameterMode,
        seed: u64,
    ) -> Result<Self> {
        Self::build(EtcKind::Global, graph.units(), Some(graph), &[], arms, horizon, mode, None, seed)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        kind: EtcKind,
        units: usize,
        graph: Option<&InterferenceGraph>,
        known: &[usize],
        arms: u32,
        horizon: usize,
        mode: HyperparameterMode,
        max_degree: Option<usize>,
        seed: u64,
    ) -> Result<Self> {
        if units == 0 || horizon == 0 {
            return Err(Error::param("need N >= 1 and T >= 1"));
        }
        let bits = bits_per_unit(arms)?;
        let width = bits * units;
        if width > 64 {
            return Err(Error::CapExceeded { what: "encoding width", requested: width as u64, cap: 64 });
        }
        let profiles = checked_profile_count(units, arms, DEFAULT_PROFILE_CAP, "commit search")?;
        let inv_n = 1.0 / units as f64;

        let mut targets = Vec::with_capacity(units);
        let mut shared = Vec::new();
        if kind == EtcKind::Global {
            let graph = graph.expect("global variant has a graph");
            let mut union: Vec<u64> = (0..units).flat_map(|n| unit_basis(graph, n, bits)).collect();
            union.sort_unstable_by(|&a, &b| canonical_cmp(a, b));
            union.dedup();
            targets.push(Target { unit: None, basis: Basis::Own(union), weight: 1.0 });
        } else {
            let mut is_known = vec![false; units];
            for &n in known {
                is_known[n] = true;
            }
            for (n, &k) in is_known.iter().enumerate() {
                let basis = match graph {
                    Some(g) if k => Basis::Own(unit_basis(g, n, bits)),
                    _ => Basis::Shared,
                };
                targets.push(Target { unit: Some(n), basis, weight: inv_n });
            }
            if targets.iter().any(|t| matches!(t.basis, Basis::Shared)) {
                let size: u64 = (0..=max_degree.map_or(width, |d| d.min(width)))
                    .map(|k| binomial(width as u64, k as u64))
                    .fold(0u64, u64::saturating_add);
                if size > LASSO_BASIS_CAP {
                    return Err(Error::CapExceeded { what: "lasso basis", requested: size, cap: LASSO_BASIS_CAP });
                }
                shared = local_subsets(width, max_degree);
            }
        }

        let mut policy = Self {
            kind,
            units,
            arms,
            width,
            horizon,
            profiles,
            targets,
            shared,
            mode,
            rng: rng_from_seed(seed),
            fold_seed: derive_stream_seed(seed, Stream::Folds),
            words: Vec::new(),
            per_unit: vec![Vec::new(); units],
            means: Vec::new(),
            round: 0,
            decision_round: 0,
            committed: None,
            phase: Phase::Explore,
            warnings: Vec::new(),
        };
        policy.decision_round = policy.first_decision(graph)?;
        Ok(policy)
    }

    fn first_decision(&self, graph: Option<&InterferenceGraph>) -> Result<usize> {
        match &self.mode {
            HyperparameterMode::Fixed { explore, lambda } => {
                if *explore == 0 {
                    return Err(Error::param("fixed exploration length must be >= 1"));
                }
                if !(*lambda >= 0.0) {
                    return Err(Error::param("lambda must be nonnegative"));
                }
                Ok(*explore)
            }
            HyperparameterMode::Theoretical { delta } => {
                let s = graph.map_or(self.units, InterferenceGraph::max_degree);
                if self.has_lasso() {
                    theoretical_E_unknown(self.horizon, self.arms, s, self.units, *delta)
                } else {
                    theoretical_E_known(self.horizon, self.arms, s, self.units, *delta)
                }
            }
            HyperparameterMode::CrossValidated(cv) => {
                if cv.folds < 2 || !(cv.growth > 1.0) || !(cv.threshold >= 0.0) {
                    return Err(Error::param("cross-validation needs K >= 2, growth > 1, threshold >= 0"));
                }
                let k = cv.folds;
                let mut first = (8 * k).max(32);
                for t in &self.targets {
                    if let Basis::Own(masks) = &t.basis {
                        first = first.max((masks.len() + 1) * k / (k - 1) + k);
                    }
                }
                Ok(first)
            }
        }
    }

    fn has_lasso(&self) -> bool {
        !self.shared.is_empty()
    }

    pub fn kind(&self) -> EtcKind {
        self.kind
    }

    pub fn committed_action(&self) -> Option<&ActionProfile> {
        self.committed.as_ref().map(|c| &c.action)
    }

    /// Fitted coefficients per regression target as `(mask, θ̂)` bit words;
    /// one entry per unit, or a single entry for the global variant.
    pub fn unit_estimates(&self) -> Option<Vec<Vec<(u64, f64)>>> {
        let c = self.committed.as_ref()?;
        Some(
            self.targets
                .iter()
                .zip(&c.fits)
                .map(|(t, f)| self.basis_of(t).iter().copied().zip(f.theta.iter().copied()).collect())
                .collect(),
        )
    }

    /// The aggregated `θ̂`, nonzero entries in canonical order.
    pub fn aggregate_estimate(&self) -> Option<Vec<(u64, f64)>> {
        self.committed.as_ref().map(|c| self.aggregate(&c.fits))
    }

    fn basis_of<'a>(&'a self, t: &'a Target) -> &'a [u64] {
        match &t.basis {
            Basis::Own(m) => m,
            Basis::Shared => &self.shared,
        }
    }

    fn response(&self, t: &Target) -> &[f64] {
        match t.unit {
            Some(n) => &self.per_unit[n],
            None => &self.means,
        }
    }

    fn aggregate(&self, fits: &[TargetFit]) -> Vec<(u64, f64)> {
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for (t, f) in self.targets.iter().zip(fits) {
            for (&m, &v) in self.basis_of(t).iter().zip(&f.theta) {
                if v != 0.0 {
                    *acc.entry(m).or_insert(0.0) += t.weight * v;
                }
            }
        }
        let mut out: Vec<(u64, f64)> = acc.into_iter().collect();
        out.sort_by(|a, b| canonical_cmp(a.0, b.0));
        out
    }

    fn commit(&mut self, fits: Vec<TargetFit>) {
        let coeffs = self.aggregate(&fits);
        let (index, _) = argmax_profile(&coeffs, self.width, self.profiles);
        let action = ActionProfile::from_index(index, self.units, self.arms);
        if fits.iter().any(|f| !f.converged) {
            self.warnings.push(format!("lasso did not converge at commit (round {})", self.round));
        }
        self.committed = Some(Commitment { action, fits });
    }

    /// Fits every target with a fixed penalty for the Lasso targets.
    fn fit_fixed(&self, lambda: f64) -> Result<Vec<TargetFit>> {
        let shared = if self.has_lasso() {
            let design = CharacterDesign::new(self.width, self.words.clone(), self.shared.clone())?;
            let gram = design.gram();
            Some((design, gram))
        } else {
            None
        };
        let mut fits = Vec::with_capacity(self.targets.len());
        for t in &self.targets {
            let y = self.response(t);
            match &t.basis {
                Basis::Own(masks) => {
                    let x = CharacterDesign::new(self.width, self.words.clone(), masks.clone())?.to_matrix()?;
                    let fit = ols_fit(&x, y)?;
                    fits.push(TargetFit { theta: fit.theta_hat, lambda: None, converged: true });
                }
                Basis::Shared => {
                    let (design, gram) = shared.as_ref().expect("shared design exists");
                    let xty = design.xty(y);
                    let problem = LassoProblem { gram, xty: &xty, yty: dot(y, y), rows: y.len() };
                    let fit = solve_lasso(&problem, lambda, None, LassoSettings::default());
                    fits.push(TargetFit { theta: fit.theta_hat, lambda: Some(lambda), converged: fit.converged });
                }
            }
        }
        Ok(fits)
    }

    /// Cross-validated fits plus the pooled held-out predictions of the
    /// aggregated model, or `None` while some fold is still singular.
    fn fit_cv(&self, cv: &CvSettings) -> Result<Option<CvOutcome>> {
        let rows = self.words.len();
        let seed = derive_rep_seed(self.fold_seed, rows as u64);
        let assignment = fold_assignment(rows, cv.folds, seed);
        let folds: Vec<(Vec<usize>, Vec<usize>)> = (0..cv.folds)
            .map(|k| {
                (
                    (0..rows).filter(|&r| assignment[r] != k).collect(),
                    (0..rows).filter(|&r| assignment[r] == k).collect(),
                )
            })
            .collect();
        let mut fits: Vec<Option<TargetFit>> = vec![None; self.targets.len()];
        let mut held_out = vec![0.0; rows];
        let mut noise = 0.0;

        for (i, t) in self.targets.iter().enumerate() {
            let Basis::Own(masks) = &t.basis else { continue };
            if rows <= masks.len() {
                return Ok(None);
            }
            let y = self.response(t);
            let x = CharacterDesign::new(self.width, self.words.clone(), masks.clone())?.to_matrix()?;
            for (train, test) in &folds {
                let yt: Vec<f64> = train.iter().map(|&r| y[r]).collect();
                let fit = match ols_fit(&x.select_rows(train), &yt) {
                    Ok(f) => f,
                    Err(Error::IllConditioned { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                };
                for &r in test {
                    held_out[r] += t.weight * x.predict_row(r, &fit.theta_hat);
                }
            }
            let fit = match ols_fit(&x, y) {
                Ok(f) => f,
                Err(Error::IllConditioned { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            noise += t.weight * t.weight * fit.objective / (rows - masks.len()) as f64;
            fits[i] = Some(TargetFit { theta: fit.theta_hat, lambda: None, converged: true });
        }

        if self.has_lasso() {
            let design = CharacterDesign::new(self.width, self.words.clone(), self.shared.clone())?;
            let full_gram = design.gram();
            let fold_designs: Vec<CharacterDesign> = folds.iter().map(|(train, _)| design.select_rows(train)).collect();
            let grams: Vec<_> = fold_designs.iter().map(CharacterDesign::gram).collect();

            for (i, t) in self.targets.iter().enumerate() {
                if !matches!(t.basis, Basis::Shared) {
                    continue;
                }
                let y = self.response(t);
                let full_xty = design.xty(y);
                let grid = match &cv.lambda_grid {
                    Some(g) => {
                        let mut g = g.clone();
                        g.sort_by(|a, b| b.total_cmp(a));
                        g
                    }
                    None => {
                        // The constant character always dominates `Xᵀy`; the grid
                        // is anchored on the strongest nonconstant one instead.
                        let max = full_xty
                            .iter()
                            .zip(&self.shared)
                            .filter(|(_, &m)| m != 0)
                            .fold(0.0f64, |m, (v, _)| m.max(v.abs()))
                            / rows as f64;
                        lambda_grid_from_max(max, cv.lambda_points, cv.lambda_ratio)
                    }
                };
                if grid.is_empty() || grid.iter().any(|l| !(*l >= 0.0)) {
                    return Err(Error::param("lambda grid must be nonempty and nonnegative"));
                }
                let fold_xty: Vec<(Vec<f64>, f64)> = folds
                    .iter()
                    .zip(&fold_designs)
                    .map(|((train, _), d)| {
                        let yt: Vec<f64> = train.iter().map(|&r| y[r]).collect();
                        (d.xty(&yt), dot(&yt, &yt))
                    })
                    .collect();
                let mut warm: Vec<Option<Vec<f64>>> = vec![None; cv.folds];
                let mut predictions = vec![0.0; rows];
                let mut best_predictions = vec![0.0; rows];
                // Strongest penalty first; the scan stops once the pooled
                // held-out error has failed to improve twice in a row, and a
                // strict `<` keeps ties on the larger penalty.
                let (mut best, mut best_err, mut streak) = (0, f64::INFINITY, 0);
                for (c, &lambda) in grid.iter().enumerate() {
                    for (k, (train, test)) in folds.iter().enumerate() {
                        let problem = LassoProblem {
                            gram: &grams[k],
                            xty: &fold_xty[k].0,
                            yty: fold_xty[k].1,
                            rows: train.len(),
                        };
                        let fit = solve_lasso(&problem, lambda, warm[k].as_deref(), LassoSettings::default());
                        for &r in test {
                            predictions[r] = design.predict(&fit.theta_hat, self.words[r]);
                        }
                        warm[k] = Some(fit.theta_hat);
                    }
                    let err: f64 = predictions.iter().zip(y).map(|(p, v)| (v - p) * (v - p)).sum();
                    if err < best_err {
                        (best, best_err, streak) = (c, err, 0);
                        best_predictions.copy_from_slice(&predictions);
                    } else {
                        streak += 1;
                        if streak == 2 {
                            break;
                        }
                    }
                }
                let lambda = grid[best];
                let problem = LassoProblem { gram: &full_gram, xty: &full_xty, yty: dot(y, y), rows };
                let fit = solve_lasso(&problem, lambda, None, LassoSettings::default());
                let nnz = fit.theta_hat.iter().filter(|v| **v != 0.0).count();
                if rows <= nnz {
                    return Ok(None);
                }
                let rss: f64 = (0..rows)
                    .map(|r| {
                        let e = y[r] - design.predict(&fit.theta_hat, self.words[r]);
                        e * e
                    })
                    .sum();
                noise += t.weight * t.weight * rss / (rows - nnz) as f64;
                for (h, p) in held_out.iter_mut().zip(&best_predictions) {
                    *h += t.weight * p;
                }
                fits[i] = Some(TargetFit { theta: fit.theta_hat, lambda: Some(lambda), converged: fit.converged });
            }
        }

        let fits = fits.into_iter().collect::<Option<Vec<_>>>().expect("every target fitted");
        Ok(Some(CvOutcome { fits, held_out, noise }))
    }

    /// The aggregated response the committed model predicts.
    fn aggregate_response(&self, r: usize) -> f64 {
        self.targets.iter().map(|t| t.weight * self.response(t)[r]).sum()
    }

    /// Whether committing now balances the projected cost of the model's
    /// remaining error against the exploration regret already paid.
    fn ready_to_commit(&self, cv: &CvSettings, outcome: &CvOutcome) -> bool {
        let rows = self.words.len();
        let e = rows as f64;
        let cv_mse = (0..rows)
            .map(|r| {
                let d = self.aggregate_response(r) - outcome.held_out[r];
                d * d
            })
            .sum::<f64>()
            / e;
        // Upper-confidence margin for the noise of the excess estimate.
        let margin = outcome.noise * libm::sqrt(2.0 / e);
        let error = libm::sqrt((cv_mse - outcome.noise).max(0.0) + margin);
        let coeffs = self.aggregate(&outcome.fits);
        let (_, best) = argmax_profile(&coeffs, self.width, self.profiles);
        let explored = self
            .words
            .iter()
            .map(|&sw| coeffs.iter().map(|&(m, c)| c * character_bits(m, sw)).sum::<f64>())
            .sum::<f64>()
            / e;
        let gain = best - explored;
        gain > 0.0 && error * (self.horizon - self.round) as f64 <= cv.threshold * gain * self.round as f64
    }

    fn decide(&mut self) -> Result<()> {
        match self.mode.clone() {
            HyperparameterMode::CrossValidated(cv) => {
                match self.fit_cv(&cv)? {
                    Some(outcome) if self.ready_to_commit(&cv, &outcome) => self.commit(outcome.fits),
                    _ => {
                        let next = libm::ceil(self.round as f64 * cv.growth) as usize;
                        self.decision_round = next.max(self.round + 1);
                    }
                }
                Ok(())
            }
            mode => {
                let lambda = match mode {
                    HyperparameterMode::Fixed { lambda, .. } => lambda,
                    HyperparameterMode::Theoretical { delta } if self.has_lasso() => {
                        theoretical_lambda(self.round, self.arms, self.units, delta)?
                    }
                    _ => 0.0,
                };
                match self.fit_fixed(lambda) {
                    Ok(fits) => {
                        self.commit(fits);
                        Ok(())
                    }
                    Err(Error::IllConditioned { min_eigenvalue }) => {
                        let next = (2 * self.round).min(self.horizon / 2);
                        if next <= self.round {
                            return Err(Error::IllConditioned { min_eigenvalue }.context(format!(
                                "{}: exploration design still singular after {} rounds",
                                self.name(),
                                self.round
                            )));
                        }
                        self.warnings
                            .push(format!("ill-conditioned design at round {}; exploring until {next}", self.round));
                        self.decision_round = next;
                        Ok(())
                    }
                    Err(e) => Err(e),
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

impl Policy for NetworkEtc {
    fn name(&self) -> &'static str {
        self.kind.name()
    }

    fn next_action(&mut self) -> ActionProfile {
        if let Some(c) = &self.committed {
            self.phase = Phase::Commit;
            return c.action.clone();
        }
        self.phase = Phase::Explore;
        let levels: Vec<u32> = (0..self.units).map(|_| self.rng.random_range(0..self.arms)).collect();
        ActionProfile::from_levels(levels, self.arms).expect("levels drawn in range")
    }

    fn phase(&self) -> Phase {
        self.phase
    }

    fn observe(&mut self, action: &ActionProfile, observation: &RewardObservation) -> Result<()> {
        if observation.per_unit.len() != self.units {
            return Err(Error::LengthMismatch { expected: self.units, actual: observation.per_unit.len() });
        }
        self.round += 1;
        if self.committed.is_some() {
            return Ok(());
        }
        let index = action.index().ok_or_else(|| Error::param("profile index overflow"))?;
        self.words.push(sign_word(index, self.width));
        for (store, &r) in self.per_unit.iter_mut().zip(&observation.per_unit) {
            store.push(r);
        }
        self.means.push(observation.mean);
        if self.round == self.decision_round && self.round < self.horizon {
            self.decide()?;
        }
        Ok(())
    }

    fn diagnostics(&self) -> PolicyDiagnostics {
        let (lambdas, converged) = match &self.committed {
            Some(c) => (
                c.fits.iter().filter_map(|f| f.lambda).collect(),
                c.fits.iter().filter(|f| f.lambda.is_some()).map(|f| f.converged).collect(),
            ),
            None => (Vec::new(), Vec::new()),
        };
        PolicyDiagnostics {
            explore_rounds: Some(self.words.len()),
            lambdas,
            converged,
            epochs_completed: None,
            committed: self.committed_action().cloned(),
            warnings: self.warnings.clone(),
        }
    }
}
