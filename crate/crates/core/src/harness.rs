//! Seeded experiment runs and regret accounting.
//!
//! Each repetition derives its own seed from `(base_seed, rep)` and splits it
//! into independent graph, model, noise, policy and fold streams. Regret is
//! pseudo-regret against the environment oracle: the true mean of the played
//! profile, never the noisy observation.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::environment::{Environment, NoiseSpec};
use crate::fourier::ActionProfile;
use crate::policies::{HyperparameterMode, NetworkEtc, Phase, Policy, PolicyDiagnostics, SequentialElimination, Ucb};
use crate::seed::{derive_rep_seed, derive_stream_seed, rng_from_seed, Stream};
use crate::{Error, Result};

/// Policy tag plus its own parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    EtcKnown,
    EtcUnknown {
        max_degree: Option<usize>,
    },
    /// The first `⌈fraction · N⌉` units are treated as known.
    EtcPartial {
        known_fraction: f64,
        max_degree: Option<usize>,
    },
    GlobalEtc,
    Elimination {
        delta: f64,
    },
    Ucb,
}

impl PolicySpec {
    pub fn tag(&self) -> &'static str {
        match self {
            PolicySpec::EtcKnown => "etc-known",
            PolicySpec::EtcUnknown { .. } => "etc-unknown",
            PolicySpec::EtcPartial { .. } => "etc-partial",
            PolicySpec::GlobalEtc => "global-etc",
            PolicySpec::Elimination { .. } => "elimination",
            PolicySpec::Ucb => "ucb",
        }
    }

    /// Parses a tag with default parameters.
    pub fn from_tag(tag: &str) -> Result<Self> {
        Ok(match tag {
            "etc-known" => PolicySpec::EtcKnown,
            "etc-unknown" => PolicySpec::EtcUnknown { max_degree: None },
            "etc-partial" => PolicySpec::EtcPartial { known_fraction: 0.5, max_degree: None },
            "global-etc" => PolicySpec::GlobalEtc,
            "elimination" => PolicySpec::Elimination { delta: 0.1 },
            "ucb" => PolicySpec::Ucb,
            other => return Err(Error::param(format!("unknown policy '{other}'"))),
        })
    }

    pub fn is_etc(&self) -> bool {
        matches!(
            self,
            PolicySpec::EtcKnown
                | PolicySpec::EtcUnknown { .. }
                | PolicySpec::EtcPartial { .. }
                | PolicySpec::GlobalEtc
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub units: usize,
    pub arms: u32,
    pub sparsity: usize,
    /// `None` means `10 · 2^N`.
    pub horizon: Option<usize>,
    pub policy: PolicySpec,
    pub mode: HyperparameterMode,
    pub reps: usize,
    pub base_seed: u64,
    /// `None` means `max(1, T / 1000)`.
    pub record_every: Option<usize>,
    pub noise: NoiseSpec,
    /// Draw graph and model once (from rep 0) and reuse them for every rep.
    pub fixed_environment: bool,
    /// Use rep 0's seed for every rep, making reps exact copies.
    pub shared_seed: bool,
}

impl ExperimentConfig {
    pub fn new(units: usize, arms: u32, sparsity: usize, policy: PolicySpec) -> Self {
        Self {
            units,
            arms,
            sparsity,
            horizon: None,
            policy,
            mode: HyperparameterMode::default(),
            reps: 5,
            base_seed: 0,
            record_every: None,
            noise: NoiseSpec::default(),
            fixed_environment: false,
            shared_seed: false,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
            .unwrap_or_else(|| 10usize.saturating_mul(1usize.checked_shl(self.units as u32).unwrap_or(usize::MAX)))
    }

    pub fn record_every(&self) -> usize {
        self.record_every.unwrap_or_else(|| (self.horizon() / 1000).max(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.units == 0 || self.arms == 0 || self.sparsity == 0 {
            return Err(Error::param("N, A and s must be >= 1"));
        }
        if self.reps == 0 {
            return Err(Error::param("reps must be >= 1"));
        }
        if self.horizon() == 0 {
            return Err(Error::param("horizon must be >= 1"));
        }
        if self.record_every == Some(0) {
            return Err(Error::param("record_every must be >= 1"));
        }
        Ok(())
    }

    /// Seed of repetition `rep` after applying `shared_seed`.
    pub fn rep_seed(&self, rep: usize) -> u64 {
        derive_rep_seed(self.base_seed, if self.shared_seed { 0 } else { rep as u64 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceMeta {
    pub policy: &'static str,
    pub units: usize,
    pub arms: u32,
    pub sparsity: usize,
    pub horizon: usize,
    pub rep: usize,
    pub seed: u64,
    pub optimal_action: ActionProfile,
    pub optimal_value: f64,
    /// Rounds whose phase was not `commit`.
    pub non_committed_rounds: usize,
    /// Sums of per-round regret by phase: (explore-like rounds, committed rounds).
    pub phase_regret: (f64, f64),
    pub diagnostics: PolicyDiagnostics,
}

impl TraceMeta {
    /// Mean per-round regret before and after commitment.
    pub fn phase_means(&self) -> (Option<f64>, Option<f64>) {
        let committed = self.horizon - self.non_committed_rounds;
        let mean = |sum: f64, n: usize| (n > 0).then(|| sum / n as f64);
        (mean(self.phase_regret.0, self.non_committed_rounds), mean(self.phase_regret.1, committed))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub rounds: Vec<usize>,
    pub inst: Vec<f64>,
    pub cum: Vec<f64>,
    pub phases: Vec<Phase>,
    pub meta: TraceMeta,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.cum.last().copied().unwrap_or(0.0)
    }
}

/// Environment of repetition `rep`.
pub fn build_environment(config: &ExperimentConfig, rep: usize) -> Result<Environment> {
    let env_seed = if config.fixed_environment { config.rep_seed(0) } else { config.rep_seed(rep) };
    Environment::generate(
        config.units,
        config.arms,
        config.sparsity,
        derive_stream_seed(env_seed, Stream::Graph),
        derive_stream_seed(env_seed, Stream::Model),
        config.noise,
    )
}

/// Instantiates the configured policy for `env`.
pub fn build_policy(config: &ExperimentConfig, env: &Environment, seed: u64) -> Result<Box<dyn Policy>> {
    let horizon = config.horizon();
    let arms = env.arms();
    let mode = config.mode.clone();
    Ok(match &config.policy {
        PolicySpec::EtcKnown => Box::new(NetworkEtc::known(env.graph(), arms, horizon, mode, seed)?),
        PolicySpec::EtcUnknown { max_degree } => {
            Box::new(NetworkEtc::unknown(env.units(), arms, horizon, mode, *max_degree, seed)?)
        }
        PolicySpec::EtcPartial { known_fraction, max_degree } => {
            if !(0.0..=1.0).contains(known_fraction) {
                return Err(Error::param("known fraction must lie in [0, 1]"));
            }
            let count = libm::ceil(known_fraction * env.units() as f64) as usize;
            let known: Vec<usize> = (0..count.min(env.units())).collect();
            Box::new(NetworkEtc::partial(env.graph(), &known, arms, horizon, mode, *max_degree, seed)?)
        }
        PolicySpec::GlobalEtc => Box::new(NetworkEtc::global(env.graph(), arms, horizon, mode, seed)?),
        PolicySpec::Elimination { delta } => {
            Box::new(SequentialElimination::new(env.graph(), arms, horizon, *delta, seed)?)
        }
        PolicySpec::Ucb => Box::new(Ucb::new(env.units(), arms)?),
    })
}

/// One repetition with the configured policy.
pub fn run_once(config: &ExperimentConfig, rep: usize) -> Result<RegretTrace> {
    run_once_with(config, rep, |env, seed| build_policy(config, env, seed))
        .map_err(|e| e.context(format!("{} rep {rep}", config.policy.tag())))
}

/// One repetition with a caller-supplied policy factory.
pub fn run_once_with<F>(config: &ExperimentConfig, rep: usize, make_policy: F) -> Result<RegretTrace>
where
    F: FnOnce(&Environment, u64) -> Result<Box<dyn Policy>>,
{
    config.validate()?;
    let env = build_environment(config, rep)?;
    let seed = config.rep_seed(rep);
    let mut policy = make_policy(&env, derive_stream_seed(seed, Stream::Policy))?;
    drive(config, &env, policy.as_mut(), rep, seed)
}

fn drive(
    config: &ExperimentConfig,
    env: &Environment,
    policy: &mut dyn Policy,
    rep: usize,
    seed: u64,
) -> Result<RegretTrace> {
    let horizon = config.horizon();
    let every = config.record_every();
    let (best, best_value) = env.optimal_action()?;
    let mut noise_rng = rng_from_seed(derive_stream_seed(seed, Stream::Noise));

    let capacity = horizon / every + 1;
    let (mut rounds, mut inst, mut cum, mut phases) = (
        Vec::with_capacity(capacity),
        Vec::with_capacity(capacity),
        Vec::with_capacity(capacity),
        Vec::with_capacity(capacity),
    );
    let mut total = 0.0;
    let mut non_committed = 0;
    let mut phase_regret = (0.0, 0.0);
    for t in 1..=horizon {
        let action = policy.next_action();
        let phase = policy.phase();
        let regret = best_value - env.mean_reward(&action)?;
        let observation = env.sample(&action, t, &mut noise_rng)?;
        policy.observe(&action, &observation).map_err(|e| e.context(format!("round {t}")))?;
        total += regret;
        if phase.is_committed() {
            phase_regret.1 += regret;
        } else {
            non_committed += 1;
            phase_regret.0 += regret;
        }
        if t % every == 0 || t == horizon {
            rounds.push(t);
            inst.push(regret);
            cum.push(total);
            phases.push(phase);
        }
    }
    Ok(RegretTrace {
        rounds,
        inst,
        cum,
        phases,
        meta: TraceMeta {
            policy: policy.name(),
            units: config.units,
            arms: config.arms,
            sparsity: config.sparsity,
            horizon,
            rep,
            seed,
            optimal_action: best,
            optimal_value: best_value,
            non_committed_rounds: non_committed,
            phase_regret,
            diagnostics: policy.diagnostics(),
        },
    })
}

/// Pointwise mean and sample standard deviation of cumulative regret.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub rounds: Vec<usize>,
    pub mean: Vec<f64>,
    /// `(reps − 1)` denominator; zero for a single rep.
    pub std: Vec<f64>,
}

impl Aggregate {
    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    pub fn final_std(&self) -> f64 {
        self.std.last().copied().unwrap_or(0.0)
    }
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.iter().all(|&v| v == values[0]) {
        return (values[0], 0.0);
    }
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

pub fn aggregate(traces: &[RegretTrace]) -> Result<Aggregate> {
    let first = traces.first().ok_or_else(|| Error::param("no traces to aggregate"))?;
    if traces.iter().any(|t| t.rounds != first.rounds) {
        return Err(Error::param("traces record different rounds"));
    }
    let mut mean = Vec::with_capacity(first.rounds.len());
    let mut std = Vec::with_capacity(first.rounds.len());
    let mut column = vec![0.0; traces.len()];
    for k in 0..first.rounds.len() {
        for (c, t) in column.iter_mut().zip(traces) {
            *c = t.cum[k];
        }
        let (m, s) = mean_std(&column);
        mean.push(m);
        std.push(s);
    }
    Ok(Aggregate { rounds: first.rounds.clone(), mean, std })
}

/// Runs every repetition sequentially.
pub fn run_repeated(config: &ExperimentConfig) -> Result<(Vec<RegretTrace>, Aggregate)> {
    config.validate()?;
    let traces = (0..config.reps).map(|rep| run_once(config, rep)).collect::<Result<Vec<_>>>()?;
    let agg = aggregate(&traces)?;
    Ok((traces, agg))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Units,
    Horizon,
    Sparsity,
    Policy,
}

impl SweepAxis {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "n" | "N" => SweepAxis::Units,
            "t" | "T" => SweepAxis::Horizon,
            "s" => SweepAxis::Sparsity,
            "policy" => SweepAxis::Policy,
            other => return Err(Error::param(format!("unknown sweep axis '{other}'"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Units => "n",
            SweepAxis::Horizon => "t",
            SweepAxis::Sparsity => "s",
            SweepAxis::Policy => "policy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValue {
    Int(usize),
    Policy(PolicySpec),
}

impl SweepValue {
    /// Parses every value up front so a bad entry fails before any run.
    pub fn parse_list(axis: SweepAxis, values: &str) -> Result<Vec<SweepValue>> {
        let out: Vec<SweepValue> = values
            .split(',')
            .map(str::trim)
            .map(|v| match axis {
                SweepAxis::Policy => PolicySpec::from_tag(v).map(SweepValue::Policy),
                _ => v
                    .parse::<usize>()
                    .map(SweepValue::Int)
                    .map_err(|_| Error::param(format!("'{v}' is not a nonnegative integer for axis {}", axis.name()))),
            })
            .collect::<Result<_>>()?;
        if out.is_empty() {
            return Err(Error::param("no sweep values"));
        }
        Ok(out)
    }

    pub fn label(&self) -> String {
        match self {
            SweepValue::Int(v) => format!("{v}"),
            SweepValue::Policy(p) => String::from(p.tag()),
        }
    }
}

/// The config for one sweep point. Sweeping `N` keeps `T = 10 · 2^N` unless
/// the horizon was pinned.
pub fn apply_sweep(base: &ExperimentConfig, axis: SweepAxis, value: &SweepValue) -> Result<ExperimentConfig> {
    let mut config = base.clone();
    match (axis, value) {
        (SweepAxis::Units, SweepValue::Int(v)) => config.units = *v,
        (SweepAxis::Horizon, SweepValue::Int(v)) => config.horizon = Some(*v),
        (SweepAxis::Sparsity, SweepValue::Int(v)) => config.sparsity = *v,
        (SweepAxis::Policy, SweepValue::Policy(p)) => config.policy = p.clone(),
        _ => return Err(Error::param("sweep value does not match its axis")),
    }
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: SweepValue,
    pub policy: &'static str,
    pub outcome: core::result::Result<(f64, f64), String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.outcome.is_err()).count()
    }
}

/// Sequential sweep; point failures are recorded and the sweep continues.
pub fn sweep(base: &ExperimentConfig, axis: SweepAxis, values: &[SweepValue]) -> SweepResult {
    let points = values
        .iter()
        .map(|value| {
            let config = apply_sweep(base, axis, value);
            let policy = config.as_ref().map_or(base.policy.tag(), |c| c.policy.tag());
            let outcome = config
                .and_then(|c| run_repeated(&c))
                .map(|(_, agg)| (agg.final_mean(), agg.final_std()))
                .map_err(|e| format!("{e}"));
            SweepPoint { value: value.clone(), policy, outcome }
        })
        .collect();
    SweepResult { axis, points }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(ActionProfile);

    impl Policy for Fixed {
        fn name(&self) -> &'static str {
            "fixed"
        }
        fn next_action(&mut self) -> ActionProfile {
            self.0.clone()
        }
        fn phase(&self) -> Phase {
            Phase::Commit
        }
        fn observe(&mut self, _: &ActionProfile, _: &crate::environment::RewardObservation) -> Result<()> {
            Ok(())
        }
        fn diagnostics(&self) -> PolicyDiagnostics {
            PolicyDiagnostics::default()
        }
    }

    fn small(policy: PolicySpec) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(4, 2, 2, policy);
        c.base_seed = 7;
        c.reps = 3;
        c
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::new(9, 2, 4, PolicySpec::Ucb);
        assert_eq!(c.horizon(), 5120);
        assert_eq!(c.record_every(), 5);
        assert_eq!(c.reps, 5);
    }

    #[test]
    fn oracle_policy_has_zero_regret() {
        let c = small(PolicySpec::Ucb);
        let trace = run_once_with(&c, 0, |env, _| Ok(Box::new(Fixed(env.optimal_action()?.0)))).unwrap();
        assert!(trace.cum.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn worst_policy_accumulates_the_gap() {
        let c = small(PolicySpec::Ucb);
        let env = build_environment(&c, 0).unwrap();
        let count = 16u64;
        let (mut worst, mut worst_v) = (0, f64::INFINITY);
        for i in 0..count {
            let v = env.mean_reward(&ActionProfile::from_index(i, 4, 2)).unwrap();
            if v < worst_v {
                worst = i;
                worst_v = v;
            }
        }
        let trace = run_once_with(&c, 0, |_, _| Ok(Box::new(Fixed(ActionProfile::from_index(worst, 4, 2))))).unwrap();
        let gap = trace.meta.optimal_value - worst_v;
        let expected = c.horizon() as f64 * gap;
        assert!((trace.final_regret() - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn runs_are_deterministic_and_conserve_regret() {
        for policy in [PolicySpec::EtcKnown, PolicySpec::Ucb, PolicySpec::Elimination { delta: 0.1 }] {
            let mut c = small(policy);
            c.record_every = Some(7);
            let a = run_once(&c, 1).unwrap();
            let b = run_once(&c, 1).unwrap();
            assert_eq!(a, b);
            assert_eq!(*a.rounds.last().unwrap(), c.horizon());
            assert!(a.inst.iter().all(|&v| v >= -1e-12));
            assert!(a.cum.windows(2).all(|w| w[1] >= w[0] - 1e-12));
            let full = {
                c.record_every = Some(1);
                run_once(&c, 1).unwrap()
            };
            let prefix: f64 = full.inst.iter().sum();
            assert!((prefix - a.final_regret()).abs() < 1e-9);
        }
    }

    #[test]
    fn etc_exploration_accounting() {
        let c = small(PolicySpec::EtcKnown);
        let trace = run_once(&c, 0).unwrap();
        assert_eq!(Some(trace.meta.non_committed_rounds), trace.meta.diagnostics.explore_rounds);
    }

    #[test]
    fn aggregation() {
        let mut c = small(PolicySpec::Ucb);
        c.reps = 1;
        let (traces, agg) = run_repeated(&c).unwrap();
        assert_eq!(agg.mean, traces[0].cum);
        assert!(agg.std.iter().all(|&s| s == 0.0));

        c.reps = 5;
        c.shared_seed = true;
        let (_, agg) = run_repeated(&c).unwrap();
        assert!(agg.std.iter().all(|&s| s == 0.0));

        assert_eq!(mean_std(&[1.0, 3.0]), (2.0, libm::sqrt(2.0)));
    }

    #[test]
    fn fixed_environment_reuses_instance() {
        let mut c = small(PolicySpec::Ucb);
        c.fixed_environment = true;
        assert_eq!(build_environment(&c, 0).unwrap().graph(), build_environment(&c, 3).unwrap().graph());
        let a = run_once(&c, 0).unwrap();
        let b = run_once(&c, 3).unwrap();
        assert_eq!(a.meta.optimal_value, b.meta.optimal_value);
        assert_ne!(a.meta.seed, b.meta.seed);
    }

    #[test]
    fn sweep_points() {
        let c = small(PolicySpec::Ucb);
        let values = SweepValue::parse_list(SweepAxis::Units, "4").unwrap();
        let result = sweep(&c, SweepAxis::Units, &values);
        let (_, agg) = run_repeated(&c).unwrap();
        assert_eq!(result.points[0].outcome, Ok((agg.final_mean(), agg.final_std())));

        assert!(SweepValue::parse_list(SweepAxis::Units, "5,x").is_err());
        let policies = SweepValue::parse_list(SweepAxis::Policy, "etc-known,ucb").unwrap();
        assert_eq!(policies.len(), 2);

        let bad = sweep(&c, SweepAxis::Sparsity, &[SweepValue::Int(9), SweepValue::Int(2)]);
        assert_eq!(bad.failures(), 1);
        assert!(bad.points[1].outcome.is_ok());
    }

    #[test]
    fn sweeping_units_tracks_default_horizon() {
        let c = small(PolicySpec::Ucb);
        let next = apply_sweep(&c, SweepAxis::Units, &SweepValue::Int(6)).unwrap();
        assert_eq!(next.horizon(), 640);
        let mut pinned = c.clone();
        pinned.horizon = Some(100);
        assert_eq!(apply_sweep(&pinned, SweepAxis::Units, &SweepValue::Int(6)).unwrap().horizon(), 100);
    }
}
