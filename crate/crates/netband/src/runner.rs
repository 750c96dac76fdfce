//! Parallel repetitions and sweeps.
//!
//! Every repetition owns its RNGs, policy and environment, so the results do
//! not depend on scheduling: rayon only decides when each one runs, and the
//! collected vectors keep repetition order.

use anyhow::{Context, Result};
use netband_core::harness::{
    aggregate, apply_sweep, run_once, Aggregate, ExperimentConfig, RegretTrace, SweepAxis, SweepPoint, SweepResult,
    SweepValue,
};
use rayon::prelude::*;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "NETBAND_THREADS";

/// A pool sized by `NETBAND_THREADS`, or rayon's default when unset.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_VAR) {
        let threads: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .with_context(|| format!("{THREADS_VAR} must be a positive integer, got '{raw}'"))?;
        builder = builder.num_threads(threads);
    }
    builder.build().context("cannot start the worker pool")
}

/// All repetitions of `config`, run concurrently, plus their aggregate.
pub fn run_repeated(config: &ExperimentConfig) -> Result<(Vec<RegretTrace>, Aggregate)> {
    config.validate()?;
    let traces =
        (0..config.reps).into_par_iter().map(|rep| run_once(config, rep)).collect::<netband_core::Result<Vec<_>>>()?;
    let agg = aggregate(&traces)?;
    Ok((traces, agg))
}

/// One `run_repeated` per value; failing points are recorded, not fatal.
pub fn sweep(base: &ExperimentConfig, axis: SweepAxis, values: &[SweepValue]) -> SweepResult {
    let points = values
        .par_iter()
        .map(|value| {
            let config = apply_sweep(base, axis, value);
            let policy = config.as_ref().map_or(base.policy.tag(), |c| c.policy.tag());
            let outcome = config
                .map_err(anyhow::Error::from)
                .and_then(|c| run_repeated(&c))
                .map(|(_, agg)| (agg.final_mean(), agg.final_std()))
                .map_err(|e| format!("{e:#}"));
            SweepPoint { value: value.clone(), policy, outcome }
        })
        .collect();
    SweepResult { axis, points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use netband_core::harness::{run_repeated as run_sequential, PolicySpec};

    #[test]
    fn parallel_matches_sequential() {
        let mut config = ExperimentConfig::new(4, 2, 2, PolicySpec::EtcKnown);
        config.base_seed = 3;
        let (a, agg_a) = run_repeated(&config).unwrap();
        let (b, agg_b) = run_sequential(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(agg_a, agg_b);
    }

    #[test]
    fn sweep_keeps_value_order() {
        let config = ExperimentConfig::new(3, 2, 1, PolicySpec::Ucb);
        let values = SweepValue::parse_list(SweepAxis::Units, "5,3,4").unwrap();
        let result = sweep(&config, SweepAxis::Units, &values);
        let labels: Vec<String> = result.points.iter().map(|p| p.value.label()).collect();
        assert_eq!(labels, ["5", "3", "4"]);
        assert_eq!(result.failures(), 0);
    }

    #[test]
    fn failing_point_does_not_stop_the_sweep() {
        let config = ExperimentConfig::new(3, 2, 2, PolicySpec::Ucb);
        // s = 0 is invalid.
        let values = SweepValue::parse_list(SweepAxis::Sparsity, "0,2").unwrap();
        let result = sweep(&config, SweepAxis::Sparsity, &values);
        assert_eq!(result.failures(), 1);
        assert!(result.points[1].outcome.is_ok());
    }
}
