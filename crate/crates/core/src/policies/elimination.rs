//! Sequential action elimination over an explicit active set.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{check_delta, Phase, Policy, PolicyDiagnostics};
use crate::environment::{InterferenceGraph, RewardObservation};
use crate::fourier::{checked_profile_count, ActionProfile};
use crate::seed::rng_from_seed;
use crate::{Error, Result, DEFAULT_PROFILE_CAP};

/// `E_ℓ = ⌈8 · 4^ℓ · log(2 N A^s / δ_ℓ)⌉` with `δ_ℓ = δ / (ℓ(ℓ+1))`,
/// saturating at `usize::MAX`.
pub fn epoch_budget(epoch: u32, units: usize, arms: u32, sparsity: usize, delta: f64) -> Result<usize> {
    if epoch == 0 || units == 0 || arms == 0 {
        return Err(Error::param("epoch budget needs l, N, A >= 1"));
    }
    check_delta(delta)?;
    let l = f64::from(epoch);
    let delta_l = delta / (l * (l + 1.0));
    let log_term = libm::log(2.0 * units as f64 / delta_l) + sparsity as f64 * libm::log(f64::from(arms));
    let e = libm::ceil(8.0 * libm::pow(4.0, l) * log_term);
    Ok(if e >= usize::MAX as f64 { usize::MAX } else { e as usize })
}

/// Outcome of one completed epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSummary {
    pub epoch: u32,
    pub budget: usize,
    /// Active set the epoch explored, as profile indices.
    pub active: Vec<u64>,
    /// Survivors, as profile indices.
    pub survivors: Vec<u64>,
    pub best: u64,
}

#[derive(Debug, Clone)]
struct Play {
    unit: usize,
    local: usize,
    profile: u64,
}

#[derive(Debug, Clone)]
pub struct SequentialElimination {
    neighborhoods: Vec<Vec<usize>>,
    units: usize,
    arms: u32,
    horizon: usize,
    delta: f64,
    sparsity: usize,
    rng: ChaCha8Rng,
    active: Vec<u64>,
    epoch: u32,
    budget: usize,
    plan: Vec<Play>,
    position: usize,
    plays_done: usize,
    sum: f64,
    estimates: Vec<Vec<Option<f64>>>,
    /// Set once the remaining horizon cannot hold a full epoch.
    truncated: bool,
    best_last: Option<u64>,
    history: Vec<EpochSummary>,
    round: usize,
    phase: Phase,
}

fn levels_of(index: u64, units: usize, arms: u32, out: &mut [u32]) {
    let mut rest = index;
    for slot in out[..units].iter_mut().rev() {
        *slot = (rest % u64::from(arms)) as u32;
        rest /= u64::from(arms);
    }
}

fn local_of(levels: &[u32], hood: &[usize], arms: u32) -> usize {
    hood.iter().fold(0usize, |acc, &m| acc * arms as usize + levels[m] as usize)
}

impl SequentialElimination {
    pub fn new(graph: &InterferenceGraph, arms: u32, horizon: usize, delta: f64, seed: u64) -> Result<Self> {
        check_delta(delta)?;
        if horizon == 0 || arms == 0 {
            return Err(Error::param("need T >= 1 and A >= 1"));
        }
        let units = graph.units();
        let count = checked_profile_count(units, arms, DEFAULT_PROFILE_CAP, "elimination active set")?;
        let neighborhoods = graph.neighborhoods().to_vec();
        let estimates = neighborhoods.iter().map(|h| vec![None; (arms as usize).pow(h.len() as u32)]).collect();
        let mut policy = Self {
            units,
            arms,
            horizon,
            delta,
            sparsity: graph.max_degree(),
            rng: rng_from_seed(seed),
            active: (0..count).collect(),
            epoch: 0,
            budget: 0,
            plan: Vec::new(),
            position: 0,
            plays_done: 0,
            sum: 0.0,
            estimates,
            neighborhoods,
            truncated: false,
            best_last: None,
            history: Vec::new(),
            round: 0,
            phase: Phase::Explore,
        };
        policy.start_epoch()?;
        Ok(policy)
    }

    pub fn active_set(&self) -> &[u64] {
        &self.active
    }

    pub fn history(&self) -> &[EpochSummary] {
        &self.history
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    fn start_epoch(&mut self) -> Result<()> {
        self.epoch += 1;
        self.budget = epoch_budget(self.epoch, self.units, self.arms, self.sparsity, self.delta)?;
        for est in &mut self.estimates {
            est.iter_mut().for_each(|e| *e = None);
        }
        // Representative of each local configuration: first match in C_ℓ.
        let mut first: Vec<Vec<Option<u64>>> = self.estimates.iter().map(|e| vec![None; e.len()]).collect();
        let mut levels = vec![0u32; self.units];
        for &a in &self.active {
            levels_of(a, self.units, self.arms, &mut levels);
            for (n, hood) in self.neighborhoods.iter().enumerate() {
                let slot = &mut first[n][local_of(&levels, hood, self.arms)];
                if slot.is_none() {
                    *slot = Some(a);
                }
            }
        }
        self.plan = first
            .iter()
            .enumerate()
            .flat_map(|(n, reps)| {
                reps.iter().enumerate().filter_map(move |(local, r)| r.map(|profile| Play { unit: n, local, profile }))
            })
            .collect();
        self.position = 0;
        self.plays_done = 0;
        self.sum = 0.0;
        let needed = (self.plan.len() as u128) * self.budget as u128;
        if needed > (self.horizon - self.round.min(self.horizon)) as u128 {
            self.truncated = true;
        }
        Ok(())
    }

    fn finish_epoch(&mut self) -> Result<()> {
        let mut levels = vec![0u32; self.units];
        let mut values = Vec::with_capacity(self.active.len());
        for &a in &self.active {
            levels_of(a, self.units, self.arms, &mut levels);
            let mut total = 0.0;
            for (n, hood) in self.neighborhoods.iter().enumerate() {
                total += self.estimates[n][local_of(&levels, hood, self.arms)]
                    .expect("every active configuration was explored");
            }
            values.push(total / self.units as f64);
        }
        let (mut best_i, mut best_v) = (0, f64::NEG_INFINITY);
        for (i, &v) in values.iter().enumerate() {
            if v > best_v {
                best_i = i;
                best_v = v;
            }
        }
        let best = self.active[best_i];
        let cut = best_v - libm::ldexp(1.0, -(self.epoch as i32));
        let survivors: Vec<u64> = self.active.iter().zip(&values).filter(|(_, &v)| v >= cut).map(|(&a, _)| a).collect();
        assert!(!survivors.is_empty(), "the maximizer always survives");
        self.history.push(EpochSummary {
            epoch: self.epoch,
            budget: self.budget,
            active: core::mem::take(&mut self.active),
            survivors: survivors.clone(),
            best,
        });
        self.active = survivors;
        self.best_last = Some(best);
        self.start_epoch()
    }
}

impl Policy for SequentialElimination {
    fn name(&self) -> &'static str {
        "elimination"
    }

    fn next_action(&mut self) -> ActionProfile {
        let index = if self.truncated {
            match self.best_last {
                Some(b) => {
                    self.phase = Phase::Exploit;
                    b
                }
                None => {
                    self.phase = Phase::Explore;
                    let levels: Vec<u32> = (0..self.units).map(|_| self.rng.random_range(0..self.arms)).collect();
                    return ActionProfile::from_levels(levels, self.arms).expect("levels in range");
                }
            }
        } else {
            self.phase = Phase::Epoch(self.epoch);
            self.plan[self.position].profile
        };
        ActionProfile::from_index(index, self.units, self.arms)
    }

    fn phase(&self) -> Phase {
        self.phase
    }

    fn observe(&mut self, _action: &ActionProfile, observation: &RewardObservation) -> Result<()> {
        if observation.per_unit.len() != self.units {
            return Err(Error::LengthMismatch { expected: self.units, actual: observation.per_unit.len() });
        }
        self.round += 1;
        if self.truncated {
            return Ok(());
        }
        let play = &self.plan[self.position];
        self.sum += observation.per_unit[play.unit];
        self.plays_done += 1;
        if self.plays_done == self.budget {
            self.estimates[play.unit][play.local] = Some(self.sum / self.budget as f64);
            self.position += 1;
            self.plays_done = 0;
            self.sum = 0.0;
            if self.position == self.plan.len() {
                self.finish_epoch()?;
            }
        }
        Ok(())
    }

    fn diagnostics(&self) -> PolicyDiagnostics {
        PolicyDiagnostics {
            epochs_completed: Some(self.history.len()),
            committed: self.best_last.map(|b| ActionProfile::from_index(b, self.units, self.arms)),
            ..PolicyDiagnostics::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{optimal_action, Environment, NoiseSpec};

    #[test]
    fn budget_example() {
        // δ = 0.5, ℓ = 1, N = 2, A = 2, s = 1: ⌈32 log 32⌉.
        let expected = libm::ceil(32.0 * libm::log(32.0)) as usize;
        assert_eq!(epoch_budget(1, 2, 2, 1, 0.5).unwrap(), expected);
        assert_eq!(expected, 111);
        assert!(epoch_budget(2, 2, 2, 1, 0.5).unwrap() > 4 * expected);
        assert_eq!(epoch_budget(60, 2, 2, 1, 0.5).unwrap(), usize::MAX);
    }

    #[test]
    fn every_active_profile_represents_itself() {
        let env = Environment::generate(4, 2, 2, 1, 2, NoiseSpec::noiseless()).unwrap();
        let p = SequentialElimination::new(env.graph(), 2, 1 << 30, 0.1, 0).unwrap();
        let mut levels = vec![0u32; 4];
        for &a in p.active_set() {
            levels_of(a, 4, 2, &mut levels);
            for (n, hood) in p.neighborhoods.iter().enumerate() {
                let local = local_of(&levels, hood, 2);
                assert!(p.plan.iter().any(|play| play.unit == n && play.local == local));
            }
        }
    }

    #[test]
    fn noiseless_elimination_keeps_the_optimum() {
        for seed in 0..5 {
            let env = Environment::generate(4, 2, 2, seed, seed + 100, NoiseSpec::noiseless()).unwrap();
            let horizon = 2_000_000;
            let mut p = SequentialElimination::new(env.graph(), 2, horizon, 0.1, seed).unwrap();
            let (best, _) = optimal_action(env.model()).unwrap();
            let best = best.index().unwrap();
            let mut rng = rng_from_seed(seed);
            for t in 1..=horizon {
                let a = p.next_action();
                let obs = env.sample(&a, t, &mut rng).unwrap();
                p.observe(&a, &obs).unwrap();
                if p.truncated {
                    break;
                }
            }
            assert!(!p.history().is_empty());
            for h in p.history() {
                assert!(h.survivors.contains(&best));
                assert_eq!(h.best, best);
            }
        }
    }

    #[test]
    fn optimum_survives_noisy_epochs() {
        for seed in 0..10 {
            let env = Environment::generate(3, 2, 2, seed, seed + 50, NoiseSpec::default()).unwrap();
            let horizon = 20_000;
            let mut p = SequentialElimination::new(env.graph(), 2, horizon, 0.1, seed).unwrap();
            let best = optimal_action(env.model()).unwrap().0.index().unwrap();
            let mut rng = rng_from_seed(seed + 99);
            for t in 1..=horizon {
                let a = p.next_action();
                let obs = env.sample(&a, t, &mut rng).unwrap();
                p.observe(&a, &obs).unwrap();
            }
            assert!(p.history().len() >= 2, "seed {seed}");
            assert!(p.history().iter().all(|h| h.survivors.contains(&best)), "seed {seed}");
        }
    }

    #[test]
    fn short_horizon_plays_uniformly() {
        let env = Environment::generate(5, 2, 2, 0, 1, NoiseSpec::default()).unwrap();
        let mut p = SequentialElimination::new(env.graph(), 2, 100, 0.1, 0).unwrap();
        let a = p.next_action();
        assert_eq!(p.phase(), Phase::Explore);
        assert_eq!(a.units(), 5);
        assert_eq!(p.diagnostics().epochs_completed, Some(0));
    }
}
