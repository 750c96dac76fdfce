//! UCB1 over the `A^N` joint profiles, paid with the mean reward.

use alloc::vec;
use alloc::vec::Vec;

use super::{Phase, Policy, PolicyDiagnostics};
use crate::environment::RewardObservation;
use crate::fourier::{checked_profile_count, ActionProfile};
use crate::{Error, Result, DEFAULT_PROFILE_CAP};

#[derive(Debug, Clone)]
pub struct Ucb {
    units: usize,
    arms: u32,
    pulls: Vec<u64>,
    sums: Vec<f64>,
    plays: u64,
    phase: Phase,
}

impl Ucb {
    pub fn new(units: usize, arms: u32) -> Result<Self> {
        if units == 0 || arms == 0 {
            return Err(Error::param("need N >= 1 and A >= 1"));
        }
        let count = checked_profile_count(units, arms, DEFAULT_PROFILE_CAP, "ucb arms")? as usize;
        Ok(Self { units, arms, pulls: vec![0; count], sums: vec![0.0; count], plays: 0, phase: Phase::Explore })
    }

    fn choose(&self) -> u64 {
        let count = self.pulls.len() as u64;
        if self.plays < count {
            return self.plays;
        }
        let log_t = libm::log(self.plays as f64);
        let mut best = (0u64, f64::NEG_INFINITY);
        for (j, (&n, &s)) in self.pulls.iter().zip(&self.sums).enumerate() {
            let n = n as f64;
            let score = s / n + libm::sqrt(2.0 * log_t / n);
            if score > best.1 {
                best = (j as u64, score);
            }
        }
        best.0
    }
}

impl Policy for Ucb {
    fn name(&self) -> &'static str {
        "ucb"
    }

    fn next_action(&mut self) -> ActionProfile {
        self.phase = if self.plays < self.pulls.len() as u64 { Phase::Explore } else { Phase::Exploit };
        ActionProfile::from_index(self.choose(), self.units, self.arms)
    }

    fn phase(&self) -> Phase {
        self.phase
    }

    fn observe(&mut self, action: &ActionProfile, observation: &RewardObservation) -> Result<()> {
        let j = action.index().ok_or_else(|| Error::param("profile index overflow"))? as usize;
        if j >= self.pulls.len() {
            return Err(Error::param("profile outside the arm set"));
        }
        self.pulls[j] += 1;
        self.sums[j] += observation.mean;
        self.plays += 1;
        Ok(())
    }

    fn diagnostics(&self) -> PolicyDiagnostics {
        PolicyDiagnostics::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{optimal_action, Environment, NoiseSpec};
    use crate::seed::rng_from_seed;

    fn run(env: &Environment, horizon: usize) -> Vec<ActionProfile> {
        let mut p = Ucb::new(env.units(), env.arms()).unwrap();
        let mut rng = rng_from_seed(0);
        (1..=horizon)
            .map(|t| {
                let a = p.next_action();
                let obs = env.sample(&a, t, &mut rng).unwrap();
                p.observe(&a, &obs).unwrap();
                a
            })
            .collect()
    }

    #[test]
    fn round_robin_first() {
        let env = Environment::generate(3, 2, 1, 0, 1, NoiseSpec::default()).unwrap();
        let actions = run(&env, 8);
        for (i, a) in actions.iter().enumerate() {
            assert_eq!(a.index(), Some(i as u64));
        }
    }

    #[test]
    fn noiseless_two_arms_settle_on_the_optimum() {
        // With a single unit the gap is large enough for the bonus to fade
        // within one extra pass.
        for seed in 0..5 {
            let env = Environment::generate(1, 2, 1, seed, seed + 1, NoiseSpec::noiseless()).unwrap();
            let (best, _) = optimal_action(env.model()).unwrap();
            let actions = run(&env, 4);
            assert!(actions[2..].iter().all(|a| *a == best));
        }
    }
}
