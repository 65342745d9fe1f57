//! Ready-made samplers: scripted replay, categorical distributions over
//! synthetic landscapes, an annealing-backed Ising sampler, and a tallying
//! wrapper for fairness measurements.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enumeration::{Sampler, SamplerError, Solution, SolutionKey};
use crate::ising::{sa_sample_with_rng, AnnealSchedule, IsingModel};

/// Replays a fixed sequence of solutions; mainly for tests and debugging.
pub struct ScriptedSampler {
    script: VecDeque<Solution>,
    cycle: Option<Vec<Solution>>,
    repeat: Option<Solution>,
}

impl ScriptedSampler {
    /// Plays the script once, then fails with [`SamplerError::Exhausted`].
    pub fn new(script: Vec<Solution>) -> Self {
        ScriptedSampler {
            script: script.into(),
            cycle: None,
            repeat: None,
        }
    }

    /// Cycles through the script forever.
    pub fn repeating(script: Vec<Solution>) -> Self {
        assert!(!script.is_empty(), "repeating script must be nonempty");
        ScriptedSampler {
            script: script.clone().into(),
            cycle: Some(script),
            repeat: None,
        }
    }

    /// Plays `prefix`, then repeats `tail` forever.
    pub fn repeating_with_prefix(prefix: Vec<Solution>, tail: Solution) -> Self {
        ScriptedSampler {
            script: prefix.into(),
            cycle: None,
            repeat: Some(tail),
        }
    }
}

impl Sampler for ScriptedSampler {
    fn draw(&mut self) -> Result<Solution, SamplerError> {
        if let Some(next) = self.script.pop_front() {
            return Ok(next);
        }
        if let Some(cycle) = &self.cycle {
            self.script = cycle.clone().into();
            return Ok(self.script.pop_front().expect("cycle is nonempty"));
        }
        match &self.repeat {
            Some(tail) => Ok(tail.clone()),
            None => Err(SamplerError::Exhausted),
        }
    }
}

/// How a [`CategoricalSampler`] distributes probability over its items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandscapeDistribution {
    /// Every item equally likely. Fair, and trivially cost-ordered.
    Uniform,
    /// Item probability proportional to exp(-cost). Items of equal cost are
    /// drawn via a second exactly-uniform stage, so the fair-sampling
    /// condition holds exactly.
    Boltzmann,
}

/// Seeded i.i.d. sampler over a finite synthetic landscape given by a cost
/// per item. Item `i` is keyed by the fixed-width binary encoding of `i`.
pub struct CategoricalSampler {
    solutions: Vec<Solution>,
    pick: Pick,
    rng: ChaCha8Rng,
}

enum Pick {
    Uniform,
    ByClass {
        // class -> (cumulative weight, member item indices)
        cum: Vec<f64>,
        classes: Vec<Vec<usize>>,
    },
}

fn key_width(items: usize) -> u32 {
    if items <= 1 {
        1
    } else {
        usize::BITS - (items - 1).leading_zeros()
    }
}

impl CategoricalSampler {
    pub fn new(costs: &[f64], distribution: LandscapeDistribution, seed: u64) -> Self {
        assert!(!costs.is_empty(), "landscape must have at least one item");
        assert!(costs.iter().all(|c| c.is_finite()), "costs must be finite");
        let width = key_width(costs.len());
        let solutions: Vec<Solution> = costs
            .iter()
            .enumerate()
            .map(|(i, &c)| Solution::new(SolutionKey::from_index(i, width), c))
            .collect();
        let pick = match distribution {
            LandscapeDistribution::Uniform => Pick::Uniform,
            LandscapeDistribution::Boltzmann => {
                let mut by_cost: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
                for (i, &c) in costs.iter().enumerate() {
                    // total order over finite costs for exact grouping
                    by_cost.entry(c.to_bits() ^ sign_flip(c)).or_default().push(i);
                }
                let mut cum = Vec::with_capacity(by_cost.len());
                let mut classes = Vec::with_capacity(by_cost.len());
                let mut total = 0.0;
                for members in by_cost.into_values() {
                    let cost = costs[members[0]];
                    total += members.len() as f64 * (-cost).exp();
                    cum.push(total);
                    classes.push(members);
                }
                Pick::ByClass { cum, classes }
            }
        };
        CategoricalSampler {
            solutions,
            pick,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }
}

// maps f64 bits to an integer whose order matches numeric order
fn sign_flip(c: f64) -> u64 {
    if c.is_sign_negative() {
        u64::MAX
    } else {
        1 << 63
    }
}

impl Sampler for CategoricalSampler {
    fn draw(&mut self) -> Result<Solution, SamplerError> {
        let index = match &self.pick {
            Pick::Uniform => self.rng.gen_range(0..self.solutions.len()),
            Pick::ByClass { cum, classes } => {
                let total = *cum.last().expect("at least one class");
                let u = self.rng.gen::<f64>() * total;
                let class = cum.partition_point(|&c| c <= u).min(classes.len() - 1);
                let members = &classes[class];
                members[self.rng.gen_range(0..members.len())]
            }
        };
        Ok(self.solutions[index].clone())
    }
}

/// Cost-ordered fair sampler over the full configuration space of an Ising
/// model: each draw runs one annealing pass and reports the final
/// configuration with its energy as the cost. Every spin configuration is
/// feasible, so no rejection happens here.
pub struct IsingSampler {
    model: IsingModel,
    schedule: AnnealSchedule,
    rng: ChaCha8Rng,
}

impl IsingSampler {
    pub fn new(model: IsingModel, schedule: AnnealSchedule, seed: u64) -> Self {
        IsingSampler {
            model,
            schedule,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Sampler for IsingSampler {
    fn draw(&mut self) -> Result<Solution, SamplerError> {
        let config = sa_sample_with_rng(&self.model, &self.schedule, &mut self.rng);
        let cost = self
            .model
            .energy(&config)
            .expect("configuration drawn from the model itself");
        Ok(Solution::new(config.to_key(), cost))
    }
}

/// Wrapper that counts how often each solution key is drawn, for fairness
/// statistics over a whole campaign.
pub struct TallySampler<S> {
    inner: S,
    counts: BTreeMap<SolutionKey, u64>,
    draws: u64,
}

impl<S: Sampler> TallySampler<S> {
    pub fn new(inner: S) -> Self {
        TallySampler {
            inner,
            counts: BTreeMap::new(),
            draws: 0,
        }
    }

    pub fn counts(&self) -> &BTreeMap<SolutionKey, u64> {
        &self.counts
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn into_counts(self) -> BTreeMap<SolutionKey, u64> {
        self.counts
    }
}

impl<S: Sampler> Sampler for TallySampler<S> {
    fn draw(&mut self) -> Result<Solution, SamplerError> {
        let solution = self.inner.draw()?;
        self.draws += 1;
        *self.counts.entry(solution.key.clone()).or_insert(0) += 1;
        Ok(solution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::Sampler;

    #[test]
    fn scripted_sampler_modes() {
        let a = Solution::new(SolutionKey::from_index(0, 2), 0.0);
        let b = Solution::new(SolutionKey::from_index(1, 2), 1.0);
        let mut once = ScriptedSampler::new(vec![a.clone()]);
        assert_eq!(once.draw().unwrap(), a);
        assert!(once.draw().is_err());
        let mut cyc = ScriptedSampler::repeating(vec![a.clone(), b.clone()]);
        let drawn: Vec<Solution> = (0..5).map(|_| cyc.draw().unwrap()).collect();
        assert_eq!(drawn, vec![a.clone(), b.clone(), a.clone(), b.clone(), a.clone()]);
        let mut pre = ScriptedSampler::repeating_with_prefix(vec![b.clone()], a.clone());
        assert_eq!(pre.draw().unwrap(), b);
        assert_eq!(pre.draw().unwrap(), a);
        assert_eq!(pre.draw().unwrap(), a);
    }

    #[test]
    fn uniform_sampler_is_seed_deterministic() {
        let costs = vec![0.0, 0.0, 1.0];
        let mut s1 = CategoricalSampler::new(&costs, LandscapeDistribution::Uniform, 7);
        let mut s2 = CategoricalSampler::new(&costs, LandscapeDistribution::Uniform, 7);
        for _ in 0..100 {
            assert_eq!(s1.draw().unwrap(), s2.draw().unwrap());
        }
    }

    #[test]
    fn boltzmann_sampler_prefers_low_cost() {
        let costs = vec![0.0, 3.0];
        let mut s = CategoricalSampler::new(&costs, LandscapeDistribution::Boltzmann, 11);
        let mut low = 0u32;
        for _ in 0..2000 {
            if s.draw().unwrap().cost == 0.0 {
                low += 1;
            }
        }
        // p(low) = 1 / (1 + e^-3) ~ 0.953
        assert!(low > 1800, "low-cost draws: {low}");
    }

    #[test]
    fn tally_sampler_counts_every_draw() {
        let costs = vec![0.0, 0.0];
        let inner = CategoricalSampler::new(&costs, LandscapeDistribution::Uniform, 3);
        let mut tally = TallySampler::new(inner);
        for _ in 0..50 {
            tally.draw().unwrap();
        }
        assert_eq!(tally.draws(), 50);
        assert_eq!(tally.counts().values().sum::<u64>(), 50);
    }
}
