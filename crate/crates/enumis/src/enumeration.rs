//! The two deadline-driven enumeration loops over an abstract sampler.
//!
//! [`enumerate_csp`] collects all feasible solutions of a constraint
//! satisfaction problem from a fair sampler. [`enumerate_opt`] collects all
//! minimum-cost solutions of an optimization problem from a cost-ordered
//! fair sampler, tracking a provisional threshold `theta` that only ever
//! decreases. Both loops stop the first time an accepted-sample deadline
//! passes without the next distinct solution having appeared; under the
//! sampler assumptions the returned set is incomplete with probability
//! below `epsilon`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, BoundsError};

/// Canonical fixed-length bit string identifying a solution. Bits are packed
/// little-endian within bytes; unused trailing bits are forced to zero so
/// equality and ordering act on the logical bit string alone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SolutionKey {
    len: u32,
    bits: Vec<u8>,
}

impl SolutionKey {
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut packed = vec![0u8; bits.len().div_ceil(8)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                packed[i / 8] |= 1 << (i % 8);
            }
        }
        SolutionKey {
            len: bits.len() as u32,
            bits: packed,
        }
    }

    /// Key of length `len` with ones exactly at `indices`.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut packed = vec![0u8; len.div_ceil(8)];
        for i in indices {
            assert!(i < len, "index {i} out of range for key length {len}");
            packed[i / 8] |= 1 << (i % 8);
        }
        SolutionKey {
            len: len as u32,
            bits: packed,
        }
    }

    /// Fixed-width binary encoding of `value`, used by synthetic samplers.
    pub fn from_index(value: usize, width: u32) -> Self {
        let bits: Vec<bool> = (0..width).map(|b| value >> b & 1 == 1).collect();
        SolutionKey::from_bools(&bits)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len as usize);
        self.bits[i / 8] >> (i % 8) & 1 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len as usize).filter(|&i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }
}

impl fmt::Debug for SolutionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len as usize {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Display for SolutionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A feasible solution paired with its cost. Identity, ordering and hashing
/// are by key only; the cost is a pure function of the key for any given
/// problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Solution {
    pub key: SolutionKey,
    pub cost: f64,
}

impl Solution {
    pub fn new(key: SolutionKey, cost: f64) -> Self {
        Solution { key, cost }
    }
}

impl PartialEq for Solution {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Solution {}

impl PartialOrd for Solution {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Solution {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

impl std::hash::Hash for Solution {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("sampler produced no feasible draw within {cap} attempts")]
    RedrawCapExhausted { cap: u64 },
    #[error("scripted sampler ran out of draws")]
    Exhausted,
    #[error("{0}")]
    Other(String),
}

/// Source of independent, identically distributed feasible solutions.
///
/// Implementations take a seed at construction; equal seeds must replay
/// identical draw sequences. The enumeration loops additionally assume the
/// fair (equal-cost solutions equiprobable) and, for [`enumerate_opt`],
/// cost-ordered (lower cost never less probable) sampling conditions. Those
/// conditions are documented contracts, not verified at run time; the
/// `stats` module measures how well a sampler meets them.
pub trait Sampler {
    fn draw(&mut self) -> Result<Solution, SamplerError>;
}

impl<S: Sampler + ?Sized> Sampler for &mut S {
    fn draw(&mut self) -> Result<Solution, SamplerError> {
        (**self).draw()
    }
}

/// Why an enumeration run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// A deadline passed without the next distinct solution; the normal,
    /// guarantee-carrying exit.
    DeadlineMissed,
    /// The optional raw-draw budget ran out first. No failure-probability
    /// guarantee applies to the returned set.
    BudgetCapReached,
}

/// Events recorded when tracing is enabled, for replay and debugging.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    /// Accepted draw that enlarged the collected set.
    Collected { tau: u64, key: SolutionKey },
    /// Accepted draw of an already-collected solution.
    Duplicate { tau: u64 },
    /// Draw with cost above the current threshold; does not advance tau.
    RejectedAboveThreshold { raw_draws: u64 },
    /// A strictly better solution arrived: theta drops, tau and the set reset.
    ThresholdLowered { theta: f64, key: SolutionKey },
    /// Deadline for `m` distinct solutions passed with fewer collected.
    DeadlineMissed { m: u64, deadline: u64 },
    BudgetCapReached { raw_draws: u64 },
}

/// Outcome of an enumeration run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult {
    /// Collected solutions, ordered by key.
    pub solutions: BTreeSet<Solution>,
    /// Final threshold: the minimum cost observed across all draws.
    pub theta: f64,
    /// Final accepted-sample count tau. When the run stopped at a deadline
    /// this equals that deadline.
    pub accepted_samples: u64,
    /// Total draws requested from the sampler, including threshold
    /// rejections that did not advance tau.
    pub raw_draws: u64,
    pub stop_reason: StopReason,
    /// Present when the run was started with tracing enabled.
    pub trace: Option<Vec<TraceEvent>>,
}

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("budget cap must be at least 1")]
    ZeroBudgetCap,
    #[error("sampler produced a non-finite cost")]
    NonFiniteCost,
    #[error("seed solution cost {seed_cost} does not equal threshold {theta}")]
    SeedCostMismatch { seed_cost: f64, theta: f64 },
}

struct Tracer(Option<Vec<TraceEvent>>);

impl Tracer {
    fn push(&mut self, event: TraceEvent) {
        if let Some(events) = &mut self.0 {
            events.push(event);
        }
    }
}

fn checked_draw<S: Sampler>(
    sampler: &mut S,
    raw_draws: &mut u64,
) -> Result<Solution, EnumerateError> {
    let solution = sampler.draw()?;
    *raw_draws += 1;
    if !solution.cost.is_finite() {
        return Err(EnumerateError::NonFiniteCost);
    }
    Ok(solution)
}

/// Enumerate all feasible solutions of a constraint satisfaction problem
/// from a fair sampler.
///
/// Draws one solution, then for m = 2, 3, ... keeps drawing until the
/// accepted-sample count tau reaches `deadline(m, kappa1(epsilon), epsilon)`;
/// if fewer than m distinct solutions have been collected by then, returns
/// them. Every feasible draw advances tau, starting at 1 with the first.
/// Requires epsilon in (0, 1/e).
pub fn enumerate_csp<S: Sampler>(
    sampler: &mut S,
    epsilon: f64,
    budget_cap: Option<u64>,
) -> Result<EnumerationResult, EnumerateError> {
    run_csp(sampler, epsilon, budget_cap, false)
}

/// [`enumerate_csp`] with per-event tracing enabled.
pub fn enumerate_csp_traced<S: Sampler>(
    sampler: &mut S,
    epsilon: f64,
    budget_cap: Option<u64>,
) -> Result<EnumerationResult, EnumerateError> {
    run_csp(sampler, epsilon, budget_cap, true)
}

fn run_csp<S: Sampler>(
    sampler: &mut S,
    epsilon: f64,
    budget_cap: Option<u64>,
    traced: bool,
) -> Result<EnumerationResult, EnumerateError> {
    let kappa = bounds::kappa1(epsilon)?;
    if budget_cap == Some(0) {
        return Err(EnumerateError::ZeroBudgetCap);
    }
    let mut trace = Tracer(traced.then(Vec::new));
    let mut raw_draws = 0u64;

    let first = checked_draw(sampler, &mut raw_draws)?;
    let mut theta = first.cost;
    let mut tau = 1u64;
    trace.push(TraceEvent::Collected {
        tau,
        key: first.key.clone(),
    });
    let mut solutions = BTreeSet::from([first]);

    loop {
        let m = solutions.len() as u64 + 1;
        let target = bounds::deadline(m, kappa, epsilon)?;
        let mut extended = false;
        while tau < target {
            if budget_cap.is_some_and(|cap| raw_draws >= cap) {
                trace.push(TraceEvent::BudgetCapReached { raw_draws });
                return Ok(EnumerationResult {
                    solutions,
                    theta,
                    accepted_samples: tau,
                    raw_draws,
                    stop_reason: StopReason::BudgetCapReached,
                    trace: trace.0,
                });
            }
            let draw = checked_draw(sampler, &mut raw_draws)?;
            tau += 1;
            theta = theta.min(draw.cost);
            let key = draw.key.clone();
            if solutions.insert(draw) {
                trace.push(TraceEvent::Collected { tau, key });
                extended = true;
                break;
            }
            trace.push(TraceEvent::Duplicate { tau });
        }
        if !extended {
            trace.push(TraceEvent::DeadlineMissed { m, deadline: target });
            return Ok(EnumerationResult {
                solutions,
                theta,
                accepted_samples: tau,
                raw_draws,
                stop_reason: StopReason::DeadlineMissed,
                trace: trace.0,
            });
        }
    }
}

/// Enumerate all minimum-cost solutions of an optimization problem from a
/// cost-ordered fair sampler.
///
/// Maintains the threshold `theta` (minimum cost seen) and repeatedly runs
/// the threshold-collection round at the current theta. A round that ends
/// without lowering theta ends the run. The accepted-sample count resets to
/// 1 whenever theta drops, with the newly found better solution as the sole
/// collected one. Requires epsilon in (0, e^(-3/2)).
pub fn enumerate_opt<S: Sampler>(
    sampler: &mut S,
    epsilon: f64,
    budget_cap: Option<u64>,
) -> Result<EnumerationResult, EnumerateError> {
    run_opt(sampler, epsilon, budget_cap, false)
}

/// [`enumerate_opt`] with per-event tracing enabled.
pub fn enumerate_opt_traced<S: Sampler>(
    sampler: &mut S,
    epsilon: f64,
    budget_cap: Option<u64>,
) -> Result<EnumerationResult, EnumerateError> {
    run_opt(sampler, epsilon, budget_cap, true)
}

fn run_opt<S: Sampler>(
    sampler: &mut S,
    epsilon: f64,
    budget_cap: Option<u64>,
    traced: bool,
) -> Result<EnumerationResult, EnumerateError> {
    let kappa = bounds::kappa2(epsilon)?;
    if budget_cap == Some(0) {
        return Err(EnumerateError::ZeroBudgetCap);
    }
    let mut trace = Tracer(traced.then(Vec::new));
    let mut raw_draws = 0u64;

    let first = checked_draw(sampler, &mut raw_draws)?;
    let mut theta = first.cost;
    trace.push(TraceEvent::Collected {
        tau: 1,
        key: first.key.clone(),
    });
    let mut seed = first;

    loop {
        let round = threshold_round(
            sampler,
            theta,
            seed,
            kappa,
            epsilon,
            &mut raw_draws,
            budget_cap,
            &mut trace,
        )?;
        match round {
            RoundOutcome::Lowered(better) => {
                theta = better.cost;
                trace.push(TraceEvent::ThresholdLowered {
                    theta,
                    key: better.key.clone(),
                });
                trace.push(TraceEvent::Collected {
                    tau: 1,
                    key: better.key.clone(),
                });
                seed = better;
            }
            RoundOutcome::Missed { solutions, tau } => {
                return Ok(EnumerationResult {
                    solutions,
                    theta,
                    accepted_samples: tau,
                    raw_draws,
                    stop_reason: StopReason::DeadlineMissed,
                    trace: trace.0,
                });
            }
            RoundOutcome::Budget { solutions, tau } => {
                return Ok(EnumerationResult {
                    solutions,
                    theta,
                    accepted_samples: tau,
                    raw_draws,
                    stop_reason: StopReason::BudgetCapReached,
                    trace: trace.0,
                });
            }
        }
    }
}

/// Result of one threshold-collection round.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRound {
    /// Distinct solutions of cost `theta` collected before stopping, or the
    /// singleton better solution when the threshold dropped.
    pub solutions: BTreeSet<Solution>,
    /// Unchanged input threshold, or the strictly lower cost of a better draw.
    pub theta: f64,
    /// Final accepted-sample count of the round (1 when the threshold dropped:
    /// the better solution restarts the count).
    pub accepted_samples: u64,
}

/// One collection round at a fixed cost threshold, usable standalone.
///
/// Starting from `seed_solution` (which must cost exactly `theta`, counted
/// as the first accepted draw), collects distinct solutions of cost equal to
/// `theta` under `kappa2` deadlines. Draws costing more than `theta` are
/// discarded without advancing the accepted count; a draw costing less
/// returns immediately with that draw as the new singleton set.
pub fn enumerate_threshold<S: Sampler>(
    sampler: &mut S,
    theta: f64,
    seed_solution: Solution,
    epsilon: f64,
) -> Result<ThresholdRound, EnumerateError> {
    let kappa = bounds::kappa2(epsilon)?;
    if seed_solution.cost != theta {
        return Err(EnumerateError::SeedCostMismatch {
            seed_cost: seed_solution.cost,
            theta,
        });
    }
    let mut raw_draws = 0u64;
    let mut trace = Tracer(None);
    let outcome = threshold_round(
        sampler,
        theta,
        seed_solution,
        kappa,
        epsilon,
        &mut raw_draws,
        None,
        &mut trace,
    )?;
    Ok(match outcome {
        RoundOutcome::Lowered(better) => {
            let theta = better.cost;
            ThresholdRound {
                solutions: BTreeSet::from([better]),
                theta,
                accepted_samples: 1,
            }
        }
        RoundOutcome::Missed { solutions, tau } | RoundOutcome::Budget { solutions, tau } => {
            ThresholdRound {
                solutions,
                theta,
                accepted_samples: tau,
            }
        }
    })
}

enum RoundOutcome {
    Lowered(Solution),
    Missed { solutions: BTreeSet<Solution>, tau: u64 },
    Budget { solutions: BTreeSet<Solution>, tau: u64 },
}

#[allow(clippy::too_many_arguments)]
fn threshold_round<S: Sampler>(
    sampler: &mut S,
    theta: f64,
    seed: Solution,
    kappa: f64,
    epsilon: f64,
    raw_draws: &mut u64,
    budget_cap: Option<u64>,
    trace: &mut Tracer,
) -> Result<RoundOutcome, EnumerateError> {
    let mut solutions = BTreeSet::from([seed]);
    let mut tau = 1u64;
    loop {
        let m = solutions.len() as u64 + 1;
        let target = bounds::deadline(m, kappa, epsilon)?;
        let mut extended = false;
        while tau < target {
            if budget_cap.is_some_and(|cap| *raw_draws >= cap) {
                trace.push(TraceEvent::BudgetCapReached {
                    raw_draws: *raw_draws,
                });
                return Ok(RoundOutcome::Budget { solutions, tau });
            }
            let draw = checked_draw(sampler, raw_draws)?;
            if draw.cost > theta {
                trace.push(TraceEvent::RejectedAboveThreshold {
                    raw_draws: *raw_draws,
                });
                continue;
            }
            if draw.cost < theta {
                return Ok(RoundOutcome::Lowered(draw));
            }
            tau += 1;
            let key = draw.key.clone();
            if solutions.insert(draw) {
                trace.push(TraceEvent::Collected { tau, key });
                extended = true;
                break;
            }
            trace.push(TraceEvent::Duplicate { tau });
        }
        if !extended {
            trace.push(TraceEvent::DeadlineMissed { m, deadline: target });
            return Ok(RoundOutcome::Missed { solutions, tau });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::ScriptedSampler;

    fn sol(id: usize, cost: f64) -> Solution {
        Solution::new(SolutionKey::from_index(id, 8), cost)
    }

    #[test]
    fn key_roundtrip_and_order() {
        let k = SolutionKey::from_bools(&[true, false, true, true, false]);
        assert_eq!(k.len(), 5);
        assert_eq!(k.ones().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(k.count_ones(), 3);
        assert_eq!(format!("{k}"), "10110");
        let k2 = SolutionKey::from_indices(5, [0, 2, 3]);
        assert_eq!(k, k2);
        // ordering is on the packed representation, stable and total
        let a = SolutionKey::from_bools(&[false, false]);
        let b = SolutionKey::from_bools(&[true, false]);
        assert!(a < b);
    }

    #[test]
    fn solutions_compare_by_key_only() {
        let a = sol(3, 1.0);
        let b = sol(3, 99.0);
        assert_eq!(a, b);
        let mut set = BTreeSet::new();
        set.insert(a);
        assert!(!set.insert(b));
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn csp_single_solution_stops_at_first_deadline() {
        // one feasible solution, epsilon 0.01: the m = 2 deadline is 11
        let mut s = ScriptedSampler::repeating(vec![sol(0, 0.0)]);
        let r = enumerate_csp(&mut s, 0.01, None).unwrap();
        assert_eq!(r.solutions.len(), 1);
        assert_eq!(r.accepted_samples, 11);
        assert_eq!(r.raw_draws, 11);
        assert_eq!(r.stop_reason, StopReason::DeadlineMissed);
    }

    #[test]
    fn csp_replays_two_solution_walkthrough() {
        // first solution at tau = 1, second before the m = 2 deadline (11),
        // nothing new through the m = 3 deadline (18)
        let a = sol(0, 0.0);
        let b = sol(1, 0.0);
        let mut script = vec![a.clone(), a.clone(), a.clone(), a.clone(), b.clone()];
        while script.len() < 18 {
            script.push(if script.len() % 2 == 0 { a.clone() } else { b.clone() });
        }
        let mut s = ScriptedSampler::new(script);
        let r = enumerate_csp_traced(&mut s, 0.01, None).unwrap();
        assert_eq!(r.solutions.len(), 2);
        assert_eq!(r.accepted_samples, 18);
        assert_eq!(r.stop_reason, StopReason::DeadlineMissed);
        let trace = r.trace.unwrap();
        assert!(trace.contains(&TraceEvent::Collected { tau: 5, key: b.key.clone() }));
        assert!(matches!(trace.last(), Some(TraceEvent::DeadlineMissed { m: 3, deadline: 18 })));
    }

    #[test]
    fn csp_solution_found_exactly_at_deadline_counts() {
        let a = sol(0, 0.0);
        let b = sol(1, 0.0);
        let mut script = vec![a.clone(); 10];
        script.push(b.clone()); // tau = 11, exactly the m = 2 deadline
        let mut s = ScriptedSampler::repeating_with_prefix(script, a.clone());
        let r = enumerate_csp(&mut s, 0.01, None).unwrap();
        assert_eq!(r.solutions.len(), 2);
        // continues to the m = 3 deadline before giving up
        assert_eq!(r.accepted_samples, 18);
    }

    #[test]
    fn csp_budget_cap_short_circuits() {
        let mut s = ScriptedSampler::repeating(vec![sol(0, 0.0)]);
        let r = enumerate_csp(&mut s, 0.01, Some(5)).unwrap();
        assert_eq!(r.stop_reason, StopReason::BudgetCapReached);
        assert_eq!(r.raw_draws, 5);
        assert_eq!(r.solutions.len(), 1);
        assert!(matches!(
            enumerate_csp(&mut s, 0.01, Some(0)),
            Err(EnumerateError::ZeroBudgetCap)
        ));
    }

    #[test]
    fn csp_rejects_epsilon_outside_window() {
        let mut s = ScriptedSampler::repeating(vec![sol(0, 0.0)]);
        assert!(enumerate_csp(&mut s, 0.4, None).is_err());
        assert!(enumerate_csp(&mut s, 0.0, None).is_err());
    }

    #[test]
    fn csp_propagates_sampler_exhaustion() {
        let mut s = ScriptedSampler::new(vec![sol(0, 0.0)]);
        assert!(matches!(
            enumerate_csp(&mut s, 0.01, None),
            Err(EnumerateError::Sampler(SamplerError::Exhausted))
        ));
    }

    #[test]
    fn opt_single_solution_stops_after_thirteen() {
        // deadline(2, kappa2(0.01), 0.01) = 13
        let mut s = ScriptedSampler::repeating(vec![sol(0, 7.0)]);
        let r = enumerate_opt(&mut s, 0.01, None).unwrap();
        assert_eq!(r.solutions.len(), 1);
        assert_eq!(r.theta, 7.0);
        assert_eq!(r.accepted_samples, 13);
        assert_eq!(r.stop_reason, StopReason::DeadlineMissed);
    }

    #[test]
    fn opt_resets_on_threshold_update() {
        // worse solution first, then a better pair: theta 1.0 -> 0.0 with
        // set and count reset; rejected high-cost draws do not advance tau
        let red = sol(9, 1.0);
        let blue = sol(0, 0.0);
        let green = sol(1, 0.0);
        let mut script = vec![red.clone(), red.clone(), blue.clone()];
        script.push(red.clone()); // rejected: cost above new theta
        script.push(green.clone()); // tau = 2 at theta 0.0
        let mut s = ScriptedSampler::repeating_with_prefix(script, blue.clone());
        let r = enumerate_opt_traced(&mut s, 0.01, None).unwrap();
        assert_eq!(r.theta, 0.0);
        assert_eq!(
            r.solutions.iter().map(|s| s.key.clone()).collect::<Vec<_>>(),
            vec![blue.key.clone(), green.key.clone()]
        );
        // two solutions collected, so the run ends at the m = 3 deadline (20)
        assert_eq!(r.accepted_samples, 20);
        let trace = r.trace.unwrap();
        assert!(trace.contains(&TraceEvent::ThresholdLowered { theta: 0.0, key: blue.key.clone() }));
        assert!(trace.iter().any(|e| matches!(e, TraceEvent::RejectedAboveThreshold { .. })));
    }

    #[test]
    fn opt_theta_equals_minimum_cost_seen() {
        let script = vec![sol(5, 3.0), sol(4, 2.5), sol(3, 2.0), sol(2, 1.5)];
        let mut s = ScriptedSampler::repeating_with_prefix(script, sol(2, 1.5));
        let r = enumerate_opt(&mut s, 0.01, None).unwrap();
        assert_eq!(r.theta, 1.5);
        assert_eq!(r.solutions.len(), 1);
        assert_eq!(r.accepted_samples, 13);
    }

    #[test]
    fn threshold_round_collects_until_m3_deadline() {
        // seed y1, then y2; nothing new through the m = 3 deadline (20)
        let y1 = sol(0, 4.0);
        let y2 = sol(1, 4.0);
        let mut s = ScriptedSampler::repeating(vec![y2.clone()]);
        let round = enumerate_threshold(&mut s, 4.0, y1.clone(), 0.01).unwrap();
        assert_eq!(round.solutions.len(), 2);
        assert_eq!(round.theta, 4.0);
        assert_eq!(round.accepted_samples, 20);
    }

    #[test]
    fn threshold_round_returns_better_draw_immediately() {
        let y1 = sol(0, 4.0);
        let z = sol(7, 3.0);
        let mut s = ScriptedSampler::new(vec![y1.clone(), z.clone(), y1.clone()]);
        let round = enumerate_threshold(&mut s, 4.0, y1.clone(), 0.01).unwrap();
        assert_eq!(round.theta, 3.0);
        assert_eq!(round.accepted_samples, 1);
        assert_eq!(round.solutions, BTreeSet::from([z]));
    }

    #[test]
    fn threshold_round_with_constant_sampler() {
        let y = sol(0, 4.0);
        let mut s = ScriptedSampler::repeating(vec![y.clone()]);
        let round = enumerate_threshold(&mut s, 4.0, y.clone(), 0.01).unwrap();
        assert_eq!(round.solutions.len(), 1);
        assert_eq!(round.accepted_samples, 13);
    }

    #[test]
    fn threshold_round_rejects_mismatched_seed() {
        let y = sol(0, 4.0);
        let mut s = ScriptedSampler::repeating(vec![y.clone()]);
        assert!(matches!(
            enumerate_threshold(&mut s, 5.0, y, 0.01),
            Err(EnumerateError::SeedCostMismatch { .. })
        ));
    }

    #[test]
    fn opt_rejects_non_finite_costs() {
        let mut s = ScriptedSampler::repeating(vec![sol(0, f64::NAN)]);
        assert!(matches!(
            enumerate_opt(&mut s, 0.01, None),
            Err(EnumerateError::NonFiniteCost)
        ));
    }

    #[test]
    fn accepted_count_matches_budget_formula_on_success() {
        // n distinct solutions collected means the run halts exactly at the
        // deadline for n + 1
        for n in 1..6usize {
            let script: Vec<Solution> = (0..n).map(|i| sol(i, 0.0)).collect();
            let mut s = ScriptedSampler::repeating_with_prefix(script, sol(0, 0.0));
            let r = enumerate_csp(&mut s, 0.05, None).unwrap();
            assert_eq!(r.solutions.len(), n);
            let kappa = crate::bounds::kappa1(0.05).unwrap();
            let expected = crate::bounds::sample_budget(n as u64, 0.05, kappa).unwrap();
            assert_eq!(r.accepted_samples, expected);
        }
    }
}
