//! Statistical validation: fairness tests, success-rate inference, coverage,
//! and Monte Carlo checks of the coupon-collector tail bounds and of the two
//! enumeration guarantees.
//!
//! Every Monte Carlo routine takes an explicit seed and derives one
//! sub-seed per trial, so campaigns are reproducible and trial loops can be
//! dispatched in any order.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};
use statrs::function::gamma::{gamma_ur, ln_gamma};
use thiserror::Error;

use crate::bounds::{self, BoundsError};
use crate::enumeration::{enumerate_csp, enumerate_opt, EnumerateError, SolutionKey};
use crate::samplers::{CategoricalSampler, LandscapeDistribution};
use crate::seeding::derive_seed;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("chi-squared test needs at least two categories")]
    TooFewCategories,
    #[error("chi-squared test needs a positive total count")]
    EmptyCounts,
    #[error("successes {successes} exceed runs {runs}")]
    SuccessesExceedRuns { successes: u64, runs: u64 },
    #[error("runs must be >= 1")]
    ZeroRuns,
    #[error("probability {0} outside (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("confidence level {0} outside (0, 1)")]
    LevelOutOfRange(f64),
    #[error("truth set is empty")]
    EmptyTruth,
    #[error("p_desirable {0} outside (0, 1]")]
    DesirableOutOfRange(f64),
    #[error("sample time must be finite and non-negative")]
    BadSampleTime,
    #[error("subset size m must satisfy 1 <= m <= n")]
    BadSubsetSize,
    #[error("trials must be >= 1")]
    ZeroTrials,
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
}

/// Outcome of a chi-squared uniformity test over category counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub counts: Vec<u64>,
    pub chi2: f64,
    pub p_value: f64,
    /// Ratio of the largest to the smallest empirical frequency; `None`
    /// when some category was never observed (the ratio is infinite).
    pub pmax_over_pmin: Option<f64>,
}

/// Chi-squared goodness-of-fit against the uniform distribution over
/// `counts.len()` categories, with `counts.len() - 1` degrees of freedom.
pub fn chi_squared_uniform_test(counts: &[u64]) -> Result<FairnessReport, StatsError> {
    let k = counts.len();
    if k < 2 {
        return Err(StatsError::TooFewCategories);
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(StatsError::EmptyCounts);
    }
    let expected = total as f64 / k as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let df = (k - 1) as f64;
    let p_value = if chi2 <= 0.0 { 1.0 } else { gamma_ur(df / 2.0, chi2 / 2.0) };
    let max = *counts.iter().max().unwrap();
    let min = *counts.iter().min().unwrap();
    let pmax_over_pmin = (min > 0).then(|| max as f64 / min as f64);
    Ok(FairnessReport {
        counts: counts.to_vec(),
        chi2,
        p_value,
        pmax_over_pmin,
    })
}

/// Exact binomial lower tail P(X <= successes) for X ~ Binomial(runs, p0).
pub fn binomial_tail_p(successes: u64, runs: u64, p0: f64) -> Result<f64, StatsError> {
    if successes > runs {
        return Err(StatsError::SuccessesExceedRuns { successes, runs });
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(StatsError::ProbabilityOutOfRange(p0));
    }
    if successes == runs {
        return Ok(1.0);
    }
    let n = runs as f64;
    let ln_n_fact = ln_gamma(n + 1.0);
    let ln_p = p0.ln();
    let ln_q = (-p0).ln_1p();
    let mut sum = 0.0;
    for k in 0..=successes {
        let kf = k as f64;
        let ln_term =
            ln_n_fact - ln_gamma(kf + 1.0) - ln_gamma(n - kf + 1.0) + kf * ln_p + (n - kf) * ln_q;
        sum += ln_term.exp();
    }
    Ok(sum.min(1.0))
}

/// Exact (Clopper-Pearson) binomial confidence interval via beta quantiles.
pub fn clopper_pearson_ci(
    successes: u64,
    runs: u64,
    level: f64,
) -> Result<(f64, f64), StatsError> {
    if runs == 0 {
        return Err(StatsError::ZeroRuns);
    }
    if successes > runs {
        return Err(StatsError::SuccessesExceedRuns { successes, runs });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::LevelOutOfRange(level));
    }
    let alpha = 1.0 - level;
    let s = successes as f64;
    let n = runs as f64;
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(s, n - s + 1.0).unwrap().inverse_cdf(alpha / 2.0)
    };
    let upper = if successes == runs {
        1.0
    } else {
        Beta::new(s + 1.0, n - s).unwrap().inverse_cdf(1.0 - alpha / 2.0)
    };
    Ok((lower, upper))
}

/// Fraction of the true solution set that was found.
pub fn solution_coverage(
    found: &BTreeSet<SolutionKey>,
    truth: &BTreeSet<SolutionKey>,
) -> Result<f64, StatsError> {
    if truth.is_empty() {
        return Err(StatsError::EmptyTruth);
    }
    let hit = found.intersection(truth).count();
    Ok(hit as f64 / truth.len() as f64)
}

/// Success statistics over repeated enumeration runs, in the shape used by
/// the experiment records: exact binomial p-value against a target success
/// probability and an exact confidence interval for the success rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub successes: u64,
    pub runs: u64,
    /// P(X <= successes) under the target success probability.
    pub p_value_vs_target: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_coverage: f64,
}

impl TrialSummary {
    pub fn summarize(
        successes: u64,
        runs: u64,
        target_p: f64,
        level: f64,
        mean_coverage: f64,
    ) -> Result<Self, StatsError> {
        let p_value_vs_target = binomial_tail_p(successes, runs, target_p)?;
        let (ci_low, ci_high) = clopper_pearson_ci(successes, runs, level)?;
        Ok(TrialSummary {
            successes,
            runs,
            p_value_vs_target,
            ci_low,
            ci_high,
            mean_coverage,
        })
    }

    /// Whether the observed count is incompatible with the target success
    /// probability: tail p-value below 0.05 or the interval excludes it.
    pub fn incompatible_with(&self, target_p: f64) -> bool {
        self.p_value_vs_target < 0.05 || self.ci_low > target_p || self.ci_high < target_p
    }
}

/// One Monte Carlo check of a tail bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub n: u64,
    pub m: u64,
    pub deadline_used: u64,
    pub empirical_tail: f64,
    pub bound: f64,
    pub trials: u64,
}

impl TailCheck {
    /// Three standard errors of a proportion near the bound, the slack the
    /// bound assertions allow for finite sampling noise.
    pub fn three_sigma_slack(&self) -> f64 {
        let p = self.bound.clamp(0.0, 1.0);
        3.0 * (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

fn lemma_deadline(m: u64, epsilon: f64) -> Result<u64, StatsError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(StatsError::ProbabilityOutOfRange(epsilon));
    }
    if m == 1 {
        // ceil(ln(1/epsilon)), at least one draw
        return Ok(((-epsilon.ln()).ceil() as u64).max(1));
    }
    Ok(bounds::deadline(m, 1.0, epsilon)?)
}

/// Empirical check of the classical coupon-collector tail: the chance that
/// collecting all `n` items takes more than `ceil(n ln(n/epsilon))` uniform
/// draws, against the bound epsilon.
pub fn coupon_mc_lemma1(
    n: u64,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<TailCheck, StatsError> {
    tail_bound_mc_inner(n, n, epsilon, trials, seed, epsilon)
}

/// Empirical check of the partial-collection tail: the chance that seeing
/// `m` distinct items among `n` takes more than `ceil(m ln(m/epsilon))`
/// draws, against the bound `(m/n)^(deadline+1) * C(n,m) * epsilon`.
pub fn tail_bound_mc(
    n: u64,
    m: u64,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<TailCheck, StatsError> {
    if m < 1 || m > n {
        return Err(StatsError::BadSubsetSize);
    }
    let deadline = lemma_deadline(m, epsilon)?;
    let ln_bound = (deadline + 1) as f64 * ((m as f64 / n as f64).ln())
        + ln_binomial(n, m)
        + epsilon.ln();
    tail_bound_mc_inner(n, m, epsilon, trials, seed, ln_bound.exp().min(1.0))
}

fn ln_binomial(n: u64, m: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(m as f64 + 1.0) - ln_gamma((n - m) as f64 + 1.0)
}

fn tail_bound_mc_inner(
    n: u64,
    m: u64,
    epsilon: f64,
    trials: u64,
    seed: u64,
    bound: f64,
) -> Result<TailCheck, StatsError> {
    if n < 1 || m < 1 || m > n {
        return Err(StatsError::BadSubsetSize);
    }
    if trials == 0 {
        return Err(StatsError::ZeroTrials);
    }
    let deadline = lemma_deadline(m, epsilon)?;
    let misses: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, trial));
            let mut seen = vec![false; n as usize];
            let mut distinct = 0u64;
            for _ in 0..deadline {
                let item = rng.gen_range(0..n as usize);
                if !seen[item] {
                    seen[item] = true;
                    distinct += 1;
                    if distinct == m {
                        break;
                    }
                }
            }
            u64::from(distinct < m)
        })
        .sum();
    Ok(TailCheck {
        n,
        m,
        deadline_used: deadline,
        empirical_tail: misses as f64 / trials as f64,
        bound,
        trials,
    })
}

/// Expected wall time of a successful enumeration of `n` solutions:
/// `sample_budget(n, epsilon, kappa) * t_sample / p_desirable`.
pub fn expected_time_estimate(
    n: u64,
    epsilon: f64,
    kappa: f64,
    t_sample: f64,
    p_desirable: f64,
) -> Result<f64, StatsError> {
    if !(p_desirable > 0.0 && p_desirable <= 1.0) {
        return Err(StatsError::DesirableOutOfRange(p_desirable));
    }
    if !t_sample.is_finite() || t_sample < 0.0 {
        return Err(StatsError::BadSampleTime);
    }
    let budget = bounds::sample_budget(n, epsilon, kappa)?;
    Ok(budget as f64 * t_sample / p_desirable)
}

/// Result of a Monte Carlo failure-rate campaign against an epsilon ceiling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McFailureCheck {
    pub failures: u64,
    pub trials: u64,
    pub epsilon: f64,
}

impl McFailureCheck {
    pub fn empirical_rate(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }

    pub fn three_sigma_slack(&self) -> f64 {
        3.0 * (self.epsilon * (1.0 - self.epsilon) / self.trials as f64).sqrt()
    }
}

/// Failure rate of the CSP enumeration over a uniform sampler on
/// `n_solutions` items: a trial fails when the returned set is a proper
/// subset of the full item set. The guarantee caps the rate at epsilon.
pub fn theorem1_mc(
    n_solutions: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<McFailureCheck, StatsError> {
    if trials == 0 {
        return Err(StatsError::ZeroTrials);
    }
    let costs = vec![0.0; n_solutions];
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut sampler = CategoricalSampler::new(
                &costs,
                LandscapeDistribution::Uniform,
                derive_seed(seed, trial),
            );
            let result = enumerate_csp(&mut sampler, epsilon, None)
                .expect("uniform sampler cannot fail");
            u64::from(result.solutions.len() < n_solutions)
        })
        .sum();
    Ok(McFailureCheck {
        failures,
        trials,
        epsilon,
    })
}

/// Failure rate of the optimization enumeration on a synthetic cost
/// landscape under a cost-ordered fair distribution: a trial fails unless
/// exactly the argmin set comes back. The guarantee caps the rate at
/// epsilon.
pub fn theorem2_mc(
    costs: &[f64],
    distribution: LandscapeDistribution,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<McFailureCheck, StatsError> {
    if trials == 0 {
        return Err(StatsError::ZeroTrials);
    }
    if costs.is_empty() {
        return Err(StatsError::EmptyTruth);
    }
    let probe = CategoricalSampler::new(costs, distribution, 0);
    let minimum = costs.iter().cloned().fold(f64::INFINITY, f64::min);
    let truth: BTreeSet<SolutionKey> = probe
        .solutions()
        .iter()
        .filter(|s| s.cost == minimum)
        .map(|s| s.key.clone())
        .collect();
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut sampler =
                CategoricalSampler::new(costs, distribution, derive_seed(seed, trial));
            let result = enumerate_opt(&mut sampler, epsilon, None)
                .expect("categorical sampler cannot fail");
            let found: BTreeSet<SolutionKey> =
                result.solutions.iter().map(|s| s.key.clone()).collect();
            u64::from(found != truth || result.theta != minimum)
        })
        .sum();
    Ok(McFailureCheck {
        failures,
        trials,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn chi_squared_exact_uniformity() {
        let r = chi_squared_uniform_test(&[50, 50]).unwrap();
        assert_eq!(r.chi2, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.pmax_over_pmin, Some(1.0));
    }

    #[test]
    fn chi_squared_reference_values() {
        // chi2 tail with one degree of freedom equals the two-sided normal
        // tail at sqrt(chi2); frozen from erfc(5/sqrt 2) and erfc(2/sqrt 2)
        let r = chi_squared_uniform_test(&[75, 25]).unwrap();
        close(r.chi2, 25.0, 1e-12);
        close(r.p_value, 5.733_031_437_583_878e-7, 1e-16);
        let r = chi_squared_uniform_test(&[60, 40]).unwrap();
        close(r.chi2, 4.0, 1e-12);
        close(r.p_value, 0.045_500_263_896_358_4, 1e-12);
        close(r.pmax_over_pmin.unwrap(), 1.5, 1e-12);
    }

    #[test]
    fn chi_squared_degenerate_inputs() {
        assert!(chi_squared_uniform_test(&[100]).is_err());
        assert!(chi_squared_uniform_test(&[0, 0]).is_err());
        let r = chi_squared_uniform_test(&[10, 0]).unwrap();
        assert_eq!(r.pmax_over_pmin, None);
    }

    #[test]
    fn binomial_tail_reference_values() {
        assert_eq!(binomial_tail_p(100, 100, 0.99).unwrap(), 1.0);
        close(
            binomial_tail_p(96, 100, 0.99).unwrap(),
            0.018_374_036_444_649_66,
            1e-13,
        );
        // 1 - 0.99^100
        close(
            binomial_tail_p(99, 100, 0.99).unwrap(),
            0.633_967_658_726_770_5,
            1e-12,
        );
        // the 97-success cutoff from the success-rate analysis
        assert!(binomial_tail_p(96, 100, 0.99).unwrap() < 0.05);
        assert!(binomial_tail_p(97, 100, 0.99).unwrap() > 0.05);
    }

    #[test]
    fn binomial_tail_monotone_in_successes() {
        let mut prev = 0.0;
        for s in 0..=50 {
            let p = binomial_tail_p(s, 50, 0.7).unwrap();
            assert!(p >= prev);
            prev = p;
        }
        assert_eq!(prev, 1.0);
        assert!(binomial_tail_p(5, 4, 0.5).is_err());
        assert!(binomial_tail_p(1, 4, 0.0).is_err());
    }

    #[test]
    fn clopper_pearson_reference_values() {
        let (lo, hi) = clopper_pearson_ci(100, 100, 0.95).unwrap();
        close(lo, 0.963_783_307_354_823_6, 1e-9);
        assert_eq!(hi, 1.0);
        let (lo, hi) = clopper_pearson_ci(0, 50, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        close(hi, 0.071_121_736_464_197_66, 1e-9);
        // frozen from an independent beta-quantile integrator
        let (lo, hi) = clopper_pearson_ci(97, 100, 0.95).unwrap();
        close(lo, 0.914_823_947_025_72, 1e-9);
        close(hi, 0.993_770_028_461_693_6, 1e-9);
    }

    #[test]
    fn clopper_pearson_contains_point_estimate() {
        for &(s, n) in &[(0u64, 10u64), (3, 10), (7, 13), (10, 10), (97, 100)] {
            let (lo, hi) = clopper_pearson_ci(s, n, 0.95).unwrap();
            let rate = s as f64 / n as f64;
            assert!(lo <= rate && rate <= hi, "{s}/{n}: [{lo}, {hi}]");
        }
        // width shrinks with more runs at fixed ratio
        let (lo1, hi1) = clopper_pearson_ci(8, 10, 0.95).unwrap();
        let (lo2, hi2) = clopper_pearson_ci(80, 100, 0.95).unwrap();
        assert!(hi2 - lo2 < hi1 - lo1);
    }

    #[test]
    fn coverage_fractions() {
        let key = |i| SolutionKey::from_index(i, 4);
        let truth: BTreeSet<SolutionKey> = [key(0), key(1)].into();
        assert_eq!(solution_coverage(&truth.clone(), &truth).unwrap(), 1.0);
        let half: BTreeSet<SolutionKey> = [key(0)].into();
        assert_eq!(solution_coverage(&half, &truth).unwrap(), 0.5);
        let other: BTreeSet<SolutionKey> = [key(2), key(3)].into();
        assert_eq!(solution_coverage(&other, &truth).unwrap(), 0.0);
        assert!(solution_coverage(&truth, &BTreeSet::new()).is_err());
    }

    #[test]
    fn lemma1_single_item_never_misses() {
        let check = coupon_mc_lemma1(1, 0.1, 1000, 7).unwrap();
        assert_eq!(check.empirical_tail, 0.0);
    }

    #[test]
    fn lemma1_two_items_matches_geometric_tail() {
        // deadline 6; P(T > 6) = 2^-5 = 0.03125 exactly
        let check = coupon_mc_lemma1(2, 0.1, 100_000, 11).unwrap();
        assert_eq!(check.deadline_used, 6);
        let exact: f64 = 0.03125;
        let se = (exact * (1.0 - exact) / 100_000.0).sqrt();
        assert!(
            (check.empirical_tail - exact).abs() <= 3.0 * se,
            "tail {} vs exact {exact}",
            check.empirical_tail
        );
    }

    #[test]
    fn lemma2_reference_bound_values() {
        let check = tail_bound_mc(10, 5, 0.1, 10_000, 3).unwrap();
        assert_eq!(check.deadline_used, 20);
        close(check.bound, 1.201_629_638_671_875e-5, 1e-17);
        assert!(check.empirical_tail <= check.bound + check.three_sigma_slack());
        // m = n reduces to the lemma-1 setting on the same seed stream
        let a = tail_bound_mc(2, 2, 0.1, 50_000, 5).unwrap();
        let b = coupon_mc_lemma1(2, 0.1, 50_000, 5).unwrap();
        assert_eq!(a.empirical_tail, b.empirical_tail);
        assert_eq!(a.deadline_used, 6);
        close(a.bound, 0.1, 1e-15);
        assert!(tail_bound_mc(4, 5, 0.1, 10, 0).is_err());
    }

    #[test]
    fn expected_time_examples() {
        let k1 = bounds::kappa1(0.01).unwrap();
        assert_eq!(expected_time_estimate(1, 0.01, k1, 1.0, 1.0).unwrap(), 11.0);
        close(
            expected_time_estimate(1, 0.01, k1, 0.002, 0.5).unwrap(),
            0.044,
            1e-12,
        );
        let half = expected_time_estimate(3, 0.01, k1, 1.0, 0.5).unwrap();
        let full = expected_time_estimate(3, 0.01, k1, 1.0, 1.0).unwrap();
        close(half, 2.0 * full, 1e-12);
        assert!(expected_time_estimate(1, 0.01, k1, 1.0, 0.0).is_err());
    }

    #[test]
    fn chi_squared_p_values_uniform_under_null() {
        // Kolmogorov-Smirnov distance of the p-value sample against U[0,1]
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_501);
        let mut p_values = Vec::with_capacity(1000);
        for _ in 0..1000 {
            let mut counts = [0u64; 5];
            for _ in 0..1000 {
                counts[rng.gen_range(0..5)] += 1;
            }
            p_values.push(chi_squared_uniform_test(&counts).unwrap().p_value);
        }
        p_values.sort_by(|a, b| a.total_cmp(b));
        let n = p_values.len() as f64;
        let ks = p_values
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let lo = (p - i as f64 / n).abs();
                let hi = (p - (i + 1) as f64 / n).abs();
                lo.max(hi)
            })
            .fold(0.0f64, f64::max);
        assert!(ks < 0.05, "KS distance {ks}");
    }

    #[test]
    fn theorem1_small_campaign_stays_under_epsilon() {
        let check = theorem1_mc(4, 0.1, 4000, 99).unwrap();
        assert!(check.empirical_rate() < 0.1, "rate {}", check.empirical_rate());
    }

    #[test]
    fn theorem2_small_campaign_stays_under_epsilon() {
        let costs = [0.0, 0.0, 1.0];
        for dist in [LandscapeDistribution::Uniform, LandscapeDistribution::Boltzmann] {
            let check = theorem2_mc(&costs, dist, 0.1, 4000, 42).unwrap();
            assert!(check.empirical_rate() < 0.1, "rate {}", check.empirical_rate());
        }
    }
}
