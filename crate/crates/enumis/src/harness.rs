//! Experiment orchestration: DIMACS graph ingestion, repeated-run campaigns
//! over the annealing-backed clique sampler, bound-validation drivers, and
//! append-only JSONL record persistence.
//!
//! Seed streams: an instance derives its graph seed as `derive_seed(master,
//! 0)` and the seed of run `r` as `derive_seed(master, r + 1)`, so runs can
//! execute in any order. Bench sweeps give instance `i` its own master seed
//! `derive_seed(campaign_master, i)`.

use std::collections::BTreeSet;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::{enumerate_opt, EnumerateError, SolutionKey, StopReason};
use crate::ising::AnnealSchedule;
use crate::maxclique::{
    enumerate_max_cliques_budgeted, erdos_renyi, make_clique_sampler, Graph, GraphError,
    VertexSet,
};
use crate::samplers::{LandscapeDistribution, TallySampler};
use crate::seeding::derive_seed;
use crate::stats::{
    chi_squared_uniform_test, coupon_mc_lemma1, solution_coverage, tail_bound_mc, theorem1_mc,
    theorem2_mc, FairnessReport, McFailureCheck, StatsError, TailCheck, TrialSummary,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Dimacs(#[from] DimacsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("record parse error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("line {line}: malformed header {text:?}")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: duplicate problem header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: malformed edge {text:?}")]
    MalformedEdge { line: usize, text: String },
    #[error("line {line}: edge before the problem header")]
    EdgeBeforeHeader { line: usize },
    #[error("line {line}: vertex {v} out of range 1..={n}")]
    VertexOutOfRange { line: usize, v: usize, n: usize },
    #[error("line {line}: self-loop on vertex {v}")]
    SelfLoop { line: usize, v: usize },
    #[error("missing `p edge <n> <m>` header")]
    MissingHeader,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parses a DIMACS-style graph: one `p edge <n> <m>` header, then `e <u> <v>`
/// lines with 1-based vertices. Comment lines start with `c`. Duplicate
/// edges collapse; self-loops are rejected.
pub fn parse_graph(text: &str) -> Result<Graph, DimacsError> {
    let mut graph: Option<Graph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if graph.is_some() {
                return Err(DimacsError::DuplicateHeader { line });
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            let malformed = || DimacsError::MalformedHeader {
                line,
                text: raw.to_string(),
            };
            let [format, n, _m] = words.as_slice() else {
                return Err(malformed());
            };
            if *format != "edge" {
                return Err(malformed());
            }
            let n: usize = n.parse().map_err(|_| malformed())?;
            graph = Some(Graph::new(n)?);
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('e') {
            let g = graph.as_mut().ok_or(DimacsError::EdgeBeforeHeader { line })?;
            let words: Vec<&str> = rest.split_whitespace().collect();
            let malformed = || DimacsError::MalformedEdge {
                line,
                text: raw.to_string(),
            };
            let [u, v] = words.as_slice() else {
                return Err(malformed());
            };
            let u: usize = u.parse().map_err(|_| malformed())?;
            let v: usize = v.parse().map_err(|_| malformed())?;
            let n = g.n_vertices();
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(DimacsError::VertexOutOfRange { line, v: w, n });
                }
            }
            if u == v {
                return Err(DimacsError::SelfLoop { line, v: u });
            }
            g.add_edge(u - 1, v - 1)?;
            continue;
        }
        return Err(DimacsError::MalformedEdge {
            line,
            text: raw.to_string(),
        });
    }
    graph.ok_or(DimacsError::MissingHeader)
}

/// Writes the DIMACS form read back by [`parse_graph`].
pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n_vertices(), g.n_edges());
    for (u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}

/// Where an experiment's graph comes from.
#[derive(Debug, Clone)]
pub enum GraphSource {
    Generated { n: usize, density: f64, seed: u64 },
    Loaded { id: String, graph: Graph },
}

/// Parameters of one experiment: a graph, the enumeration settings, and the
/// number of independent runs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub source: GraphSource,
    pub epsilon: f64,
    pub penalty: f64,
    pub schedule: AnnealSchedule,
    pub runs: u32,
    pub master_seed: u64,
    /// Wall-clock budget for the exact reference enumeration; exceeding it
    /// flags the record instead of failing the experiment.
    pub exact_budget: Option<Duration>,
    /// Raw-draw cap per run, forwarded to the enumeration loop.
    pub budget_cap: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDesc {
    pub id: String,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub density: f64,
    pub graph_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoParams {
    pub epsilon: f64,
    pub penalty: f64,
    pub schedule: AnnealSchedule,
    pub runs: u32,
    pub master_seed: u64,
}

/// Ground truth from the exact enumerator, when it fit the budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReference {
    pub computed: bool,
    pub clique_size: Option<usize>,
    pub n_max_cliques: Option<usize>,
    pub cliques: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub run_index: u32,
    pub seed: u64,
    /// Vertex sets of the returned solutions, canonically ordered.
    pub solutions: Vec<Vec<u32>>,
    pub theta: f64,
    pub accepted_samples: u64,
    pub raw_draws: u64,
    pub stop_reason: StopReason,
    /// Against the exact reference; absent when the reference was skipped.
    pub success: Option<bool>,
    pub coverage: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FairnessCategory {
    /// Single maximum clique; the chi-squared test is undefined.
    Unique,
    /// Uniformity test p-value at or above 0.05.
    Fair,
    Unfair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessRecord {
    /// Category order for `report.counts`: the true maximum cliques.
    pub cliques: Vec<Vec<u32>>,
    pub report: Option<FairnessReport>,
    pub category: FairnessCategory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordTiming {
    pub exact_wall_time_s: f64,
    pub total_wall_time_s: f64,
}

/// Everything one experiment produced. Self-describing: all inputs are
/// embedded, and every field except the wall times is reproducible from
/// them bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub problem: ProblemDesc,
    pub params: AlgoParams,
    pub exact: ExactReference,
    pub runs: Vec<RunOutcome>,
    pub summary: Option<TrialSummary>,
    /// Success count incompatible with the 1 - epsilon target (tail p-value
    /// below 0.05 or the confidence interval excluding the target).
    pub incompatible: Option<bool>,
    pub fairness: Option<FairnessRecord>,
    pub timing: RecordTiming,
}

impl ExperimentRecord {
    /// JSON view with the wall-time fields removed; two records of the same
    /// experiment compare equal on this view.
    pub fn non_timing_view(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("record serializes");
        value.as_object_mut().unwrap().remove("timing");
        if let Some(runs) = value.get_mut("runs").and_then(|r| r.as_array_mut()) {
            for run in runs {
                run.as_object_mut().unwrap().remove("wall_time_s");
            }
        }
        value
    }
}

/// Runs one full experiment: resolve the graph, compute the exact reference
/// (within budget), execute the independent enumeration runs, and aggregate
/// success, coverage and fairness statistics.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRecord, HarnessError> {
    let started = Instant::now();
    let (id, graph, graph_seed) = match &config.source {
        GraphSource::Generated { n, density, seed } => (
            format!("er-n{n}-d{density}-s{seed}"),
            erdos_renyi(*n, *density, *seed)?,
            Some(*seed),
        ),
        GraphSource::Loaded { id, graph } => (id.clone(), graph.clone(), None),
    };

    let exact_started = Instant::now();
    let truth = enumerate_max_cliques_budgeted(&graph, config.exact_budget);
    let exact_wall_time_s = exact_started.elapsed().as_secs_f64();
    let truth_keys: Option<BTreeSet<SolutionKey>> = truth.as_ref().map(|cliques| {
        cliques
            .iter()
            .map(|c| c.to_key(graph.n_vertices()))
            .collect()
    });

    let outcomes: Vec<Result<(RunOutcome, Vec<(SolutionKey, u64)>), HarnessError>> = (0
        ..config.runs)
        .into_par_iter()
        .map(|run_index| -> Result<_, HarnessError> {
            let run_started = Instant::now();
            let seed = derive_seed(config.master_seed, u64::from(run_index) + 1);
            let sampler = make_clique_sampler(&graph, config.penalty, config.schedule, seed)?;
            let mut tally = TallySampler::new(sampler);
            let result = enumerate_opt(&mut tally, config.epsilon, config.budget_cap)?;
            let raw_draws = result.raw_draws;
            let found_keys: BTreeSet<SolutionKey> =
                result.solutions.iter().map(|s| s.key.clone()).collect();
            let (success, coverage) = match &truth_keys {
                Some(truth) => (
                    Some(found_keys == *truth),
                    Some(solution_coverage(&found_keys, truth)?),
                ),
                None => (None, None),
            };
            let solutions: Vec<Vec<u32>> = found_keys
                .iter()
                .map(|k| VertexSet::from_key(k).members().to_vec())
                .collect();
            let outcome = RunOutcome {
                run_index,
                seed,
                solutions,
                theta: result.theta,
                accepted_samples: result.accepted_samples,
                raw_draws,
                stop_reason: result.stop_reason,
                success,
                coverage,
                wall_time_s: run_started.elapsed().as_secs_f64(),
            };
            Ok((outcome, tally.into_counts().into_iter().collect()))
        })
        .collect();

    let mut runs = Vec::with_capacity(outcomes.len());
    let mut draw_counts: std::collections::BTreeMap<SolutionKey, u64> = Default::default();
    for item in outcomes {
        let (outcome, counts) = item?;
        for (key, count) in counts {
            *draw_counts.entry(key).or_insert(0) += count;
        }
        runs.push(outcome);
    }

    let (summary, incompatible, fairness) = match (&truth, &truth_keys) {
        (Some(cliques), Some(keys)) => {
            let successes = runs.iter().filter(|r| r.success == Some(true)).count() as u64;
            let mean_coverage = runs.iter().filter_map(|r| r.coverage).sum::<f64>()
                / runs.len().max(1) as f64;
            let target_p = 1.0 - config.epsilon;
            let summary = TrialSummary::summarize(
                successes,
                u64::from(config.runs),
                target_p,
                0.95,
                mean_coverage,
            )?;
            let incompatible = summary.incompatible_with(target_p);
            let clique_lists: Vec<Vec<u32>> =
                cliques.iter().map(|c| c.members().to_vec()).collect();
            let fairness = if keys.len() >= 2 {
                let counts: Vec<u64> = keys
                    .iter()
                    .map(|k| draw_counts.get(k).copied().unwrap_or(0))
                    .collect();
                let report = (counts.iter().sum::<u64>() > 0)
                    .then(|| chi_squared_uniform_test(&counts))
                    .transpose()?;
                let category = match &report {
                    Some(r) if r.p_value >= 0.05 => FairnessCategory::Fair,
                    _ => FairnessCategory::Unfair,
                };
                FairnessRecord {
                    cliques: clique_lists,
                    report,
                    category,
                }
            } else {
                FairnessRecord {
                    cliques: clique_lists,
                    report: None,
                    category: FairnessCategory::Unique,
                }
            };
            (Some(summary), Some(incompatible), Some(fairness))
        }
        _ => (None, None, None),
    };

    Ok(ExperimentRecord {
        problem: ProblemDesc {
            id,
            n_vertices: graph.n_vertices(),
            n_edges: graph.n_edges(),
            density: graph.density(),
            graph_seed,
        },
        params: AlgoParams {
            epsilon: config.epsilon,
            penalty: config.penalty,
            schedule: config.schedule,
            runs: config.runs,
            master_seed: config.master_seed,
        },
        exact: ExactReference {
            computed: truth.is_some(),
            clique_size: truth
                .as_ref()
                .and_then(|c| c.first())
                .map(|c| c.len()),
            n_max_cliques: truth.as_ref().map(|c| c.len()),
            cliques: truth
                .as_ref()
                .map(|c| c.iter().map(|s| s.members().to_vec()).collect()),
        },
        runs,
        summary,
        incompatible,
        fairness,
        timing: RecordTiming {
            exact_wall_time_s,
            total_wall_time_s: started.elapsed().as_secs_f64(),
        },
    })
}

/// A sweep over (size, density) instances, one experiment each.
#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub sizes: Vec<usize>,
    pub densities: Vec<f64>,
    pub runs: u32,
    pub epsilon: f64,
    pub penalty: f64,
    pub schedule: AnnealSchedule,
    pub master_seed: u64,
    pub exact_budget: Option<Duration>,
}

impl BenchPlan {
    /// Instance configurations in sweep order. Instance `i` gets master seed
    /// `derive_seed(master, i)` and its graph seed from that stream.
    pub fn instances(&self) -> Vec<ExperimentConfig> {
        let mut configs = Vec::new();
        for (index, (&density, &n)) in self
            .densities
            .iter()
            .flat_map(|d| self.sizes.iter().map(move |n| (d, n)))
            .enumerate()
        {
            let instance_seed = derive_seed(self.master_seed, index as u64);
            configs.push(ExperimentConfig {
                source: GraphSource::Generated {
                    n,
                    density,
                    seed: derive_seed(instance_seed, 0),
                },
                epsilon: self.epsilon,
                penalty: self.penalty,
                schedule: self.schedule,
                runs: self.runs,
                master_seed: instance_seed,
                exact_budget: self.exact_budget,
                budget_cap: None,
            });
        }
        configs
    }
}

/// Appends one record as a JSON line.
pub fn append_record(path: &Path, record: &ExperimentRecord) -> Result<(), HarnessError> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(file, "{}", serde_json::to_string(record)?)?;
    Ok(())
}

/// Reads every record from a JSONL file.
pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let file = std::fs::File::open(path)?;
    let mut records = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

/// True when `records` already contains this experiment (same problem id and
/// parameters), so a resumed campaign can skip it.
pub fn already_recorded(records: &[ExperimentRecord], config: &ExperimentConfig) -> bool {
    let id = match &config.source {
        GraphSource::Generated { n, density, seed } => format!("er-n{n}-d{density}-s{seed}"),
        GraphSource::Loaded { id, .. } => id.clone(),
    };
    records.iter().any(|r| {
        r.problem.id == id
            && r.params.epsilon == config.epsilon
            && r.params.penalty == config.penalty
            && r.params.schedule == config.schedule
            && r.params.runs == config.runs
            && r.params.master_seed == config.master_seed
    })
}

/// One entry of the bound-validation campaign output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundCheckRecord {
    Lemma1 { epsilon: f64, check: TailCheck },
    Lemma2 { epsilon: f64, check: TailCheck },
    Theorem1 { n: usize, epsilon: f64, check: McFailureCheck },
    Theorem2 { landscape: String, distribution: String, epsilon: f64, check: McFailureCheck },
}

impl BoundCheckRecord {
    /// Whether the empirical estimate respects its bound within three
    /// standard errors.
    pub fn passed(&self) -> bool {
        match self {
            BoundCheckRecord::Lemma1 { check, .. } | BoundCheckRecord::Lemma2 { check, .. } => {
                check.empirical_tail <= check.bound + check.three_sigma_slack()
            }
            BoundCheckRecord::Theorem1 { check, .. }
            | BoundCheckRecord::Theorem2 { check, .. } => {
                check.empirical_rate() < check.epsilon
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            BoundCheckRecord::Lemma1 { epsilon, check } => format!(
                "lemma1 n={} eps={epsilon}: tail {:.6} <= bound {:.6} (+3se {:.6})",
                check.n,
                check.empirical_tail,
                check.bound,
                check.three_sigma_slack()
            ),
            BoundCheckRecord::Lemma2 { epsilon, check } => format!(
                "lemma2 n={} m={} eps={epsilon}: tail {:.2e} <= bound {:.2e} (+3se {:.2e})",
                check.n,
                check.m,
                check.empirical_tail,
                check.bound,
                check.three_sigma_slack()
            ),
            BoundCheckRecord::Theorem1 { n, epsilon, check } => format!(
                "theorem1 n={n} eps={epsilon}: failure rate {:.5} < {epsilon}",
                check.empirical_rate()
            ),
            BoundCheckRecord::Theorem2 {
                landscape,
                distribution,
                epsilon,
                check,
            } => format!(
                "theorem2 {landscape} {distribution} eps={epsilon}: failure rate {:.5} < {epsilon}",
                check.empirical_rate()
            ),
        }
    }
}

/// The two synthetic landscapes used by the optimization-guarantee campaign:
/// (2 optima + 3 suboptima) and (5 optima + 20 suboptima over two levels).
pub fn theorem2_landscapes() -> Vec<(String, Vec<f64>)> {
    let small = vec![0.0, 0.0, 1.0, 1.0, 1.0];
    let mut large = vec![0.0; 5];
    large.extend(std::iter::repeat(1.0).take(12));
    large.extend(std::iter::repeat(2.0).take(8));
    vec![
        ("2opt+3sub".to_string(), small),
        ("5opt+20sub".to_string(), large),
    ]
}

/// Runs the full Monte Carlo validation campaign for the tail lemmas and
/// both enumeration guarantees, with per-check derived seeds.
pub fn validate_bounds(
    lemma_trials: u64,
    theorem_trials: u64,
    seed: u64,
) -> Result<Vec<BoundCheckRecord>, HarnessError> {
    let mut records = Vec::new();
    let mut stream = 0u64;
    let mut next_seed = || {
        stream += 1;
        derive_seed(seed, stream)
    };

    for &n in &[2u64, 5, 10] {
        for &epsilon in &[0.05, 0.1] {
            let check = coupon_mc_lemma1(n, epsilon, lemma_trials, next_seed())?;
            records.push(BoundCheckRecord::Lemma1 { epsilon, check });
        }
    }
    for &(n, m) in &[(10u64, 5u64), (10, 8), (20, 10)] {
        let epsilon = 0.1;
        let check = tail_bound_mc(n, m, epsilon, lemma_trials, next_seed())?;
        records.push(BoundCheckRecord::Lemma2 { epsilon, check });
    }
    for n in 1..=10usize {
        let epsilon = 0.05;
        let check = theorem1_mc(n, epsilon, theorem_trials, next_seed())?;
        records.push(BoundCheckRecord::Theorem1 { n, epsilon, check });
    }
    for (name, costs) in theorem2_landscapes() {
        for (dist, dist_name) in [
            (LandscapeDistribution::Uniform, "uniform"),
            (LandscapeDistribution::Boltzmann, "boltzmann"),
        ] {
            let epsilon = 0.05;
            let check = theorem2_mc(&costs, dist, epsilon, theorem_trials, next_seed())?;
            records.push(BoundCheckRecord::Theorem2 {
                landscape: name.clone(),
                distribution: dist_name.to_string(),
                epsilon,
                check,
            });
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::Interpolation;

    #[test]
    fn dimacs_parses_path_graph() {
        let g = parse_graph("p edge 3 2\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!(g.n_vertices(), 3);
        assert_eq!(g.n_edges(), 2);
        assert!(g.is_adjacent(0, 1));
        assert!(g.is_adjacent(1, 2));
        assert!(!g.is_adjacent(0, 2));
    }

    #[test]
    fn dimacs_isolated_vertices_and_comments() {
        let g = parse_graph("c empty graph\np edge 4 0\n").unwrap();
        assert_eq!(g.n_vertices(), 4);
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn dimacs_duplicate_edges_collapse() {
        let g = parse_graph("p edge 2 2\ne 1 2\ne 1 2\ne 2 1\n").unwrap();
        assert_eq!(g.n_edges(), 1);
    }

    #[test]
    fn dimacs_rejects_malformed_input() {
        assert!(matches!(parse_graph(""), Err(DimacsError::MissingHeader)));
        assert!(matches!(
            parse_graph("e 1 2\n"),
            Err(DimacsError::EdgeBeforeHeader { .. })
        ));
        assert!(matches!(
            parse_graph("p edge 2 1\ne 1 3\n"),
            Err(DimacsError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            parse_graph("p edge 2 1\ne 1 1\n"),
            Err(DimacsError::SelfLoop { .. })
        ));
        assert!(matches!(
            parse_graph("p edge 2 1\np edge 2 1\n"),
            Err(DimacsError::DuplicateHeader { .. })
        ));
        assert!(parse_graph("p clique 2 1\n").is_err());
        assert!(parse_graph("p edge 2 1\nx 1 2\n").is_err());
    }

    #[test]
    fn dimacs_roundtrip() {
        let g = erdos_renyi(9, 0.4, 3).unwrap();
        let text = write_graph(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    fn tiny_config(runs: u32, master_seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            source: GraphSource::Generated {
                n: 6,
                density: 0.5,
                seed: 77,
            },
            epsilon: 0.05,
            penalty: 2.0,
            schedule: AnnealSchedule::new(150, 0.1, 8.0, Interpolation::Geometric).unwrap(),
            runs,
            master_seed,
            exact_budget: Some(Duration::from_secs(5)),
            budget_cap: None,
        }
    }

    #[test]
    fn experiment_record_is_self_consistent() {
        let record = run_experiment(&tiny_config(8, 42)).unwrap();
        assert!(record.exact.computed);
        assert_eq!(record.runs.len(), 8);
        let summary = record.summary.as_ref().unwrap();
        assert_eq!(summary.runs, 8);
        assert!(summary.mean_coverage >= 0.0 && summary.mean_coverage <= 1.0);
        for run in &record.runs {
            assert!(run.success.is_some());
            assert!(run.raw_draws >= run.accepted_samples);
        }
        assert!(record.fairness.is_some());
    }

    #[test]
    fn experiment_reruns_identically_except_timing() {
        let a = run_experiment(&tiny_config(4, 9)).unwrap();
        let b = run_experiment(&tiny_config(4, 9)).unwrap();
        assert_eq!(a.non_timing_view(), b.non_timing_view());
        let c = run_experiment(&tiny_config(4, 10)).unwrap();
        assert_ne!(a.non_timing_view(), c.non_timing_view());
    }

    #[test]
    fn records_roundtrip_through_jsonl() {
        let dir = std::env::temp_dir().join(format!("enumis-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("records.jsonl");
        let _ = std::fs::remove_file(&path);
        let record = run_experiment(&tiny_config(2, 3)).unwrap();
        append_record(&path, &record).unwrap();
        append_record(&path, &record).unwrap();
        let loaded = read_records(&path).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded[0], record);
        let config = tiny_config(2, 3);
        assert!(already_recorded(&loaded, &config));
        assert!(!already_recorded(&loaded, &tiny_config(2, 4)));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn bench_plan_derives_distinct_seeds() {
        let plan = BenchPlan {
            sizes: vec![6, 8],
            densities: vec![0.25, 0.5],
            runs: 3,
            epsilon: 0.05,
            penalty: 2.0,
            schedule: AnnealSchedule::default(),
            master_seed: 5,
            exact_budget: None,
        };
        let configs = plan.instances();
        assert_eq!(configs.len(), 4);
        let mut seeds: Vec<u64> = configs.iter().map(|c| c.master_seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 4);
    }

    #[test]
    fn validation_campaign_smoke() {
        let records = validate_bounds(2000, 500, 7).unwrap();
        assert_eq!(records.len(), 6 + 3 + 10 + 4);
        for record in &records {
            assert!(record.passed(), "{}", record.describe());
        }
    }
}
