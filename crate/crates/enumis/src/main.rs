use std::collections::BTreeMap;
use std::error::Error;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use enumis::enumeration::{enumerate_opt, EnumerationResult, StopReason};
use enumis::harness::{
    already_recorded, append_record, parse_graph, read_records, run_experiment, validate_bounds,
    write_graph, BenchPlan, FairnessCategory,
};
use enumis::ising::{AnnealSchedule, Interpolation};
use enumis::maxclique::{
    enumerate_max_cliques_budgeted, erdos_renyi, make_clique_sampler, Graph, VertexSet,
};
use enumis::model_io::{parse_ising, parse_qubo};
use enumis::samplers::IsingSampler;

#[derive(Parser)]
#[command(
    name = "enumis",
    version,
    about = "Enumerate all optimal solutions by repeated sampling with probabilistic stopping rules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the maximum cliques of one instance (or the minima of a
    /// QUBO/Ising model file) with the annealing sampler
    Enumerate(EnumerateArgs),
    /// Sweep random graphs, repeat the enumeration per instance, and stream
    /// one JSON record per instance
    Bench(BenchArgs),
    /// Monte Carlo validation of the tail bounds and both enumeration
    /// guarantees
    ValidateBounds(ValidateBoundsArgs),
    /// Generate a seeded random graph in DIMACS form
    GenGraph(GenGraphArgs),
    /// Exact reference enumeration of all maximum cliques
    Exact(ExactArgs),
}

#[derive(Args)]
struct InstanceSource {
    /// DIMACS graph file (`p edge <n> <m>`, `e <u> <v>`)
    graph: Option<PathBuf>,
    /// Generate a random graph with this many vertices
    #[arg(long, conflicts_with = "graph")]
    n: Option<usize>,
    /// Density of the generated graph
    #[arg(long, requires = "n")]
    density: Option<f64>,
    /// Seed of the generated graph
    #[arg(long, requires = "n")]
    graph_seed: Option<u64>,
}

impl InstanceSource {
    fn load(&self) -> Result<(String, Graph), Box<dyn Error>> {
        if let Some(path) = &self.graph {
            let text = std::fs::read_to_string(path)?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "graph".to_string());
            return Ok((id, parse_graph(&text)?));
        }
        let n = self.n.ok_or("pass a DIMACS file or --n/--density/--graph-seed")?;
        let density = self.density.unwrap_or(0.5);
        let seed = self.graph_seed.unwrap_or(0);
        Ok((
            format!("er-n{n}-d{density}-s{seed}"),
            erdos_renyi(n, density, seed)?,
        ))
    }
}

#[derive(Args, Clone)]
struct ScheduleArgs {
    /// Annealing sweeps per draw
    #[arg(long, default_value_t = 1000)]
    sweeps: u32,
    /// Initial inverse temperature
    #[arg(long = "beta0", default_value_t = 0.1)]
    beta0: f64,
    /// Final inverse temperature
    #[arg(long = "beta1", default_value_t = 10.0)]
    beta1: f64,
    /// Ramp shape: geometric or linear
    #[arg(long, value_parser = parse_interpolation, default_value = "geometric")]
    interpolation: Interpolation,
}

fn parse_interpolation(s: &str) -> Result<Interpolation, String> {
    match s {
        "geometric" => Ok(Interpolation::Geometric),
        "linear" => Ok(Interpolation::Linear),
        other => Err(format!("unknown interpolation {other:?}")),
    }
}

impl ScheduleArgs {
    fn build(&self) -> Result<AnnealSchedule, Box<dyn Error>> {
        Ok(AnnealSchedule::new(
            self.sweeps,
            self.beta0,
            self.beta1,
            self.interpolation,
        )?)
    }
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    source: InstanceSource,
    /// Enumerate the minima of a QUBO model file instead of a graph
    #[arg(long, conflicts_with_all = ["graph", "n", "ising"])]
    qubo: Option<PathBuf>,
    /// Enumerate the ground states of an Ising model file instead of a graph
    #[arg(long, conflicts_with_all = ["graph", "n"])]
    ising: Option<PathBuf>,
    /// Failure tolerance
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Clique-constraint penalty strength (graphs only)
    #[arg(long, default_value_t = 2.0)]
    penalty: f64,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Master seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Hard cap on raw sampler draws (voids the epsilon guarantee)
    #[arg(long)]
    budget_cap: Option<u64>,
    /// Append the result as a JSON line to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CliqueEnumerationOutput {
    kind: &'static str,
    id: String,
    n_vertices: usize,
    epsilon: f64,
    penalty: f64,
    schedule: AnnealSchedule,
    seed: u64,
    clique_size: usize,
    theta: f64,
    accepted_samples: u64,
    raw_draws: u64,
    stop_reason: StopReason,
    solutions: Vec<Vec<u32>>,
}

#[derive(Serialize)]
struct ModelEnumerationOutput {
    kind: &'static str,
    id: String,
    n_vars: usize,
    epsilon: f64,
    schedule: AnnealSchedule,
    seed: u64,
    theta: f64,
    accepted_samples: u64,
    raw_draws: u64,
    stop_reason: StopReason,
    solutions: Vec<ModelSolution>,
}

#[derive(Serialize)]
struct ModelSolution {
    key: String,
    cost: f64,
}

fn emit_json(path: Option<&Path>, value: &impl Serialize) -> Result<(), Box<dyn Error>> {
    let line = serde_json::to_string(value)?;
    match path {
        Some(path) => {
            let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(file, "{line}")?;
        }
        None => println!("{line}"),
    }
    Ok(())
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<(), Box<dyn Error>> {
    let schedule = args.schedule.build()?;
    if args.qubo.is_some() || args.ising.is_some() {
        let (id, model) = if let Some(path) = &args.qubo {
            let text = std::fs::read_to_string(path)?;
            (path.display().to_string(), parse_qubo(&text)?.to_ising())
        } else {
            let path = args.ising.as_ref().unwrap();
            let text = std::fs::read_to_string(path)?;
            (path.display().to_string(), parse_ising(&text)?)
        };
        let n_vars = model.n_spins();
        let mut sampler = IsingSampler::new(model, schedule, args.seed);
        let result = enumerate_opt(&mut sampler, args.epsilon, args.budget_cap)?;
        print_model_result(&result);
        let output = ModelEnumerationOutput {
            kind: "model_enumeration",
            id,
            n_vars,
            epsilon: args.epsilon,
            schedule,
            seed: args.seed,
            theta: result.theta,
            accepted_samples: result.accepted_samples,
            raw_draws: result.raw_draws,
            stop_reason: result.stop_reason,
            solutions: result
                .solutions
                .iter()
                .map(|s| ModelSolution {
                    key: s.key.to_string(),
                    cost: s.cost,
                })
                .collect(),
        };
        if args.out.is_some() {
            emit_json(args.out.as_deref(), &output)?;
        }
        return Ok(());
    }

    let (id, graph) = args.source.load()?;
    let mut sampler = make_clique_sampler(&graph, args.penalty, schedule, args.seed)?;
    let result = enumerate_opt(&mut sampler, args.epsilon, args.budget_cap)?;
    let solutions: Vec<Vec<u32>> = result
        .solutions
        .iter()
        .map(|s| VertexSet::from_key(&s.key).members().to_vec())
        .collect();
    let clique_size = (-result.theta) as usize;
    println!(
        "{id}: {} maximum clique(s) of size {clique_size} (tau = {}, raw draws = {}, {:?})",
        solutions.len(),
        result.accepted_samples,
        result.raw_draws,
        result.stop_reason
    );
    for clique in &solutions {
        println!("  {clique:?}");
    }
    if result.stop_reason == StopReason::BudgetCapReached {
        eprintln!("warning: budget cap reached; no failure-probability guarantee applies");
    }
    let output = CliqueEnumerationOutput {
        kind: "clique_enumeration",
        id,
        n_vertices: graph.n_vertices(),
        epsilon: args.epsilon,
        penalty: args.penalty,
        schedule,
        seed: args.seed,
        clique_size,
        theta: result.theta,
        accepted_samples: result.accepted_samples,
        raw_draws: result.raw_draws,
        stop_reason: result.stop_reason,
        solutions,
    };
    if args.out.is_some() {
        emit_json(args.out.as_deref(), &output)?;
    }
    Ok(())
}

fn print_model_result(result: &EnumerationResult) {
    println!(
        "{} minimum-energy state(s) at energy {} (tau = {}, raw draws = {}, {:?})",
        result.solutions.len(),
        result.theta,
        result.accepted_samples,
        result.raw_draws,
        result.stop_reason
    );
    for s in &result.solutions {
        println!("  {} energy {}", s.key, s.cost);
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated vertex counts
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60")]
    sizes: Vec<usize>,
    /// Comma-separated densities
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    densities: Vec<f64>,
    /// Independent enumeration runs per instance
    #[arg(long, default_value_t = 100)]
    runs: u32,
    /// Failure tolerance per run
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Clique-constraint penalty strength
    #[arg(long, default_value_t = 2.0)]
    penalty: f64,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Campaign master seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Record file (JSON lines). An existing file resumes the campaign:
    /// completed instances are skipped
    #[arg(long)]
    out: Option<PathBuf>,
    /// Wall-clock budget for the exact reference per instance; instances
    /// exceeding it are recorded without ground truth
    #[arg(long, default_value_t = 60.0)]
    exact_budget_seconds: f64,
}

fn cmd_bench(args: BenchArgs) -> Result<(), Box<dyn Error>> {
    let plan = BenchPlan {
        sizes: args.sizes.clone(),
        densities: args.densities.clone(),
        runs: args.runs,
        epsilon: args.epsilon,
        penalty: args.penalty,
        schedule: args.schedule.build()?,
        master_seed: args.seed,
        exact_budget: Some(Duration::from_secs_f64(args.exact_budget_seconds)),
    };
    let existing = match &args.out {
        Some(path) if path.exists() => read_records(path)?,
        _ => Vec::new(),
    };
    let configs = plan.instances();
    let total = configs.len();
    let mut records = existing.clone();
    for (index, config) in configs.into_iter().enumerate() {
        if already_recorded(&existing, &config) {
            eprintln!("[{}/{}] already recorded, skipping", index + 1, total);
            continue;
        }
        let record = run_experiment(&config)?;
        eprintln!(
            "[{}/{}] {} runs={} successes={} coverage={} wall={:.1}s",
            index + 1,
            total,
            record.problem.id,
            record.params.runs,
            record
                .summary
                .as_ref()
                .map(|s| s.successes.to_string())
                .unwrap_or_else(|| "n/a".to_string()),
            record
                .summary
                .as_ref()
                .map(|s| format!("{:.4}", s.mean_coverage))
                .unwrap_or_else(|| "n/a".to_string()),
            record.timing.total_wall_time_s,
        );
        match &args.out {
            Some(path) => append_record(path, &record)?,
            None => println!("{}", serde_json::to_string(&record)?),
        }
        records.push(record);
    }
    print_category_table(&records);
    Ok(())
}

/// Per-density fairness categorization of all recorded instances.
fn print_category_table(records: &[enumis::harness::ExperimentRecord]) {
    let mut by_density: BTreeMap<String, [u64; 6]> = BTreeMap::new();
    for record in records {
        let Some(fairness) = &record.fairness else { continue };
        let incompatible = record.incompatible == Some(true);
        let entry = by_density
            .entry(format!("{:.2}", nominal_density(record)))
            .or_default();
        entry[0] += 1;
        entry[1] += u64::from(incompatible);
        match fairness.category {
            FairnessCategory::Unique => entry[2] += 1,
            FairnessCategory::Fair => entry[3] += 1,
            FairnessCategory::Unfair => {
                entry[4] += 1;
                entry[5] += u64::from(incompatible);
            }
        }
    }
    if by_density.is_empty() {
        return;
    }
    eprintln!("density  all(incompat)  unique  fair  unfair(incompat)");
    for (density, e) in by_density {
        eprintln!(
            "{density:>7}  {:>4}({})        {:>5}  {:>4}  {:>5}({})",
            e[0], e[1], e[2], e[3], e[4], e[5]
        );
    }
}

fn nominal_density(record: &enumis::harness::ExperimentRecord) -> f64 {
    // parse the nominal density back out of generated-instance ids
    record
        .problem
        .id
        .split("-d")
        .nth(1)
        .and_then(|rest| rest.split("-s").next())
        .and_then(|d| d.parse().ok())
        .unwrap_or(record.problem.density)
}

#[derive(Args)]
struct ValidateBoundsArgs {
    /// Trials per lemma check
    #[arg(long, default_value_t = 100_000)]
    trials_lemma: u64,
    /// Trials per theorem check
    #[arg(long, default_value_t = 20_000)]
    trials_theorem: u64,
    /// Campaign master seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Append each check as a JSON line to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_validate_bounds(args: ValidateBoundsArgs) -> Result<(), Box<dyn Error>> {
    let records = validate_bounds(args.trials_lemma, args.trials_theorem, args.seed)?;
    let mut all_passed = true;
    for record in &records {
        let passed = record.passed();
        all_passed &= passed;
        println!(
            "{} {}",
            if passed { "PASS" } else { "FAIL" },
            record.describe()
        );
        if args.out.is_some() {
            emit_json(args.out.as_deref(), record)?;
        }
    }
    if !all_passed {
        return Err("one or more bound checks failed".into());
    }
    Ok(())
}

#[derive(Args)]
struct GenGraphArgs {
    /// Vertex count
    #[arg(long)]
    n: usize,
    /// Target density (edge count is round(C(n,2) * density))
    #[arg(long)]
    density: f64,
    /// Graph seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_gen_graph(args: GenGraphArgs) -> Result<(), Box<dyn Error>> {
    let graph = erdos_renyi(args.n, args.density, args.seed)?;
    let text = write_graph(&graph);
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    source: InstanceSource,
    /// Give up after this many seconds
    #[arg(long)]
    exact_budget_seconds: Option<f64>,
}

fn cmd_exact(args: ExactArgs) -> Result<(), Box<dyn Error>> {
    let (id, graph) = args.source.load()?;
    let budget = args.exact_budget_seconds.map(Duration::from_secs_f64);
    match enumerate_max_cliques_budgeted(&graph, budget) {
        Some(cliques) => {
            let size = cliques.first().map_or(0, |c| c.len());
            println!("{id}: {} maximum clique(s) of size {size}", cliques.len());
            for clique in &cliques {
                println!("  {:?}", clique.members());
            }
        }
        None => {
            return Err(format!("{id}: exact enumeration exceeded the time budget").into());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::ValidateBounds(args) => cmd_validate_bounds(args),
        Command::GenGraph(args) => cmd_gen_graph(args),
        Command::Exact(args) => cmd_exact(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
