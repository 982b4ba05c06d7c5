//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for runtime errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slotting_core::annealer::{run_sa, ChainRule, Problem, RunResult, SaConfig, Solution, StopReason};
use slotting_core::exact::{brute_force_optimum, count_solutions};
use slotting_core::generator::{generate_square, GeneratorSpec};
use slotting_core::model::{check_feasible, objective_lambda, Assignment, Instance};
use slotting_core::qubo::text::{render_ising, render_qubo};
use slotting_core::qubo::{build_qubo, decode_bits, default_weights, to_ising, PenaltyWeights, SlackMode};

use crate::batch::{run_batch_parallel, thread_pool};
use crate::bench::{parse_chain, run_experiment, write_csv, write_target_csv, ExperimentPlan, TargetSpec, Variant};
use crate::clock::MonotonicClock;
use crate::instance_file::{load_instance, save_instance, to_json};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "slotting", version, about = "Gravity-flow rack slotting as a QUBO, solved by simulated annealing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic square warehouse instance.
    Generate(GenerateArgs),
    /// Anneal an instance and print the best solution found.
    Solve(SolveArgs),
    /// Brute-force optimum and feasible count of a small instance.
    Exact(ExactArgs),
    /// Size of the feasible solution space for unit-cost pallets.
    Count(CountArgs),
    /// Write the QUBO (or Ising model) of an instance.
    ExportQubo(ExportArgs),
    /// Run a parameter sweep and write a CSV summary.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SlackArg {
    Bounded,
    Binary,
}

impl From<SlackArg> for SlackMode {
    fn from(s: SlackArg) -> Self {
        match s {
            SlackArg::Bounded => SlackMode::Bounded,
            SlackArg::Binary => SlackMode::PureBinary,
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    shelves: usize,
    /// Positions per shelf [default: number of shelves]
    #[arg(long)]
    capacity: Option<u64>,
    #[arg(long, default_value_t = 0.2)]
    prefill: f64,
    /// Share of the total capacity filled with new pallets.
    #[arg(long)]
    insert: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file [default: stdout]
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnnealArgs {
    #[arg(long, default_value = "rs", value_parser = parse_variant)]
    variant: Variant,
    /// Chain length: n, nm or a positive integer.
    #[arg(long, default_value = "nm", value_parser = parse_chain)]
    chain: ChainRule,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-time budget per run in seconds; 0 disables it.
    #[arg(long, default_value_t = 5.0)]
    time_budget: f64,
    #[arg(long)]
    max_iterations: Option<u64>,
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    /// Initial acceptance probability of an uphill move.
    #[arg(long, default_value_t = 0.2)]
    p0: f64,
    /// Penalty weights A,B,C [default: B = 1, A = C = max objective + 1]
    #[arg(long, value_parser = parse_weights)]
    weights: Option<PenaltyWeights>,
    #[arg(long, value_enum, default_value_t = SlackArg::Bounded)]
    slack: SlackArg,
    /// Worker threads for batches; 0 lets the pool decide.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    anneal: AnnealArgs,
    /// Independent runs with seeds seed, seed + 1, ...
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Stop a run once its best energy reaches this value.
    #[arg(long)]
    target: Option<f64>,
    /// Write the best-energy trace of the best run as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExactArgs {
    instance: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("caps").required(true).args(["capacity", "capacities"]))]
struct CountArgs {
    #[arg(long, requires = "capacity")]
    shelves: Option<usize>,
    /// Capacity shared by every shelf (with --shelves).
    #[arg(long, requires = "shelves")]
    capacity: Option<u64>,
    /// Comma-separated per-shelf capacities.
    #[arg(long, value_delimiter = ',', conflicts_with = "shelves")]
    capacities: Option<Vec<u64>>,
    #[arg(long)]
    items: u64,
    /// Print the exact count.
    #[arg(long)]
    exact: bool,
    /// Print the balanced-occupancy lower bound.
    #[arg(long)]
    lower_bound: bool,
}

#[derive(Debug, Args)]
struct ExportArgs {
    instance: PathBuf,
    #[arg(long, value_parser = parse_weights)]
    weights: Option<PenaltyWeights>,
    #[arg(long, value_enum, default_value_t = SlackArg::Bounded)]
    slack: SlackArg,
    /// Write the spin form instead.
    #[arg(long)]
    ising: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "10,15,20,25")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    prefill: f64,
    /// Insert shares in percent.
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60")]
    inserts: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "bf,rs", value_parser = parse_variant)]
    variants: Vec<Variant>,
    #[arg(long, value_delimiter = ',', default_value = "n,nm", value_parser = parse_chain)]
    chains: Vec<ChainRule>,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Wall-time budget per run in seconds; 0 disables it.
    #[arg(long, default_value_t = 5.0)]
    time_budget: f64,
    #[arg(long)]
    max_iterations: Option<u64>,
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    p0: f64,
    #[arg(long, value_enum, default_value_t = SlackArg::Bounded)]
    slack: SlackArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Skip the brute-force optimum behind gap_to_opt.
    #[arg(long)]
    no_exact: bool,
    /// Sweep this instance file instead of generated instances.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Write per-run time-to-target results to this CSV.
    #[arg(long)]
    time_to_target: Option<PathBuf>,
    /// Target energy [default: brute-force optimum when available]
    #[arg(long, requires = "time_to_target")]
    target: Option<f64>,
    #[arg(long, default_value_t = 0.03, requires = "time_to_target")]
    margin: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse()
}

fn parse_weights(s: &str) -> std::result::Result<PenaltyWeights, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [a, b, c] => PenaltyWeights::new(a, b, c).map_err(|e| e.to_string()),
        _ => Err(format!("expected three weights A,B,C, got {}", parts.len())),
    }
}

fn budget(seconds: f64) -> Result<Option<Duration>> {
    if seconds == 0.0 {
        Ok(None)
    } else {
        Duration::try_from_secs_f64(seconds)
            .map(Some)
            .map_err(|_| Error::Core(slotting_core::Error::InvalidArgument(format!("invalid time budget {seconds}"))))
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Generate(args) => generate(args, out),
        Command::Solve(args) => solve(args, out, err),
        Command::Exact(args) => exact(args, out),
        Command::Count(args) => count(args, out),
        Command::ExportQubo(args) => export(args, out),
        Command::Bench(args) => bench(args, out, err),
    }
}

fn write_to(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn generate(args: GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let spec = GeneratorSpec {
        capacity: args.capacity.unwrap_or(args.shelves as u64),
        ..GeneratorSpec::square(args.shelves, args.prefill, args.insert, args.seed)
    };
    let instance = generate_square(&spec)?;
    match args.output {
        Some(path) => save_instance(&instance, path),
        None => out.write_all(to_json(&instance).as_bytes()).map_err(stdout_err),
    }
}

fn stop_label(stop: StopReason) -> &'static str {
    match stop {
        StopReason::TemperatureFloor => "temperature-floor",
        StopReason::WallTime => "wall-time",
        StopReason::IterationCap => "iteration-cap",
        StopReason::TargetReached => "target-reached",
        StopReason::Frozen => "frozen",
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn print_assignment(instance: &Instance, assignment: &Assignment, out: &mut dyn Write) -> Result<()> {
    let objective = objective_lambda(instance, assignment)?;
    let report = check_feasible(instance, assignment)?;
    writeln!(out, "objective: {objective}").map_err(stdout_err)?;
    writeln!(out, "feasible: {}", report.is_feasible()).map_err(stdout_err)?;
    writeln!(out, "assignment: {}", join(&assignment.shelf_of)).map_err(stdout_err)
}

fn solve(args: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let a = &args.anneal;
    let weights = a.weights.unwrap_or_else(|| default_weights(&instance));
    let qubo = (a.variant == Variant::BitFlip).then(|| build_qubo(&instance, weights, a.slack.into()));
    let problem = match &qubo {
        Some(model) => Problem::Qubo(model),
        None => Problem::Slotting {
            instance: &instance,
            weights,
        },
    };
    let mut config = SaConfig::new(
        a.variant.operator_set(),
        a.chain.length(instance.num_pallets(), instance.num_shelves()),
        a.seed,
    );
    config.alpha = a.alpha;
    config.accept_p0 = a.p0;
    config.max_wall_time = budget(a.time_budget)?;
    config.max_iterations = a.max_iterations;
    config.target_energy = args.target;
    let clock = MonotonicClock::new();

    let best: RunResult = if args.runs <= 1 {
        run_sa(problem, &config, &clock)?
    } else {
        let report = run_batch_parallel(problem, &config, args.runs, a.seed, &clock, &thread_pool(a.jobs))?;
        let stats = &report.stats;
        writeln!(out, "runs: {}", stats.runs).map_err(stdout_err)?;
        writeln!(out, "mean_energy: {}", stats.mean).map_err(stdout_err)?;
        writeln!(out, "std_energy: {}", stats.std).map_err(stdout_err)?;
        writeln!(out, "min_energy: {}", stats.min).map_err(stdout_err)?;
        let _ = writeln!(err, "mean_time_s: {}", stats.mean_wall_time.as_secs_f64());
        report
            .runs
            .into_iter()
            .min_by(|x, y| x.best_energy.total_cmp(&y.best_energy))
            .expect("non-empty batch")
    };

    let w = |out: &mut dyn Write, line: String| writeln!(out, "{line}").map_err(stdout_err);
    w(out, format!("variant: {}", a.variant))?;
    w(out, format!("chain_length: {}", config.chain_length))?;
    w(out, format!("seed: {}", best.seed))?;
    w(out, format!("energy: {}", best.best_energy))?;
    w(out, format!("iterations: {}", best.iterations))?;
    w(out, format!("stop: {}", stop_label(best.stop)))?;
    let _ = writeln!(err, "wall_time_s: {}", best.wall_time.as_secs_f64());
    match &best.best_solution {
        Solution::Assignment(assignment) => print_assignment(&instance, assignment, out)?,
        Solution::Bits(bits) => {
            let report = decode_bits(qubo.as_ref().expect("bit solutions come from the qubo"), bits)?;
            w(out, format!("valid: {}", report.is_valid()))?;
            match &report.assignment {
                Some(assignment) => print_assignment(&instance, assignment, out)?,
                None => w(out, format!("violating: {}", join(&report.violating)))?,
            }
        }
    }
    if let Some(path) = &args.trace {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["iteration", "best_energy"])?;
        for (iteration, energy) in &best.energy_trace {
            w.write_record([iteration.to_string(), energy.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn exact(args: ExactArgs, out: &mut dyn Write) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let optimum = brute_force_optimum(&instance)?;
    writeln!(out, "optimum: {}", optimum.objective).map_err(stdout_err)?;
    writeln!(out, "assignment: {}", join(&optimum.assignment.shelf_of)).map_err(stdout_err)?;
    writeln!(out, "ties: {}", optimum.ties).map_err(stdout_err)?;
    writeln!(out, "count: {}", optimum.feasible_count).map_err(stdout_err)
}

fn count(args: CountArgs, out: &mut dyn Write) -> Result<()> {
    let capacities = match (args.capacities, args.shelves, args.capacity) {
        (Some(caps), _, _) => caps,
        (None, Some(m), Some(r)) => vec![r; m],
        _ => unreachable!("enforced by the argument group"),
    };
    let (want_exact, want_bound) = if args.exact || args.lower_bound {
        (args.exact, args.lower_bound)
    } else {
        (true, true)
    };
    let result = count_solutions(&capacities, args.items, want_exact);
    if want_exact {
        let exact = result.exact.expect("requested");
        writeln!(out, "exact: {exact}").map_err(stdout_err)?;
    }
    if want_bound {
        match result.lower_bound {
            Some(bound) => {
                writeln!(out, "lower_bound_log10: {:.6}", bound.log10).map_err(stdout_err)?;
                writeln!(out, "lower_bound: 10^{}", bound.exponent).map_err(stdout_err)?;
            }
            None => writeln!(out, "lower_bound: none (balanced occupancy exceeds a capacity)").map_err(stdout_err)?,
        }
    }
    Ok(())
}

fn export(args: ExportArgs, out: &mut dyn Write) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let weights = args.weights.unwrap_or_else(|| default_weights(&instance));
    let model = build_qubo(&instance, weights, args.slack.into());
    let text = if args.ising {
        render_ising(&to_ising(&model))
    } else {
        render_qubo(&model)
    };
    match args.output {
        Some(path) => write_to(&path, &text),
        None => out.write_all(text.as_bytes()).map_err(stdout_err),
    }
}

fn bench(args: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut plan = ExperimentPlan::new(args.seed);
    plan.sizes = args.sizes;
    plan.prefill = args.prefill;
    plan.insert_pcts = args.inserts;
    plan.variants = args.variants;
    plan.chains = args.chains;
    plan.runs_per_cell = args.runs;
    plan.time_budget = budget(args.time_budget)?;
    plan.max_iterations = args.max_iterations;
    plan.alpha = args.alpha;
    plan.accept_p0 = args.p0;
    plan.slack_mode = args.slack.into();
    plan.jobs = args.jobs;
    plan.exact_gap = !args.no_exact;
    plan.time_to_target = args.time_to_target.as_ref().map(|_| TargetSpec {
        target: args.target,
        margin: args.margin,
    });
    plan.instance = args.instance.as_ref().map(load_instance).transpose()?;

    let result = run_experiment(&plan)?;
    for message in &result.diagnostics {
        let _ = writeln!(err, "skipped cell: {message}");
    }
    match &args.output {
        Some(path) => write_csv(&result.rows, BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))?,
        None => write_csv(&result.rows, &mut *out)?,
    }
    if let Some(path) = &args.time_to_target {
        write_target_csv(&result.targets, BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))?;
    }
    Ok(())
}
