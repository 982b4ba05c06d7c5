//! Parameter sweeps over synthetic square warehouses.
//!
//! Every `(size, insert)` cell gets one generated instance, shared by all
//! variants and chain rules of that cell. Instance seeds and run seeds are
//! derived from the plan's base seed with [`mix_seed`], so a plan always
//! produces the same instances and the same run seeds.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Duration;

use slotting_core::annealer::{batch_seed, ChainRule, OperatorSet, Problem, RunResult, SaConfig};
use slotting_core::exact::{brute_force_optimum, ENUMERATION_LIMIT};
use slotting_core::generator::{generate_square, GeneratorSpec};
use slotting_core::model::Instance;
use slotting_core::qubo::{build_qubo, default_weights, SlackMode};
use slotting_core::rng::mix_seed;

use crate::batch::{run_batch_parallel, thread_pool};
use crate::clock::MonotonicClock;
use crate::Result;

pub const CSV_HEADER: [&str; 10] = [
    "size",
    "insert_pct",
    "variant",
    "chain",
    "runs",
    "mean_energy",
    "std_energy",
    "min_energy",
    "mean_time_s",
    "gap_to_opt",
];

pub const TARGET_CSV_HEADER: [&str; 9] =
    ["size", "insert_pct", "variant", "chain", "run", "seed", "reached", "time_s", "iterations"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Bit flips on the full QUBO.
    BitFlip,
    /// Moves and swaps on assignments.
    RealSwap,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::BitFlip => "bf",
            Variant::RealSwap => "rs",
        }
    }

    pub fn operator_set(self) -> OperatorSet {
        match self {
            Variant::BitFlip => OperatorSet::BitFlip,
            Variant::RealSwap => OperatorSet::RealSwap,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bf" => Ok(Variant::BitFlip),
            "rs" => Ok(Variant::RealSwap),
            other => Err(format!("unknown variant `{other}`, expected bf or rs")),
        }
    }
}

pub fn chain_label(rule: ChainRule) -> String {
    match rule {
        ChainRule::Pallets => "n".into(),
        ChainRule::PalletsTimesShelves => "nm".into(),
        ChainRule::Fixed(k) => k.to_string(),
    }
}

/// Parses `n`, `nm` or a positive integer.
pub fn parse_chain(s: &str) -> Result<ChainRule, String> {
    match s.to_ascii_lowercase().as_str() {
        "n" => Ok(ChainRule::Pallets),
        "nm" | "n*m" => Ok(ChainRule::PalletsTimesShelves),
        other => match other.parse::<usize>() {
            Ok(k) if k > 0 => Ok(ChainRule::Fixed(k)),
            _ => Err(format!("invalid chain `{s}`, expected n, nm or a positive integer")),
        },
    }
}

/// Time-to-target settings. Runs stop once their best energy is within
/// `margin * |target|` of the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    /// Explicit target; when absent the brute-force optimum is used.
    pub target: Option<f64>,
    pub margin: f64,
}

impl TargetSpec {
    pub fn threshold(target: f64, margin: f64) -> f64 {
        target + margin * target.abs()
    }
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec { target: None, margin: 0.03 }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub sizes: Vec<usize>,
    pub prefill: f64,
    pub insert_pcts: Vec<u32>,
    pub variants: Vec<Variant>,
    pub chains: Vec<ChainRule>,
    pub runs_per_cell: usize,
    pub time_budget: Option<Duration>,
    pub max_iterations: Option<u64>,
    pub alpha: f64,
    pub accept_p0: f64,
    pub slack_mode: SlackMode,
    pub base_seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    /// Compute `gap_to_opt` by brute force where the instance is small enough.
    pub exact_gap: bool,
    pub time_to_target: Option<TargetSpec>,
    /// Runs the sweep on this instance instead of generated ones.
    pub instance: Option<Instance>,
}

impl ExperimentPlan {
    pub fn new(base_seed: u64) -> Self {
        ExperimentPlan {
            sizes: vec![10, 15, 20, 25],
            prefill: 0.2,
            insert_pcts: vec![10, 20, 30, 40, 50, 60],
            variants: vec![Variant::BitFlip, Variant::RealSwap],
            chains: vec![ChainRule::Pallets, ChainRule::PalletsTimesShelves],
            runs_per_cell: 100,
            time_budget: Some(Duration::from_secs(5)),
            max_iterations: None,
            alpha: 0.95,
            accept_p0: 0.2,
            slack_mode: SlackMode::Bounded,
            base_seed,
            jobs: 0,
            exact_gap: true,
            time_to_target: None,
            instance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellRow {
    pub size: usize,
    /// Absent for an injected instance.
    pub insert_pct: Option<u32>,
    pub variant: Option<Variant>,
    pub chain: Option<ChainRule>,
    pub runs: usize,
    pub mean_energy: Option<f64>,
    pub std_energy: Option<f64>,
    pub min_energy: Option<f64>,
    pub mean_time_s: Option<f64>,
    pub gap_to_opt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetRow {
    pub size: usize,
    pub insert_pct: Option<u32>,
    pub variant: Variant,
    pub chain: ChainRule,
    pub run: usize,
    pub seed: u64,
    pub reached: bool,
    pub time_s: Option<f64>,
    pub iterations: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentResult {
    pub rows: Vec<CellRow>,
    pub targets: Vec<TargetRow>,
    /// One message per cell that could not be run.
    pub diagnostics: Vec<String>,
}

struct Cell {
    size: usize,
    insert_pct: Option<u32>,
    instance: std::result::Result<Instance, String>,
}

fn cells(plan: &ExperimentPlan) -> Vec<Cell> {
    if let Some(instance) = &plan.instance {
        return vec![Cell {
            size: instance.num_shelves(),
            insert_pct: None,
            instance: Ok(instance.clone()),
        }];
    }
    let mut out = Vec::new();
    for &size in &plan.sizes {
        for &pct in &plan.insert_pcts {
            let spec = GeneratorSpec::square(
                size,
                plan.prefill,
                pct as f64 / 100.0,
                mix_seed(plan.base_seed, &[size as u64, pct as u64]),
            );
            out.push(Cell {
                size,
                insert_pct: Some(pct),
                instance: generate_square(&spec).map_err(|e| e.to_string()),
            });
        }
    }
    out
}

fn small_enough(instance: &Instance) -> bool {
    (instance.num_pallets() as f64) * (instance.num_shelves() as f64).log10() <= ENUMERATION_LIMIT.log10()
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    let pool = thread_pool(plan.jobs);
    let clock = MonotonicClock::new();
    let mut result = ExperimentResult::default();
    for (cell_index, cell) in cells(plan).into_iter().enumerate() {
        let instance = match &cell.instance {
            Ok(instance) => instance,
            Err(message) => {
                let label = match cell.insert_pct {
                    Some(pct) => format!("size {} insert {pct}%", cell.size),
                    None => format!("size {}", cell.size),
                };
                result.diagnostics.push(format!("{label}: {message}"));
                result.rows.push(CellRow {
                    size: cell.size,
                    insert_pct: cell.insert_pct,
                    variant: None,
                    chain: None,
                    runs: 0,
                    mean_energy: None,
                    std_energy: None,
                    min_energy: None,
                    mean_time_s: None,
                    gap_to_opt: None,
                });
                continue;
            }
        };
        let weights = default_weights(instance);
        let optimum = if (plan.exact_gap || plan.time_to_target.is_some()) && small_enough(instance) {
            brute_force_optimum(instance).ok().map(|o| weights.b * o.objective)
        } else {
            None
        };
        let threshold = plan
            .time_to_target
            .and_then(|t| t.target.or(optimum).map(|target| TargetSpec::threshold(target, t.margin)));
        let qubo = plan
            .variants
            .contains(&Variant::BitFlip)
            .then(|| build_qubo(instance, weights, plan.slack_mode));
        let run_base = cell_seed(plan.base_seed, cell.size, cell.insert_pct, cell_index);

        for &variant in &plan.variants {
            let problem = match variant {
                Variant::BitFlip => Problem::Qubo(qubo.as_ref().expect("built when bf is requested")),
                Variant::RealSwap => Problem::Slotting {
                    instance,
                    weights,
                },
            };
            for &chain in &plan.chains {
                let mut config = SaConfig::new(
                    variant.operator_set(),
                    chain.length(instance.num_pallets(), instance.num_shelves()),
                    run_base,
                );
                config.alpha = plan.alpha;
                config.accept_p0 = plan.accept_p0;
                config.max_wall_time = plan.time_budget;
                config.max_iterations = plan.max_iterations;
                config.target_energy = threshold;
                let report = run_batch_parallel(problem, &config, plan.runs_per_cell, run_base, &clock, &pool)?;
                let stats = &report.stats;
                result.rows.push(CellRow {
                    size: cell.size,
                    insert_pct: cell.insert_pct,
                    variant: Some(variant),
                    chain: Some(chain),
                    runs: stats.runs,
                    mean_energy: Some(stats.mean),
                    std_energy: Some(stats.std),
                    min_energy: Some(stats.min),
                    mean_time_s: Some(stats.mean_wall_time.as_secs_f64()),
                    gap_to_opt: if plan.exact_gap { optimum.map(|o| stats.mean - o) } else { None },
                });
                if plan.time_to_target.is_some() {
                    for (r, run) in report.runs.iter().enumerate() {
                        result.targets.push(target_row(&cell, variant, chain, r, run, threshold.is_some()));
                    }
                }
            }
        }
    }
    Ok(result)
}

fn target_row(cell: &Cell, variant: Variant, chain: ChainRule, run: usize, result: &RunResult, has_target: bool) -> TargetRow {
    let hit = result.target_hit.filter(|_| has_target);
    TargetRow {
        size: cell.size,
        insert_pct: cell.insert_pct,
        variant,
        chain,
        run,
        seed: result.seed,
        reached: hit.is_some(),
        time_s: hit.map(|h| h.elapsed.as_secs_f64()),
        iterations: hit.map(|h| h.iteration),
    }
}

fn opt<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[CellRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record([
            row.size.to_string(),
            opt(row.insert_pct),
            opt(row.variant),
            opt(row.chain.map(chain_label)),
            row.runs.to_string(),
            opt(row.mean_energy),
            opt(row.std_energy),
            opt(row.min_energy),
            opt(row.mean_time_s),
            opt(row.gap_to_opt),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_target_csv<W: Write>(rows: &[TargetRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TARGET_CSV_HEADER)?;
    for row in rows {
        w.write_record([
            row.size.to_string(),
            opt(row.insert_pct),
            row.variant.to_string(),
            chain_label(row.chain),
            row.run.to_string(),
            row.seed.to_string(),
            row.reached.to_string(),
            opt(row.time_s),
            opt(row.iterations),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Seed of run `run` in every batch of the cell at position `cell_index`.
pub fn run_seed(plan: &ExperimentPlan, size: usize, insert_pct: Option<u32>, cell_index: usize, run: usize) -> u64 {
    batch_seed(cell_seed(plan.base_seed, size, insert_pct, cell_index), run)
}

fn cell_seed(base_seed: u64, size: usize, insert_pct: Option<u32>, cell_index: usize) -> u64 {
    mix_seed(base_seed, &[size as u64, insert_pct.unwrap_or(0) as u64, cell_index as u64, 1])
}
