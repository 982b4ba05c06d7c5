//! Simulated annealing over the slotting Hamiltonian.
//!
//! Two variants share one driver:
//!
//! * **bit-flip** walks over QUBO bitstrings, flipping one variable per
//!   proposal;
//! * **real-swap** walks over assignments; every proposal is, with equal
//!   probability, a move of one pallet to another shelf or a swap of two
//!   pallets on different shelves. The one-shelf rule holds by construction,
//!   and the energy is the QUBO energy with the slack already minimized,
//!   `B * objective + C * sum_m max(0, load_m - R_m)^2`.
//!
//! The start temperature is calibrated from the neighbours of the random
//! initial state, then cooled geometrically after each Markov chain. A run
//! stops at the temperature floor, the wall-time budget, the iteration cap
//! or the target energy, whichever comes first.

mod neighbors;
mod schedule;
mod walk;

use alloc::format;
use alloc::vec::Vec;
use core::time::Duration;

use crate::model::{Assignment, Instance};
use crate::qubo::{PenaltyWeights, QuboModel};
use crate::rng::seeded;
use crate::{Error, Result};

pub use neighbors::{neighbor_bitflip, neighbor_move, neighbor_swap, SwapOutcome};
pub use schedule::{
    acceptance_probability, cooling_temperature, initial_temperature, metropolis_accept, temperature_from_deltas,
};

use walk::{BitFlipWalker, RealSwapWalker, Walker};

/// Monotonic time source. The core never reads the system clock itself.
pub trait Clock {
    /// Time since an arbitrary fixed origin.
    fn now(&self) -> Duration;
}

/// Clock that never advances; wall-time budgets never trigger with it.
#[derive(Debug, Clone, Copy, Default)]
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorSet {
    BitFlip,
    RealSwap,
}

/// Markov chain length rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainRule {
    /// Number of pallets.
    Pallets,
    /// Pallets times shelves.
    PalletsTimesShelves,
    Fixed(usize),
}

impl ChainRule {
    /// Chain length for `pallets` pallets on `shelves` shelves, at least 1.
    pub fn length(self, pallets: usize, shelves: usize) -> usize {
        match self {
            ChainRule::Pallets => pallets,
            ChainRule::PalletsTimesShelves => pallets * shelves,
            ChainRule::Fixed(n) => n,
        }
        .max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    pub operator_set: OperatorSet,
    /// Geometric cooling factor in (0, 1).
    pub alpha: f64,
    /// Acceptance probability of a typical uphill move at the start.
    pub accept_p0: f64,
    pub chain_length: usize,
    /// Stop once `T < ratio * T0`.
    pub temperature_floor_ratio: f64,
    pub calibration_samples: usize,
    pub max_wall_time: Option<Duration>,
    pub max_iterations: Option<u64>,
    /// Stop as soon as the best energy is at or below this value.
    pub target_energy: Option<f64>,
    pub seed: u64,
}

impl SaConfig {
    pub fn new(operator_set: OperatorSet, chain_length: usize, seed: u64) -> Self {
        SaConfig {
            operator_set,
            alpha: 0.95,
            accept_p0: 0.2,
            chain_length,
            temperature_floor_ratio: 1e-6,
            calibration_samples: 100,
            max_wall_time: None,
            max_iterations: None,
            target_energy: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        schedule::check_cooling_factor(self.alpha)?;
        schedule::check_probability(self.accept_p0)?;
        if self.chain_length == 0 {
            return Err(Error::InvalidArgument("chain length must be at least 1".into()));
        }
        if !(self.temperature_floor_ratio > 0.0 && self.temperature_floor_ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "temperature floor ratio must lie in (0, 1), got {}",
                self.temperature_floor_ratio
            )));
        }
        if self.calibration_samples == 0 {
            return Err(Error::InvalidArgument("at least one calibration sample is needed".into()));
        }
        Ok(())
    }
}

/// What a run optimizes.
#[derive(Debug, Clone, Copy)]
pub enum Problem<'a> {
    /// Any QUBO; needs [`OperatorSet::BitFlip`].
    Qubo(&'a QuboModel),
    /// Assignments of a slotting instance; needs [`OperatorSet::RealSwap`].
    Slotting {
        instance: &'a Instance,
        weights: PenaltyWeights,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Bits(Vec<bool>),
    Assignment(Assignment),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TemperatureFloor,
    WallTime,
    IterationCap,
    TargetReached,
    /// No proposal can change the state (empty bitstring, no pallets or a
    /// single shelf).
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetHit {
    pub iteration: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_energy: f64,
    pub best_solution: Solution,
    /// `(iteration, best energy so far)` at every improvement, starting with
    /// the initial state at iteration 0.
    pub energy_trace: Vec<(u64, f64)>,
    pub iterations: u64,
    pub wall_time: Duration,
    pub seed: u64,
    pub initial_temperature: f64,
    pub final_temperature: f64,
    pub stop: StopReason,
    pub target_hit: Option<TargetHit>,
}

/// `B * objective + C * sum_m max(0, load_m - R_m)^2`, the QUBO energy of the
/// assignment with every shelf's slack at its best setting.
pub fn assignment_energy(instance: &Instance, weights: PenaltyWeights, assignment: &Assignment) -> Result<f64> {
    instance.check_assignment(assignment)?;
    Ok(assignment_energy_unchecked(instance, weights, assignment))
}

pub(crate) fn assignment_energy_unchecked(instance: &Instance, weights: PenaltyWeights, assignment: &Assignment) -> f64 {
    let overflow: f64 = instance
        .loads_unchecked(assignment)
        .into_iter()
        .enumerate()
        .map(|(m, load)| {
            let over = load.saturating_sub(instance.capacity(m)) as f64;
            over * over
        })
        .sum();
    weights.b * instance.objective_unchecked(assignment) + weights.c * overflow
}

pub fn run_sa<C: Clock + ?Sized>(problem: Problem<'_>, config: &SaConfig, clock: &C) -> Result<RunResult> {
    config.validate()?;
    let mut rng = seeded(config.seed);
    match (problem, config.operator_set) {
        (Problem::Qubo(model), OperatorSet::BitFlip) => {
            let walker = BitFlipWalker::random(model, &mut rng);
            Ok(anneal(walker, config, clock, rng))
        }
        (Problem::Slotting { instance, weights }, OperatorSet::RealSwap) => {
            let walker = RealSwapWalker::random(instance, weights, &mut rng);
            Ok(anneal(walker, config, clock, rng))
        }
        (Problem::Qubo(_), OperatorSet::RealSwap) => Err(Error::InvalidArgument(
            "real-swap operators need a slotting instance, not a bare QUBO".into(),
        )),
        (Problem::Slotting { .. }, OperatorSet::BitFlip) => Err(Error::InvalidArgument(
            "bit-flip operators need a QUBO model; build one from the instance first".into(),
        )),
    }
}

const CLOCK_STRIDE: u64 = 64;

fn anneal<W: Walker, C: Clock + ?Sized>(
    mut walker: W,
    config: &SaConfig,
    clock: &C,
    mut rng: crate::rng::SeededRng,
) -> RunResult {
    let started = clock.now();
    let elapsed = |clock: &C| clock.now().saturating_sub(started);

    let mut best = walker.snapshot();
    let mut best_energy = walker.energy();
    let mut trace = alloc::vec![(0u64, best_energy)];
    let mut target_hit = None;
    let reached = |e: f64| config.target_energy.is_some_and(|t| e <= t);

    let finish = |best: Solution, best_energy, trace, iterations, t0, t, stop, target_hit| RunResult {
        best_energy,
        best_solution: best,
        energy_trace: trace,
        iterations,
        wall_time: elapsed(clock),
        seed: config.seed,
        initial_temperature: t0,
        final_temperature: t,
        stop,
        target_hit,
    };

    if reached(best_energy) {
        target_hit = Some(TargetHit {
            iteration: 0,
            elapsed: elapsed(clock),
        });
        return finish(best, best_energy, trace, 0, 0.0, 0.0, StopReason::TargetReached, target_hit);
    }
    if !walker.can_move() {
        return finish(best, best_energy, trace, 0, 0.0, 0.0, StopReason::Frozen, None);
    }

    let deltas: Vec<f64> = (0..config.calibration_samples)
        .map(|_| {
            let mv = walker.propose(&mut rng);
            walker.delta(mv)
        })
        .collect();
    let t0 = temperature_from_deltas(deltas, config.accept_p0).expect("validated acceptance probability");
    let floor = config.temperature_floor_ratio * t0;

    let resync_every = walker.resync_cost().max(1);
    let mut since_resync = 0u64;
    let mut iterations = 0u64;
    let mut step = 0u32;
    let mut temperature = t0;

    let stop = 'outer: loop {
        if temperature < floor {
            break StopReason::TemperatureFloor;
        }
        let beta = 1.0 / temperature;
        for _ in 0..config.chain_length {
            if config.max_iterations.is_some_and(|cap| iterations >= cap) {
                break 'outer StopReason::IterationCap;
            }
            if iterations.is_multiple_of(CLOCK_STRIDE) && config.max_wall_time.is_some_and(|budget| elapsed(clock) >= budget) {
                break 'outer StopReason::WallTime;
            }
            iterations += 1;
            let mv = walker.propose(&mut rng);
            let delta = walker.delta(mv);
            if metropolis_accept(delta, beta, &mut rng) {
                walker.apply(mv, delta);
                if walker.energy() < best_energy {
                    best_energy = walker.energy();
                    best = walker.snapshot();
                    trace.push((iterations, best_energy));
                    if reached(best_energy) {
                        target_hit = Some(TargetHit {
                            iteration: iterations,
                            elapsed: elapsed(clock),
                        });
                        break 'outer StopReason::TargetReached;
                    }
                }
            }
        }
        since_resync += config.chain_length as u64;
        if since_resync >= resync_every {
            walker.resync();
            since_resync = 0;
        }
        step += 1;
        temperature = t0 * libm::pow(config.alpha, step as f64);
    };

    // Drop rounding drift accumulated by the incremental updates.
    let exact = walker.full_energy(&best);
    for entry in trace.iter_mut().rev() {
        if entry.1 >= exact {
            break;
        }
        entry.1 = exact;
    }
    if let Some(last) = trace.last_mut() {
        last.1 = exact;
    }
    finish(best, exact, trace, iterations, t0, temperature, stop, target_hit)
}

/// Summary of a batch of independent runs.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchStats {
    pub runs: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
    pub min: f64,
    pub mean_wall_time: Duration,
}

impl BatchStats {
    pub fn from_runs(runs: &[RunResult]) -> Option<Self> {
        if runs.is_empty() {
            return None;
        }
        let n = runs.len() as f64;
        let mean = runs.iter().map(|r| r.best_energy).sum::<f64>() / n;
        let std = if runs.len() < 2 {
            0.0
        } else {
            libm::sqrt(runs.iter().map(|r| (r.best_energy - mean) * (r.best_energy - mean)).sum::<f64>() / (n - 1.0))
        };
        let min = runs.iter().map(|r| r.best_energy).fold(f64::INFINITY, f64::min);
        let total: Duration = runs.iter().map(|r| r.wall_time).sum();
        Some(BatchStats {
            runs: runs.len(),
            mean,
            std,
            min,
            mean_wall_time: total / runs.len() as u32,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub runs: Vec<RunResult>,
    pub stats: BatchStats,
}

/// A batch aborted by a failing run, with the runs that completed before it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("run {failed_run} of the batch failed: {error}")]
pub struct BatchError {
    pub failed_run: usize,
    pub completed: Vec<RunResult>,
    pub error: Error,
}

/// Seed of run `run` in a batch starting at `base_seed`.
pub fn batch_seed(base_seed: u64, run: usize) -> u64 {
    base_seed.wrapping_add(run as u64)
}

/// Runs `n_runs` independent annealing runs with seeds `base_seed`,
/// `base_seed + 1`, and so on.
pub fn run_batch<C: Clock + ?Sized>(
    problem: Problem<'_>,
    config: &SaConfig,
    n_runs: usize,
    base_seed: u64,
    clock: &C,
) -> Result<BatchReport, BatchError> {
    if n_runs == 0 {
        return Err(BatchError {
            failed_run: 0,
            completed: Vec::new(),
            error: Error::InvalidArgument("a batch needs at least one run".into()),
        });
    }
    let mut runs = Vec::with_capacity(n_runs);
    for r in 0..n_runs {
        let run_config = SaConfig {
            seed: batch_seed(base_seed, r),
            ..config.clone()
        };
        match run_sa(problem, &run_config, clock) {
            Ok(result) => runs.push(result),
            Err(error) => {
                return Err(BatchError {
                    failed_run: r,
                    completed: runs,
                    error,
                })
            }
        }
    }
    let stats = BatchStats::from_runs(&runs).expect("at least one run");
    Ok(BatchReport { runs, stats })
}
