//! Penalty Hamiltonian of the slotting problem as a QUBO.
//!
//! Variables are laid out pallet-major: allocation bit `x[alpha][m]` sits at
//! index `alpha * M + m`, followed by the slack bits of shelf 0, shelf 1, and
//! so on. The Hamiltonian is
//!
//! ```text
//! H = A * sum_alpha (1 - sum_m x[alpha][m])^2
//!   + B * sum_m (sum_{alpha>beta} lambda[alpha][beta] x[alpha][m] x[beta][m]
//!                + sum_alpha g[m][alpha] x[alpha][m])
//!   + C * sum_m (sum_alpha c[alpha] x[alpha][m] + <slack_m | a_m> - R[m])^2
//! ```
//!
//! expanded with `x^2 = x` into linear, quadratic and constant parts. The
//! constant is kept so model energies equal `H` exactly.

mod ising;
mod slack;
pub mod text;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Assignment, Instance};
use crate::{Error, Result};

pub use ising::{spins_of, to_ising, IsingModel};
pub use slack::{slack_encoding, SlackEncoding, SlackMode};

/// Flat binary vector over allocation and slack variables.
pub type BitString = Vec<bool>;

/// Multipliers of the one-shelf penalty (A), the objective (B) and the
/// capacity penalty (C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyWeights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PenaltyWeights {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("A", a), ("B", b), ("C", c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "penalty weight {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(PenaltyWeights { a, b, c })
    }
}

/// `B = 1` and `A = C = L + 1`, where `L` bounds the objective of any
/// assignment from above. Every violation costs at least `A` or `C` because
/// loads are integers, which beats any possible objective gain.
pub fn default_weights(instance: &Instance) -> PenaltyWeights {
    let dominant = instance.objective_upper_bound() + 1.0;
    PenaltyWeights {
        a: dominant,
        b: 1.0,
        c: dominant,
    }
}

/// What a QUBO variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    Allocation { pallet: usize, shelf: usize },
    Slack { shelf: usize, bit: usize },
}

/// Index map between QUBO variables and the slotting problem.
#[derive(Debug, Clone, PartialEq)]
pub struct VarLayout {
    num_pallets: usize,
    num_shelves: usize,
    slack: Vec<SlackEncoding>,
    slack_start: Vec<usize>,
    num_vars: usize,
}

impl VarLayout {
    pub fn new(num_pallets: usize, slack: Vec<SlackEncoding>) -> Self {
        let num_shelves = slack.len();
        let mut next = num_pallets * num_shelves;
        let slack_start = slack
            .iter()
            .map(|enc| {
                let start = next;
                next += enc.len();
                start
            })
            .collect();
        VarLayout {
            num_pallets,
            num_shelves,
            slack,
            slack_start,
            num_vars: next,
        }
    }

    pub fn for_instance(instance: &Instance, mode: SlackMode) -> Self {
        let slack = instance
            .shelves()
            .iter()
            .map(|s| slack_encoding(s.remaining_capacity, mode))
            .collect();
        VarLayout::new(instance.num_pallets(), slack)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_pallets(&self) -> usize {
        self.num_pallets
    }

    pub fn num_shelves(&self) -> usize {
        self.num_shelves
    }

    pub fn num_allocation_vars(&self) -> usize {
        self.num_pallets * self.num_shelves
    }

    #[inline]
    pub fn allocation(&self, pallet: usize, shelf: usize) -> usize {
        pallet * self.num_shelves + shelf
    }

    pub fn slack(&self, shelf: usize) -> &SlackEncoding {
        &self.slack[shelf]
    }

    /// Index range of the slack bits of `shelf`.
    pub fn slack_vars(&self, shelf: usize) -> core::ops::Range<usize> {
        let start = self.slack_start[shelf];
        start..start + self.slack[shelf].len()
    }

    pub fn role(&self, var: usize) -> Option<VarRole> {
        if var >= self.num_vars {
            return None;
        }
        if var < self.num_allocation_vars() {
            return Some(VarRole::Allocation {
                pallet: var / self.num_shelves,
                shelf: var % self.num_shelves,
            });
        }
        // The last shelf starting at or before `var` owns it; shelves without
        // slack bits share their start with the next shelf.
        let shelf = self.slack_start.partition_point(|&s| s <= var) - 1;
        Some(VarRole::Slack {
            shelf,
            bit: var - self.slack_start[shelf],
        })
    }

    fn check_instance(&self, instance: &Instance) -> Result<()> {
        if self.num_pallets != instance.num_pallets() {
            return Err(Error::DimensionMismatch {
                what: "layout pallets",
                expected: instance.num_pallets(),
                actual: self.num_pallets,
            });
        }
        if self.num_shelves != instance.num_shelves() {
            return Err(Error::DimensionMismatch {
                what: "layout shelves",
                expected: instance.num_shelves(),
                actual: self.num_shelves,
            });
        }
        Ok(())
    }
}

/// Quadratic binary model `offset + sum h_i b_i + sum_{i<j} J_ij b_i b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
    layout: Option<VarLayout>,
}

impl QuboModel {
    /// Model without a slotting layout, e.g. read back from a file.
    pub fn from_parts(
        num_vars: usize,
        linear: Vec<f64>,
        quadratic: BTreeMap<(usize, usize), f64>,
        offset: f64,
    ) -> Result<Self> {
        if linear.len() != num_vars {
            return Err(Error::DimensionMismatch {
                what: "linear coefficients",
                expected: num_vars,
                actual: linear.len(),
            });
        }
        if let Some(&(i, j)) = quadratic.keys().find(|&&(i, j)| i >= j || j >= num_vars) {
            return Err(Error::InvalidArgument(format!(
                "quadratic key ({i}, {j}) must satisfy i < j < {num_vars}"
            )));
        }
        Ok(QuboModel {
            linear,
            quadratic,
            offset,
            layout: None,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn layout(&self) -> Option<&VarLayout> {
        self.layout.as_ref()
    }

    pub(crate) fn require_layout(&self) -> Result<&VarLayout> {
        self.layout
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("model carries no slotting variable layout".into()))
    }

    /// Neighbour lists `(j, J_ij)` for every variable.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_vars()];
        for (&(i, j), &v) in &self.quadratic {
            adj[i].push((j, v));
            adj[j].push((i, v));
        }
        adj
    }
}

/// Expands the penalty Hamiltonian of `instance` into a QUBO.
pub fn build_qubo(instance: &Instance, weights: PenaltyWeights, mode: SlackMode) -> QuboModel {
    let layout = VarLayout::for_instance(instance, mode);
    let n = instance.num_pallets();
    let m_count = instance.num_shelves();
    let PenaltyWeights { a, b, c } = weights;

    let mut linear = vec![0.0; layout.num_vars()];
    let mut pairs: Vec<((usize, usize), f64)> = Vec::new();
    let mut offset = 0.0;
    let mut push = |i: usize, j: usize, v: f64| {
        if v != 0.0 {
            pairs.push(((i.min(j), i.max(j)), v));
        }
    };

    // One shelf per pallet: A (1 - sum x)^2 = A (1 - sum x + 2 sum_{m<m'} x x').
    offset += a * n as f64;
    for alpha in 0..n {
        for m in 0..m_count {
            linear[layout.allocation(alpha, m)] -= a;
            for m2 in 0..m {
                push(layout.allocation(alpha, m2), layout.allocation(alpha, m), 2.0 * a);
            }
        }
    }

    // Objective.
    let matching = instance.matching();
    for m in 0..m_count {
        for alpha in 0..n {
            linear[layout.allocation(alpha, m)] += b * instance.pre_affinity_sum(m, alpha);
            for beta in 0..alpha {
                push(
                    layout.allocation(beta, m),
                    layout.allocation(alpha, m),
                    b * matching.get(alpha, beta),
                );
            }
        }
    }

    // Capacity: C (sum w y - R)^2 over allocation and slack bits of the shelf.
    for m in 0..m_count {
        let capacity = instance.capacity(m) as f64;
        let mut weighted: Vec<(usize, f64)> = (0..n)
            .filter(|&alpha| instance.cost(alpha) > 0)
            .map(|alpha| (layout.allocation(alpha, m), instance.cost(alpha) as f64))
            .collect();
        weighted.extend(
            layout
                .slack_vars(m)
                .zip(&layout.slack(m).coefficients)
                .map(|(var, &coef)| (var, coef as f64)),
        );
        offset += c * capacity * capacity;
        for (k, &(i, wi)) in weighted.iter().enumerate() {
            linear[i] += c * (wi * wi - 2.0 * capacity * wi);
            for &(j, wj) in &weighted[..k] {
                push(j, i, 2.0 * c * wi * wj);
            }
        }
    }

    pairs.sort_unstable_by_key(|p| p.0);
    let mut quadratic = BTreeMap::new();
    let mut iter = pairs.into_iter().peekable();
    while let Some((key, mut value)) = iter.next() {
        while let Some(&(next, v)) = iter.peek() {
            if next != key {
                break;
            }
            value += v;
            iter.next();
        }
        if value != 0.0 {
            quadratic.insert(key, value);
        }
    }

    QuboModel {
        linear,
        quadratic,
        offset,
        layout: Some(layout),
    }
}

pub fn qubo_energy(model: &QuboModel, bits: &[bool]) -> Result<f64> {
    if bits.len() != model.num_vars() {
        return Err(Error::DimensionMismatch {
            what: "bitstring length",
            expected: model.num_vars(),
            actual: bits.len(),
        });
    }
    let mut energy = model.offset;
    for (h, &bit) in model.linear.iter().zip(bits) {
        if bit {
            energy += h;
        }
    }
    for (&(i, j), &v) in &model.quadratic {
        if bits[i] && bits[j] {
            energy += v;
        }
    }
    Ok(energy)
}

/// Bitstring of `assignment`: allocation bits from the shelf indices and each
/// shelf's slack set to `max(0, R - load)`.
pub fn encode_assignment(instance: &Instance, assignment: &Assignment, model: &QuboModel) -> Result<BitString> {
    let layout = model.require_layout()?;
    layout.check_instance(instance)?;
    instance.check_assignment(assignment)?;
    let mut bits = vec![false; layout.num_vars()];
    for (pallet, &shelf) in assignment.shelf_of.iter().enumerate() {
        bits[layout.allocation(pallet, shelf)] = true;
    }
    for (m, load) in instance.loads_unchecked(assignment).into_iter().enumerate() {
        let slack = instance.capacity(m).saturating_sub(load);
        let repr = layout.slack(m).represent(slack);
        for (var, bit) in layout.slack_vars(m).zip(repr) {
            bits[var] = bit;
        }
    }
    Ok(bits)
}

/// Shelf sets of every pallet in a decoded bitstring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeReport {
    pub shelves_of: Vec<Vec<usize>>,
    /// Pallets on zero or on several shelves.
    pub violating: Vec<usize>,
    pub assignment: Option<Assignment>,
}

impl DecodeReport {
    pub fn is_valid(&self) -> bool {
        self.violating.is_empty()
    }
}

pub fn decode_bits(model: &QuboModel, bits: &[bool]) -> Result<DecodeReport> {
    let layout = model.require_layout()?;
    if bits.len() != layout.num_vars() {
        return Err(Error::DimensionMismatch {
            what: "bitstring length",
            expected: layout.num_vars(),
            actual: bits.len(),
        });
    }
    let shelves_of: Vec<Vec<usize>> = (0..layout.num_pallets())
        .map(|alpha| {
            (0..layout.num_shelves())
                .filter(|&m| bits[layout.allocation(alpha, m)])
                .collect()
        })
        .collect();
    let violating: Vec<usize> = shelves_of
        .iter()
        .enumerate()
        .filter(|(_, s)| s.len() != 1)
        .map(|(alpha, _)| alpha)
        .collect();
    let assignment = violating
        .is_empty()
        .then(|| Assignment::new(shelves_of.iter().map(|s| s[0]).collect()));
    Ok(DecodeReport {
        shelves_of,
        violating,
        assignment,
    })
}

/// The three Hamiltonian terms of a bitstring, each already multiplied by
/// its weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub one_shelf: f64,
    pub objective: f64,
    pub capacity: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.one_shelf + self.objective + self.capacity
    }
}

/// Evaluates the Hamiltonian term by term on `bits`, without going through
/// the expanded coefficients.
pub fn energy_breakdown(
    instance: &Instance,
    weights: PenaltyWeights,
    model: &QuboModel,
    bits: &[bool],
) -> Result<EnergyBreakdown> {
    let layout = model.require_layout()?;
    layout.check_instance(instance)?;
    if bits.len() != layout.num_vars() {
        return Err(Error::DimensionMismatch {
            what: "bitstring length",
            expected: layout.num_vars(),
            actual: bits.len(),
        });
    }
    let n = instance.num_pallets();
    let m_count = instance.num_shelves();
    let x = |alpha: usize, m: usize| bits[layout.allocation(alpha, m)];

    let mut one_shelf = 0.0;
    for alpha in 0..n {
        let placed = (0..m_count).filter(|&m| x(alpha, m)).count() as f64;
        one_shelf += (1.0 - placed) * (1.0 - placed);
    }

    let mut objective = 0.0;
    let mut capacity = 0.0;
    for m in 0..m_count {
        let mut load: i128 = 0;
        for alpha in 0..n {
            if !x(alpha, m) {
                continue;
            }
            objective += instance.pre_affinity_sum(m, alpha);
            for beta in 0..alpha {
                if x(beta, m) {
                    objective += instance.matching().get(alpha, beta);
                }
            }
            load += instance.cost(alpha) as i128;
        }
        let slack_bits: Vec<bool> = layout.slack_vars(m).map(|v| bits[v]).collect();
        let excess = (load + layout.slack(m).value(&slack_bits) as i128 - instance.capacity(m) as i128) as f64;
        capacity += excess * excess;
    }

    Ok(EnergyBreakdown {
        one_shelf: weights.a * one_shelf,
        objective: weights.b * objective,
        capacity: weights.c * capacity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{t1, t2};
    use crate::model::{MatchingMatrix, Shelf};

    fn all_bitstrings(n: usize) -> impl Iterator<Item = Vec<bool>> {
        (0u64..1 << n).map(move |mask| (0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    #[test]
    fn default_weight_examples() {
        let w = default_weights(&t1());
        assert_eq!(w.b, 1.0);
        assert!((w.a - 2.5).abs() < 1e-12 && (w.c - 2.5).abs() < 1e-12);
        let w2 = default_weights(&t2());
        assert!((w2.a - 2.0).abs() < 1e-12 && (w2.c - 2.0).abs() < 1e-12);
        let flat = Instance::new(
            vec![Shelf::empty(1), Shelf::empty(1)],
            vec![crate::Pallet::unit(); 2],
            MatchingMatrix::zeros(2),
        )
        .unwrap();
        assert_eq!(default_weights(&flat), PenaltyWeights { a: 1.0, b: 1.0, c: 1.0 });
    }

    #[test]
    fn weights_must_be_positive() {
        assert!(PenaltyWeights::new(1.0, 0.0, 1.0).is_err());
        assert!(PenaltyWeights::new(-1.0, 1.0, 1.0).is_err());
        assert!(PenaltyWeights::new(1.0, 1.0, f64::NAN).is_err());
        assert!(PenaltyWeights::new(3.0, 1.0, 3.0).is_ok());
    }

    #[test]
    fn t1_variable_count_and_optimum_energy() {
        let t1 = t1();
        let w = default_weights(&t1);
        let model = build_qubo(&t1, w, SlackMode::Bounded);
        assert_eq!(model.num_vars(), 10);
        let bits = encode_assignment(&t1, &vec![0, 0, 1].into(), &model).unwrap();
        assert!((qubo_energy(&model, &bits).unwrap() - w.b * 0.1).abs() < 1e-12);
        let parts = energy_breakdown(&t1, w, &model, &bits).unwrap();
        assert_eq!(parts.one_shelf, 0.0);
        assert_eq!(parts.capacity, 0.0);
        // shelf 0 is full, shelf 1 keeps one unit of slack
        let layout = model.layout().unwrap();
        assert!(layout.slack_vars(0).all(|v| !bits[v]));
        assert_eq!(layout.slack(1).value(&bits[layout.slack_vars(1)]), 1);
    }

    #[test]
    fn zero_bitstring_energy_is_the_constant() {
        let t1 = t1();
        let w = PenaltyWeights::new(3.0, 1.0, 5.0).unwrap();
        let model = build_qubo(&t1, w, SlackMode::Bounded);
        let zero = vec![false; model.num_vars()];
        let expected = 3.0 * 3.0 + 5.0 * (4.0 + 4.0);
        assert_eq!(qubo_energy(&model, &zero).unwrap(), expected);
        assert_eq!(model.offset(), expected);
    }

    #[test]
    fn empty_model() {
        let inst = Instance::new(vec![Shelf::empty(0)], vec![], MatchingMatrix::zeros(0)).unwrap();
        let model = build_qubo(&inst, default_weights(&inst), SlackMode::Bounded);
        assert_eq!(model.num_vars(), 0);
        assert_eq!(model.offset(), 0.0);
        assert_eq!(qubo_energy(&model, &[]).unwrap(), 0.0);
    }

    #[test]
    fn energy_length_mismatch() {
        let model = build_qubo(&t1(), default_weights(&t1()), SlackMode::Bounded);
        assert!(qubo_energy(&model, &[false; 3]).is_err());
        assert!(decode_bits(&model, &[false; 3]).is_err());
    }

    #[test]
    fn expansion_matches_breakdown_exhaustively() {
        for mode in [SlackMode::Bounded, SlackMode::PureBinary] {
            let t1 = t1();
            let w = PenaltyWeights::new(2.0, 1.5, 3.0).unwrap();
            let model = build_qubo(&t1, w, mode);
            for bits in all_bitstrings(model.num_vars()) {
                let direct = energy_breakdown(&t1, w, &model, &bits).unwrap().total();
                let expanded = qubo_energy(&model, &bits).unwrap();
                assert!((direct - expanded).abs() <= 1e-9 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn overloaded_assignment_pays_capacity_penalty() {
        let t1 = t1();
        let w = default_weights(&t1);
        let model = build_qubo(&t1, w, SlackMode::Bounded);
        let a: Assignment = vec![0, 0, 0].into();
        let bits = encode_assignment(&t1, &a, &model).unwrap();
        let layout = model.layout().unwrap();
        assert!(layout.slack_vars(0).all(|v| !bits[v]));
        let parts = energy_breakdown(&t1, w, &model, &bits).unwrap();
        assert!((parts.capacity - w.c).abs() < 1e-12);
        assert!((parts.objective - 1.5).abs() < 1e-12);
    }

    #[test]
    fn decode_examples() {
        let t1 = t1();
        let model = build_qubo(&t1, default_weights(&t1), SlackMode::Bounded);
        let a: Assignment = vec![0, 0, 1].into();
        let bits = encode_assignment(&t1, &a, &model).unwrap();
        let report = decode_bits(&model, &bits).unwrap();
        assert!(report.is_valid());
        assert_eq!(report.assignment, Some(a));

        let zero = decode_bits(&model, &vec![false; model.num_vars()]).unwrap();
        assert_eq!(zero.violating, vec![0, 1, 2]);
        assert!(zero.assignment.is_none());

        let mut double = bits.clone();
        double[model.layout().unwrap().allocation(0, 1)] = true;
        let report = decode_bits(&model, &double).unwrap();
        assert_eq!(report.violating, vec![0]);
        assert_eq!(report.shelves_of[0], vec![0, 1]);
    }

    #[test]
    fn encode_empty_instance() {
        let inst = Instance::new(vec![Shelf::empty(2)], vec![], MatchingMatrix::zeros(0)).unwrap();
        let model = build_qubo(&inst, default_weights(&inst), SlackMode::Bounded);
        let bits = encode_assignment(&inst, &Assignment::new(vec![]), &model).unwrap();
        assert_eq!(model.layout().unwrap().num_allocation_vars(), 0);
        // only the slack of the single shelf remains, set to its full capacity
        assert_eq!(bits, vec![true, true]);
    }

    #[test]
    fn layout_roles() {
        let inst = Instance::new(
            vec![Shelf::empty(0), Shelf::empty(3), Shelf::empty(0), Shelf::empty(1)],
            vec![crate::Pallet::unit(); 2],
            MatchingMatrix::zeros(2),
        )
        .unwrap();
        let layout = VarLayout::for_instance(&inst, SlackMode::Bounded);
        assert_eq!(layout.num_vars(), 8 + 2 + 1);
        assert_eq!(layout.role(5), Some(VarRole::Allocation { pallet: 1, shelf: 1 }));
        assert_eq!(layout.role(8), Some(VarRole::Slack { shelf: 1, bit: 0 }));
        assert_eq!(layout.role(9), Some(VarRole::Slack { shelf: 1, bit: 1 }));
        assert_eq!(layout.role(10), Some(VarRole::Slack { shelf: 3, bit: 0 }));
        assert_eq!(layout.role(11), None);
    }
}
