//! Incremental state for the two annealing variants.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::neighbors::{pick_move, pick_swap};
use super::{assignment_energy_unchecked, Solution};
use crate::model::{Assignment, Instance};
use crate::qubo::{qubo_energy, PenaltyWeights, QuboModel};
use crate::rng::{index, SeededRng};

pub(crate) trait Walker {
    type Move: Copy;

    fn energy(&self) -> f64;
    /// Whether any proposal can change the state.
    fn can_move(&self) -> bool;
    fn propose(&self, rng: &mut SeededRng) -> Self::Move;
    fn delta(&self, mv: Self::Move) -> f64;
    fn apply(&mut self, mv: Self::Move, delta: f64);
    /// Recomputes cached quantities from scratch.
    fn resync(&mut self);
    /// Rough number of operations of a resync.
    fn resync_cost(&self) -> u64;
    fn snapshot(&self) -> Solution;
    /// Energy of a solution of this walker's kind, evaluated from scratch.
    fn full_energy(&self, solution: &Solution) -> f64;
}

pub(crate) struct BitFlipWalker<'a> {
    model: &'a QuboModel,
    adjacency: Vec<Vec<(usize, f64)>>,
    bits: Vec<bool>,
    // field[i] = h_i + sum_j J_ij b_j
    field: Vec<f64>,
    energy: f64,
}

impl<'a> BitFlipWalker<'a> {
    pub fn random(model: &'a QuboModel, rng: &mut SeededRng) -> Self {
        let bits = (0..model.num_vars()).map(|_| rng.gen::<bool>()).collect();
        let mut walker = BitFlipWalker {
            model,
            adjacency: model.adjacency(),
            bits,
            field: Vec::new(),
            energy: 0.0,
        };
        walker.resync();
        walker
    }
}

impl Walker for BitFlipWalker<'_> {
    type Move = usize;

    fn energy(&self) -> f64 {
        self.energy
    }

    fn can_move(&self) -> bool {
        !self.bits.is_empty()
    }

    fn propose(&self, rng: &mut SeededRng) -> usize {
        index(rng, self.bits.len())
    }

    #[inline]
    fn delta(&self, i: usize) -> f64 {
        if self.bits[i] {
            -self.field[i]
        } else {
            self.field[i]
        }
    }

    fn apply(&mut self, i: usize, delta: f64) {
        self.bits[i] = !self.bits[i];
        let sign = if self.bits[i] { 1.0 } else { -1.0 };
        for &(j, v) in &self.adjacency[i] {
            self.field[j] += sign * v;
        }
        self.energy += delta;
    }

    fn resync(&mut self) {
        self.field = self.model.linear().to_vec();
        for (i, neighbours) in self.adjacency.iter().enumerate() {
            if self.bits[i] {
                for &(j, v) in neighbours {
                    self.field[j] += v;
                }
            }
        }
        self.energy = qubo_energy(self.model, &self.bits).expect("walker bitstring matches the model");
    }

    fn resync_cost(&self) -> u64 {
        (self.model.num_vars() + 2 * self.model.quadratic().len()) as u64
    }

    fn snapshot(&self) -> Solution {
        Solution::Bits(self.bits.clone())
    }

    fn full_energy(&self, solution: &Solution) -> f64 {
        match solution {
            Solution::Bits(bits) => qubo_energy(self.model, bits).expect("bitstring matches the model"),
            Solution::Assignment(_) => unreachable!("bit-flip walker only produces bitstrings"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum RsMove {
    Move { pallet: usize, to: usize },
    Swap { a: usize, b: usize },
    Null,
}

pub(crate) struct RealSwapWalker<'a> {
    instance: &'a Instance,
    weights: PenaltyWeights,
    shelf_of: Vec<usize>,
    loads: Vec<u64>,
    occupancy: Vec<usize>,
    occupied_shelves: usize,
    // pull[alpha * M + m] = sum of lambda[alpha][beta] over the other pallets on m
    pull: Vec<f64>,
    energy: f64,
}

impl<'a> RealSwapWalker<'a> {
    pub fn random(instance: &'a Instance, weights: PenaltyWeights, rng: &mut SeededRng) -> Self {
        let m = instance.num_shelves();
        let shelf_of = if m == 0 {
            Vec::new()
        } else {
            (0..instance.num_pallets()).map(|_| index(rng, m)).collect()
        };
        Self::from_assignment(instance, weights, shelf_of)
    }

    pub fn from_assignment(instance: &'a Instance, weights: PenaltyWeights, shelf_of: Vec<usize>) -> Self {
        let mut walker = RealSwapWalker {
            instance,
            weights,
            shelf_of,
            loads: Vec::new(),
            occupancy: Vec::new(),
            occupied_shelves: 0,
            pull: Vec::new(),
            energy: 0.0,
        };
        walker.resync();
        walker
    }

    #[inline]
    fn penalty(&self, shelf: usize, load: u64) -> f64 {
        let over = load.saturating_sub(self.instance.capacity(shelf)) as f64;
        over * over
    }

    #[inline]
    fn pull(&self, pallet: usize, shelf: usize) -> f64 {
        self.pull[pallet * self.instance.num_shelves() + shelf]
    }

    /// Change of the pallet's own affinity terms when it leaves `from` for
    /// `to`, ignoring any partner that swaps the other way.
    #[inline]
    fn affinity_shift(&self, pallet: usize, from: usize, to: usize) -> f64 {
        let inst = self.instance;
        self.pull(pallet, to) + inst.pre_affinity_sum(to, pallet)
            - self.pull(pallet, from)
            - inst.pre_affinity_sum(from, pallet)
    }

    fn relocate(&mut self, pallet: usize, to: usize) {
        let m_count = self.instance.num_shelves();
        let from = self.shelf_of[pallet];
        let row = self.instance.matching().row(pallet);
        for (beta, &lambda) in row.iter().enumerate() {
            self.pull[beta * m_count + from] -= lambda;
            self.pull[beta * m_count + to] += lambda;
        }
        let cost = self.instance.cost(pallet);
        self.loads[from] -= cost;
        self.loads[to] += cost;
        self.occupancy[from] -= 1;
        if self.occupancy[from] == 0 {
            self.occupied_shelves -= 1;
        }
        if self.occupancy[to] == 0 {
            self.occupied_shelves += 1;
        }
        self.occupancy[to] += 1;
        self.shelf_of[pallet] = to;
    }
}

impl Walker for RealSwapWalker<'_> {
    type Move = RsMove;

    fn energy(&self) -> f64 {
        self.energy
    }

    fn can_move(&self) -> bool {
        !self.shelf_of.is_empty() && self.instance.num_shelves() >= 2
    }

    fn propose(&self, rng: &mut SeededRng) -> RsMove {
        if rng.gen::<bool>() {
            let (pallet, to) = pick_move(&self.shelf_of, self.instance.num_shelves(), rng);
            RsMove::Move { pallet, to }
        } else {
            match pick_swap(&self.shelf_of, self.occupied_shelves >= 2, rng) {
                Some((a, b)) => RsMove::Swap { a, b },
                None => RsMove::Null,
            }
        }
    }

    fn delta(&self, mv: RsMove) -> f64 {
        let PenaltyWeights { b: wb, c: wc, .. } = self.weights;
        match mv {
            RsMove::Null => 0.0,
            RsMove::Move { pallet, to } => {
                let from = self.shelf_of[pallet];
                let cost = self.instance.cost(pallet);
                let d_pen = self.penalty(from, self.loads[from] - cost) + self.penalty(to, self.loads[to] + cost)
                    - self.penalty(from, self.loads[from])
                    - self.penalty(to, self.loads[to]);
                wb * self.affinity_shift(pallet, from, to) + wc * d_pen
            }
            RsMove::Swap { a, b } => {
                let (ma, mb) = (self.shelf_of[a], self.shelf_of[b]);
                let lambda_ab = self.instance.matching().get(a, b);
                let d_obj = self.affinity_shift(a, ma, mb) + self.affinity_shift(b, mb, ma) - 2.0 * lambda_ab;
                let (ca, cb) = (self.instance.cost(a), self.instance.cost(b));
                let new_a = self.loads[ma] - ca + cb;
                let new_b = self.loads[mb] - cb + ca;
                let d_pen = self.penalty(ma, new_a) + self.penalty(mb, new_b)
                    - self.penalty(ma, self.loads[ma])
                    - self.penalty(mb, self.loads[mb]);
                wb * d_obj + wc * d_pen
            }
        }
    }

    fn apply(&mut self, mv: RsMove, delta: f64) {
        match mv {
            RsMove::Null => return,
            RsMove::Move { pallet, to } => self.relocate(pallet, to),
            RsMove::Swap { a, b } => {
                let (ma, mb) = (self.shelf_of[a], self.shelf_of[b]);
                self.relocate(a, mb);
                self.relocate(b, ma);
            }
        }
        self.energy += delta;
    }

    fn resync(&mut self) {
        let inst = self.instance;
        let m_count = inst.num_shelves();
        self.loads = vec![0; m_count];
        self.occupancy = vec![0; m_count];
        self.pull = vec![0.0; inst.num_pallets() * m_count];
        for (alpha, &m) in self.shelf_of.iter().enumerate() {
            self.loads[m] += inst.cost(alpha);
            self.occupancy[m] += 1;
            for (beta, &lambda) in inst.matching().row(alpha).iter().enumerate() {
                self.pull[beta * m_count + m] += lambda;
            }
        }
        self.occupied_shelves = self.occupancy.iter().filter(|&&c| c > 0).count();
        self.energy = assignment_energy_unchecked(inst, self.weights, &Assignment::new(self.shelf_of.clone()));
    }

    fn resync_cost(&self) -> u64 {
        let n = self.shelf_of.len() as u64;
        n * n + n * self.instance.num_shelves() as u64
    }

    fn snapshot(&self) -> Solution {
        Solution::Assignment(Assignment::new(self.shelf_of.clone()))
    }

    fn full_energy(&self, solution: &Solution) -> f64 {
        match solution {
            Solution::Assignment(a) => assignment_energy_unchecked(self.instance, self.weights, a),
            Solution::Bits(_) => unreachable!("real-swap walker only produces assignments"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_square, GeneratorSpec};
    use crate::qubo::{build_qubo, default_weights, SlackMode};
    use crate::rng::seeded;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn bitflip_deltas_match_full_evaluation() {
        let inst = generate_square(&GeneratorSpec::square(4, 0.25, 0.5, 3)).unwrap();
        let model = build_qubo(&inst, default_weights(&inst), SlackMode::Bounded);
        let mut rng = seeded(8);
        let mut walker = BitFlipWalker::random(&model, &mut rng);
        for _ in 0..2000 {
            let mv = walker.propose(&mut rng);
            let delta = walker.delta(mv);
            walker.apply(mv, delta);
            let Solution::Bits(bits) = walker.snapshot() else { unreachable!() };
            assert!(close(walker.energy(), qubo_energy(&model, &bits).unwrap()));
        }
    }

    #[test]
    fn real_swap_deltas_match_full_evaluation() {
        let mut inst_spec = GeneratorSpec::square(5, 0.2, 0.6, 17);
        inst_spec.capacity = 4;
        let inst = generate_square(&inst_spec).unwrap();
        let weights = PenaltyWeights::new(3.0, 1.3, 2.0).unwrap();
        let mut rng = seeded(4);
        let mut walker = RealSwapWalker::random(&inst, weights, &mut rng);
        let mut swaps = 0;
        for _ in 0..3000 {
            let mv = walker.propose(&mut rng);
            if matches!(mv, RsMove::Swap { .. }) {
                swaps += 1;
            }
            let delta = walker.delta(mv);
            walker.apply(mv, delta);
            let Solution::Assignment(a) = walker.snapshot() else { unreachable!() };
            assert!(close(walker.energy(), assignment_energy_unchecked(&inst, weights, &a)));
        }
        assert!(swaps > 1000);
    }

    #[test]
    fn real_swap_handles_mixed_costs() {
        use crate::model::{MatchingMatrix, Pallet, Shelf};
        let matching = MatchingMatrix::from_lower_triangle(&[vec![], vec![0.4], vec![0.2, 0.9], vec![0.0, 0.3, 0.6]]).unwrap();
        let inst = Instance::new(
            vec![Shelf::empty(3), Shelf { remaining_capacity: 2, pre_affinity: vec![vec![0.5, 0.1, 0.0, 1.0]] }],
            vec![Pallet { cost: 2 }, Pallet { cost: 1 }, Pallet { cost: 0 }, Pallet { cost: 3 }],
            matching,
        )
        .unwrap();
        let weights = default_weights(&inst);
        let mut rng = seeded(99);
        let mut walker = RealSwapWalker::random(&inst, weights, &mut rng);
        for _ in 0..500 {
            let mv = walker.propose(&mut rng);
            let delta = walker.delta(mv);
            walker.apply(mv, delta);
            let Solution::Assignment(a) = walker.snapshot() else { unreachable!() };
            assert!(close(walker.energy(), assignment_energy_unchecked(&inst, weights, &a)));
        }
    }
}
