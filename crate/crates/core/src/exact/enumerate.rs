use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Assignment, Instance};
use crate::{Error, Result};

/// Largest number of raw configurations `M^N` an enumeration may scan.
pub const ENUMERATION_LIMIT: f64 = 1e7;

fn check_guard(instance: &Instance) -> Result<()> {
    let configurations = libm::pow(instance.num_shelves() as f64, instance.num_pallets() as f64);
    if configurations > ENUMERATION_LIMIT {
        return Err(Error::SizeLimit {
            configurations,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Depth-first walk over assignments in lexicographic order of `shelf_of`,
/// pruning any branch that overloads a shelf.
pub struct FeasibleAssignments<'a> {
    instance: &'a Instance,
    shelf_of: Vec<usize>,
    loads: Vec<u64>,
    // number of pallets currently placed
    depth: usize,
    done: bool,
}

impl<'a> FeasibleAssignments<'a> {
    fn new(instance: &'a Instance) -> Self {
        FeasibleAssignments {
            instance,
            shelf_of: vec![0; instance.num_pallets()],
            loads: vec![0; instance.num_shelves()],
            depth: 0,
            done: false,
        }
    }

    /// Places pallet `depth` on the first shelf at or after `from` that has
    /// room for it.
    fn place_from(&mut self, from: usize) -> bool {
        let pallet = self.depth;
        let cost = self.instance.cost(pallet);
        for m in from..self.instance.num_shelves() {
            if self.loads[m] + cost <= self.instance.capacity(m) {
                self.shelf_of[pallet] = m;
                self.loads[m] += cost;
                self.depth += 1;
                return true;
            }
        }
        false
    }

    /// Removes the last placed pallet and retries it on later shelves,
    /// backtracking further when it has none left.
    fn advance(&mut self) -> bool {
        while self.depth > 0 {
            self.depth -= 1;
            let pallet = self.depth;
            let shelf = self.shelf_of[pallet];
            self.loads[shelf] -= self.instance.cost(pallet);
            if self.place_from(shelf + 1) {
                return true;
            }
        }
        false
    }
}

impl Iterator for FeasibleAssignments<'_> {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.done {
            return None;
        }
        let n = self.instance.num_pallets();
        // The previous item left the walk at full depth; move past it.
        if self.depth == n && n > 0 && !self.advance() {
            self.done = true;
            return None;
        }
        loop {
            if self.depth == n {
                if n == 0 {
                    self.done = true;
                }
                return Some(Assignment::new(self.shelf_of.clone()));
            }
            if !self.place_from(0) && !self.advance() {
                self.done = true;
                return None;
            }
        }
    }
}

/// Every assignment that respects all shelf capacities, each exactly once,
/// in lexicographic order.
pub fn enumerate_feasible(instance: &Instance) -> Result<FeasibleAssignments<'_>> {
    check_guard(instance)?;
    Ok(FeasibleAssignments::new(instance))
}

/// Minimum-objective feasible assignment found by full enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    /// First optimum in enumeration order.
    pub assignment: Assignment,
    pub objective: f64,
    /// Number of feasible assignments reaching the optimum (within 1e-12).
    pub ties: usize,
    pub feasible_count: u64,
}

pub fn brute_force_optimum(instance: &Instance) -> Result<Optimum> {
    let mut best: Option<Optimum> = None;
    let mut feasible_count = 0;
    for assignment in enumerate_feasible(instance)? {
        feasible_count += 1;
        let objective = instance.objective_unchecked(&assignment);
        match &mut best {
            Some(b) if objective < b.objective - 1e-12 => {
                *b = Optimum {
                    assignment,
                    objective,
                    ties: 1,
                    feasible_count: 0,
                }
            }
            Some(b) if objective <= b.objective + 1e-12 => b.ties += 1,
            Some(_) => {}
            None => {
                best = Some(Optimum {
                    assignment,
                    objective,
                    ties: 1,
                    feasible_count: 0,
                })
            }
        }
    }
    let mut best = best.ok_or(Error::Infeasible)?;
    best.feasible_count = feasible_count;
    Ok(best)
}
