//! Warehouse instances, assignments and the interpallet objective.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A pallet waiting to be allocated. Its id is its index in the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pallet {
    /// Capacity consumed on the shelf, in the same unit as shelf capacities.
    pub cost: u64,
}

impl Pallet {
    pub fn unit() -> Self {
        Pallet { cost: 1 }
    }
}

/// A gravity-flow shelf with the pallets that already sit on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Shelf {
    pub remaining_capacity: u64,
    /// One row per pallet already on the shelf; entry `alpha` of a row is the
    /// matching parameter between that pallet and new pallet `alpha`.
    pub pre_affinity: Vec<Vec<f64>>,
}

impl Shelf {
    pub fn empty(remaining_capacity: u64) -> Self {
        Shelf {
            remaining_capacity,
            pre_affinity: Vec::new(),
        }
    }

    pub fn preallocated(&self) -> usize {
        self.pre_affinity.len()
    }
}

/// Symmetric matrix of matching parameters between new pallets, stored in
/// full row-major form.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl MatchingMatrix {
    /// All-zero matrix of the given size.
    pub fn zeros(size: usize) -> Self {
        MatchingMatrix {
            size,
            entries: vec![0.0; size * size],
        }
    }

    /// Builds the matrix from its rows, checking squareness, range, zero
    /// diagonal and symmetry.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Invariant(format!(
                    "lambda row {a} has length {}, expected {size}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        let matrix = MatchingMatrix { size, entries };
        matrix.validate()?;
        Ok(matrix)
    }

    /// Builds a matrix from the strictly lower triangle, `lower[a]` holding
    /// the `a` entries `lambda[a][0..a]`.
    pub fn from_lower_triangle(lower: &[Vec<f64>]) -> Result<Self> {
        let size = lower.len();
        let mut matrix = MatchingMatrix::zeros(size);
        for (a, row) in lower.iter().enumerate() {
            if row.len() != a {
                return Err(Error::Invariant(format!(
                    "lambda lower-triangle row {a} has length {}, expected {a}",
                    row.len()
                )));
            }
            for (b, &value) in row.iter().enumerate() {
                matrix.entries[a * size + b] = value;
                matrix.entries[b * size + a] = value;
            }
        }
        matrix.validate()?;
        Ok(matrix)
    }

    fn validate(&self) -> Result<()> {
        let n = self.size;
        for a in 0..n {
            for b in 0..n {
                let value = self.entries[a * n + b];
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::Invariant(format!(
                        "range violation: lambda[{a}][{b}] = {value} is outside [0, 1]"
                    )));
                }
            }
            if self.entries[a * n + a] != 0.0 {
                return Err(Error::Invariant(format!(
                    "diagonal violation: lambda[{a}][{a}] = {} must be 0",
                    self.entries[a * n + a]
                )));
            }
            for b in 0..a {
                if self.entries[a * n + b] != self.entries[b * n + a] {
                    return Err(Error::Invariant(format!(
                        "symmetry violation: lambda[{a}][{b}] = {} but lambda[{b}][{a}] = {}",
                        self.entries[a * n + b],
                        self.entries[b * n + a]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.size + b]
    }

    #[inline]
    pub fn row(&self, a: usize) -> &[f64] {
        &self.entries[a * self.size..(a + 1) * self.size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.size.max(1)).take(self.size)
    }

    /// Sum of all matching parameters over unordered pairs.
    pub fn pair_sum(&self) -> f64 {
        let mut total = 0.0;
        for a in 0..self.size {
            for b in 0..a {
                total += self.get(a, b);
            }
        }
        total
    }
}

/// A warehouse state: shelves with remaining capacities and pre-allocated
/// pallets, the new pallets, and their mutual matching parameters.
///
/// Immutable once built. The per-shelf sums of pre-allocated affinities are
/// computed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    shelves: Vec<Shelf>,
    pallets: Vec<Pallet>,
    matching: MatchingMatrix,
    // pre_sums[m][alpha] = sum over tau of lambda^(m)[tau][alpha]
    pre_sums: Vec<Vec<f64>>,
}

impl Instance {
    pub fn new(shelves: Vec<Shelf>, pallets: Vec<Pallet>, matching: MatchingMatrix) -> Result<Self> {
        let n = pallets.len();
        if matching.size() != n {
            return Err(Error::Invariant(format!(
                "dimension violation: lambda is {}x{} but there are {n} pallets",
                matching.size(),
                matching.size()
            )));
        }
        let mut pre_sums = Vec::with_capacity(shelves.len());
        for (m, shelf) in shelves.iter().enumerate() {
            let mut sums = vec![0.0; n];
            for (tau, row) in shelf.pre_affinity.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::Invariant(format!(
                        "dimension violation: shelves[{m}].pre_affinity[{tau}] has length {}, expected {n}",
                        row.len()
                    )));
                }
                for (alpha, &value) in row.iter().enumerate() {
                    if !(0.0..=1.0).contains(&value) {
                        return Err(Error::Invariant(format!(
                            "range violation: shelves[{m}].pre_affinity[{tau}][{alpha}] = {value} is outside [0, 1]"
                        )));
                    }
                    sums[alpha] += value;
                }
            }
            pre_sums.push(sums);
        }
        Ok(Instance {
            shelves,
            pallets,
            matching,
            pre_sums,
        })
    }

    pub fn num_shelves(&self) -> usize {
        self.shelves.len()
    }

    pub fn num_pallets(&self) -> usize {
        self.pallets.len()
    }

    pub fn shelves(&self) -> &[Shelf] {
        &self.shelves
    }

    pub fn pallets(&self) -> &[Pallet] {
        &self.pallets
    }

    pub fn matching(&self) -> &MatchingMatrix {
        &self.matching
    }

    #[inline]
    pub fn cost(&self, pallet: usize) -> u64 {
        self.pallets[pallet].cost
    }

    #[inline]
    pub fn capacity(&self, shelf: usize) -> u64 {
        self.shelves[shelf].remaining_capacity
    }

    pub fn capacities(&self) -> Vec<u64> {
        self.shelves.iter().map(|s| s.remaining_capacity).collect()
    }

    /// Sum of the pre-allocated affinities of `pallet` on `shelf`.
    #[inline]
    pub fn pre_affinity_sum(&self, shelf: usize, pallet: usize) -> f64 {
        self.pre_sums[shelf][pallet]
    }

    pub fn total_cost(&self) -> u64 {
        self.pallets.iter().map(|p| p.cost).sum()
    }

    pub fn total_capacity(&self) -> u64 {
        self.shelves.iter().map(|s| s.remaining_capacity).sum()
    }

    pub fn has_unit_costs(&self) -> bool {
        self.pallets.iter().all(|p| p.cost == 1)
    }

    /// Upper bound on the objective of any assignment: every pair and every
    /// pallet/shelf affinity counted once.
    pub fn objective_upper_bound(&self) -> f64 {
        self.matching.pair_sum() + self.pre_sums.iter().flatten().sum::<f64>()
    }

    /// Checks that `assignment` covers every pallet with a valid shelf index.
    pub fn check_assignment(&self, assignment: &Assignment) -> Result<()> {
        if assignment.len() != self.num_pallets() {
            return Err(Error::DimensionMismatch {
                what: "assignment length",
                expected: self.num_pallets(),
                actual: assignment.len(),
            });
        }
        if let Some((pallet, &shelf)) = assignment
            .shelf_of
            .iter()
            .enumerate()
            .find(|(_, &m)| m >= self.num_shelves())
        {
            return Err(Error::InvalidArgument(format!(
                "pallet {pallet} is assigned to shelf {shelf}, but there are {} shelves",
                self.num_shelves()
            )));
        }
        Ok(())
    }

    /// Loads of every shelf under `assignment`. The assignment must already
    /// be checked against the instance.
    pub(crate) fn loads_unchecked(&self, assignment: &Assignment) -> Vec<u64> {
        let mut loads = vec![0; self.num_shelves()];
        for (pallet, &shelf) in assignment.shelf_of.iter().enumerate() {
            loads[shelf] += self.cost(pallet);
        }
        loads
    }

    pub(crate) fn objective_unchecked(&self, assignment: &Assignment) -> f64 {
        let shelf_of = &assignment.shelf_of;
        let mut total = 0.0;
        for a in 0..shelf_of.len() {
            let row = self.matching.row(a);
            for b in 0..a {
                if shelf_of[a] == shelf_of[b] {
                    total += row[b];
                }
            }
            total += self.pre_sums[shelf_of[a]][a];
        }
        total
    }
}

/// Shelf index of every new pallet. Each pallet sits on exactly one shelf by
/// construction; capacity is checked separately.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub shelf_of: Vec<usize>,
}

impl Assignment {
    pub fn new(shelf_of: Vec<usize>) -> Self {
        Assignment { shelf_of }
    }

    pub fn len(&self) -> usize {
        self.shelf_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shelf_of.is_empty()
    }

    #[inline]
    pub fn shelf(&self, pallet: usize) -> usize {
        self.shelf_of[pallet]
    }
}

impl From<Vec<usize>> for Assignment {
    fn from(shelf_of: Vec<usize>) -> Self {
        Assignment::new(shelf_of)
    }
}

/// Total interpallet cost: matching parameters of co-located new pallets plus
/// the affinities of each new pallet with the pallets already on its shelf.
/// Capacities are ignored.
pub fn objective_lambda(instance: &Instance, assignment: &Assignment) -> Result<f64> {
    instance.check_assignment(assignment)?;
    Ok(instance.objective_unchecked(assignment))
}

/// Sum of the costs of the pallets placed on `shelf`.
pub fn shelf_load(instance: &Instance, assignment: &Assignment, shelf: usize) -> Result<u64> {
    instance.check_assignment(assignment)?;
    if shelf >= instance.num_shelves() {
        return Err(Error::InvalidArgument(format!(
            "shelf {shelf} out of range for {} shelves",
            instance.num_shelves()
        )));
    }
    Ok(assignment
        .shelf_of
        .iter()
        .enumerate()
        .filter(|(_, &m)| m == shelf)
        .map(|(pallet, _)| instance.cost(pallet))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShelfStatus {
    pub load: u64,
    pub remaining_capacity: u64,
    pub overflow: u64,
}

/// Per-shelf capacity check of an assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub shelves: Vec<ShelfStatus>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.shelves.iter().all(|s| s.overflow == 0)
    }

    pub fn overflows(&self) -> Vec<u64> {
        self.shelves.iter().map(|s| s.overflow).collect()
    }
}

pub fn check_feasible(instance: &Instance, assignment: &Assignment) -> Result<FeasibilityReport> {
    instance.check_assignment(assignment)?;
    let shelves = instance
        .loads_unchecked(assignment)
        .into_iter()
        .zip(instance.shelves())
        .map(|(load, shelf)| ShelfStatus {
            load,
            remaining_capacity: shelf.remaining_capacity,
            overflow: load.saturating_sub(shelf.remaining_capacity),
        })
        .collect();
    Ok(FeasibilityReport { shelves })
}

/// Small fixed instances used throughout the tests and examples.
pub mod fixtures {
    use super::*;

    /// Two shelves of capacity 2, three unit pallets, no pre-allocated
    /// pallets, lambda(0,1) = 0.1, lambda(0,2) = 0.9, lambda(1,2) = 0.5.
    pub fn t1() -> Instance {
        let matching =
            MatchingMatrix::from_lower_triangle(&[vec![], vec![0.1], vec![0.9, 0.5]]).unwrap();
        Instance::new(
            vec![Shelf::empty(2), Shelf::empty(2)],
            vec![Pallet::unit(); 3],
            matching,
        )
        .unwrap()
    }

    /// Two shelves of capacity 1, one unit pallet, one pre-allocated pallet
    /// per shelf with affinities 0.3 and 0.7.
    pub fn t2() -> Instance {
        Instance::new(
            vec![
                Shelf {
                    remaining_capacity: 1,
                    pre_affinity: vec![vec![0.3]],
                },
                Shelf {
                    remaining_capacity: 1,
                    pre_affinity: vec![vec![0.7]],
                },
            ],
            vec![Pallet::unit()],
            MatchingMatrix::zeros(1),
        )
        .unwrap()
    }
}
