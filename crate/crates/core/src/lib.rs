//! Warehouse slotting for gravity-flow racks, formulated as a QUBO.
//!
//! New pallets are distributed over shelves so that pairs of pallets that are
//! often requested together share a shelf. The objective is a sum of pairwise
//! matching costs; shelf capacities and the one-shelf-per-pallet rule enter
//! the binary formulation as squared penalty terms.
//!
//! This crate is `no_std` (it needs `alloc`) and holds everything that does
//! not touch the file system or the wall clock:
//!
//! * [`model`]: instances, assignments and the interpallet objective.
//! * [`qubo`]: penalty Hamiltonian, slack encodings, QUBO/Ising conversion
//!   and the textual QUBO format.
//! * [`annealer`]: simulated annealing over bitstrings (bit-flip) or over
//!   assignments (move/swap).
//! * [`exact`]: brute-force optimum and solution-space counting.
//! * [`generator`]: seeded synthetic square-warehouse instances.
#![no_std]

extern crate alloc;

pub mod annealer;
mod error;
pub mod exact;
pub mod generator;
pub mod model;
pub mod qubo;
pub mod rng;

pub use error::{Error, Result};
pub use model::{Assignment, Instance, MatchingMatrix, Pallet, Shelf};
pub use qubo::{BitString, PenaltyWeights, QuboModel, SlackMode};
