//! Neighbourhood operators: bit flip on bitstrings, move and swap on
//! assignments.

use alloc::format;

use rand::Rng;

use crate::model::Assignment;
use crate::rng::index;
use crate::{Error, Result};

/// Copy of `bits` with one uniformly chosen position flipped.
pub fn neighbor_bitflip<R: Rng + ?Sized>(bits: &[bool], rng: &mut R) -> Result<alloc::vec::Vec<bool>> {
    if bits.is_empty() {
        return Err(Error::InvalidArgument("cannot flip a bit of an empty bitstring".into()));
    }
    let mut out = bits.to_vec();
    let i = index(rng, bits.len());
    out[i] = !out[i];
    Ok(out)
}

/// Uniform pallet and a uniform shelf different from its current one.
#[inline]
pub(crate) fn pick_move<R: Rng + ?Sized>(shelf_of: &[usize], num_shelves: usize, rng: &mut R) -> (usize, usize) {
    let pallet = index(rng, shelf_of.len());
    let mut to = index(rng, num_shelves - 1);
    if to >= shelf_of[pallet] {
        to += 1;
    }
    (pallet, to)
}

/// Moves one uniformly chosen pallet to a uniformly chosen other shelf.
/// Capacity is not checked.
pub fn neighbor_move<R: Rng + ?Sized>(assignment: &Assignment, num_shelves: usize, rng: &mut R) -> Result<Assignment> {
    if num_shelves < 2 {
        return Err(Error::InvalidArgument(format!(
            "a move needs at least two shelves, got {num_shelves}"
        )));
    }
    if assignment.is_empty() {
        return Err(Error::InvalidArgument("a move needs at least one pallet".into()));
    }
    let (pallet, to) = pick_move(&assignment.shelf_of, num_shelves, rng);
    let mut out = assignment.clone();
    out.shelf_of[pallet] = to;
    Ok(out)
}

/// Uniform pair of pallets on different shelves, by rejection. `spread`
/// tells whether such a pair exists at all.
#[inline]
pub(crate) fn pick_swap<R: Rng + ?Sized>(shelf_of: &[usize], spread: bool, rng: &mut R) -> Option<(usize, usize)> {
    if !spread {
        return None;
    }
    let n = shelf_of.len();
    loop {
        let a = index(rng, n);
        let b = index(rng, n);
        if shelf_of[a] != shelf_of[b] {
            return Some((a.min(b), a.max(b)));
        }
    }
}

pub(crate) fn is_spread(shelf_of: &[usize]) -> bool {
    shelf_of.first().is_some_and(|&first| shelf_of.iter().any(|&m| m != first))
}

/// Result of a swap proposal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapOutcome {
    pub assignment: Assignment,
    /// `None` when no two pallets sit on different shelves; the assignment is
    /// then returned unchanged.
    pub swapped: Option<(usize, usize)>,
}

impl SwapOutcome {
    pub fn is_null(&self) -> bool {
        self.swapped.is_none()
    }
}

/// Exchanges the shelves of a uniformly chosen pair of pallets that sit on
/// different shelves.
pub fn neighbor_swap<R: Rng + ?Sized>(assignment: &Assignment, rng: &mut R) -> SwapOutcome {
    let mut out = assignment.clone();
    let swapped = pick_swap(&assignment.shelf_of, is_spread(&assignment.shelf_of), rng);
    if let Some((a, b)) = swapped {
        out.shelf_of.swap(a, b);
    }
    SwapOutcome {
        assignment: out,
        swapped,
    }
}
