//! Seeded synthetic instances for square warehouses.
//!
//! An `M x M` warehouse has `M` shelves with `capacity` positions each. A
//! fixed share of every shelf is pre-filled (the same count on every shelf),
//! and `N` unit-cost pallets are inserted as a share of the total capacity.
//! Counts round half up.
//!
//! Random draws come from [`crate::rng::SeededRng`] in this order: the lower
//! triangle of the new-pallet matching matrix row by row (`lambda[a][b]` for
//! `a = 1..N`, `b = 0..a`), then for each shelf, each pre-filled pallet, each
//! new pallet, the pre-allocated affinity.

use alloc::format;
use alloc::vec::Vec;

use crate::model::{Instance, MatchingMatrix, Pallet, Shelf};
use crate::rng::{seeded, unit};
use crate::{Error, Result};

/// Distribution of synthetic matching parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaDistribution {
    /// Independent uniform draws on [0, 1).
    #[default]
    Uniform01,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub shelves: usize,
    /// Positions per shelf before pre-filling.
    pub capacity: u64,
    pub prefill_fraction: f64,
    pub insert_fraction: f64,
    pub lambda_distribution: LambdaDistribution,
    pub seed: u64,
}

impl GeneratorSpec {
    /// `M x M` warehouse: `shelves` shelves of `shelves` positions.
    pub fn square(shelves: usize, prefill_fraction: f64, insert_fraction: f64, seed: u64) -> Self {
        GeneratorSpec {
            shelves,
            capacity: shelves as u64,
            prefill_fraction,
            insert_fraction,
            lambda_distribution: LambdaDistribution::Uniform01,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.prefill_fraction) {
            return Err(Error::InvalidArgument(format!(
                "prefill fraction must lie in [0, 1), got {}",
                self.prefill_fraction
            )));
        }
        if !(self.insert_fraction > 0.0 && self.insert_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "insert fraction must lie in (0, 1], got {}",
                self.insert_fraction
            )));
        }
        if self.prefill_fraction + self.insert_fraction > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "prefill {} plus insert {} exceeds the warehouse capacity",
                self.prefill_fraction, self.insert_fraction
            )));
        }
        if self.shelves == 0 || self.capacity == 0 {
            return Err(Error::InvalidArgument("warehouse needs at least one shelf position".into()));
        }
        let (prefill, items) = (self.prefill_per_shelf(), self.items());
        let free = (self.capacity - prefill) * self.shelves as u64;
        if items > free {
            return Err(Error::InvalidArgument(format!(
                "{items} pallets do not fit in {free} free positions after rounding"
            )));
        }
        Ok(())
    }

    /// Pre-filled positions on every shelf.
    pub fn prefill_per_shelf(&self) -> u64 {
        round_half_up(self.prefill_fraction * self.capacity as f64).min(self.capacity)
    }

    /// Number of pallets to insert.
    pub fn items(&self) -> u64 {
        round_half_up(self.insert_fraction * (self.shelves as u64 * self.capacity) as f64)
    }
}

/// Rounds half up after snapping away binary representation noise, so that
/// `0.1 * 625` gives 63 and `0.2 * 20` gives 4.
pub fn round_half_up(x: f64) -> u64 {
    let snapped = libm::round(x * 1e9) / 1e9;
    libm::floor(snapped + 0.5) as u64
}

pub fn generate_square(spec: &GeneratorSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = seeded(spec.seed);
    let n = spec.items() as usize;
    let prefill = spec.prefill_per_shelf() as usize;
    let draw = |rng: &mut crate::rng::SeededRng| match spec.lambda_distribution {
        LambdaDistribution::Uniform01 => unit(rng),
    };

    let lower: Vec<Vec<f64>> = (0..n).map(|a| (0..a).map(|_| draw(&mut rng)).collect()).collect();
    let matching = MatchingMatrix::from_lower_triangle(&lower)?;
    let shelves = (0..spec.shelves)
        .map(|_| Shelf {
            remaining_capacity: spec.capacity - prefill as u64,
            pre_affinity: (0..prefill).map(|_| (0..n).map(|_| draw(&mut rng)).collect()).collect(),
        })
        .collect();
    Instance::new(shelves, alloc::vec![Pallet::unit(); n], matching)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_by_twenty_protocol_counts() {
        let spec = GeneratorSpec::square(20, 0.20, 0.10, 1);
        assert_eq!(spec.prefill_per_shelf(), 4);
        assert_eq!(spec.items(), 40);
        let inst = generate_square(&spec).unwrap();
        assert_eq!(inst.num_pallets(), 40);
        assert!(inst.shelves().iter().all(|s| s.preallocated() == 4 && s.remaining_capacity == 16));
    }

    #[test]
    fn twenty_five_square_item_counts() {
        let counts: Vec<u64> = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
            .iter()
            .map(|&f| GeneratorSpec::square(25, 0.2, f, 0).items())
            .collect();
        assert_eq!(counts, [63, 125, 188, 250, 313, 375]);
        let tens: Vec<u64> = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
            .iter()
            .map(|&f| GeneratorSpec::square(10, 0.2, f, 0).items())
            .collect();
        assert_eq!(tens, [10, 20, 30, 40, 50, 60]);
        assert_eq!(GeneratorSpec::square(25, 0.2, 0.1, 0).prefill_per_shelf(), 5);
    }

    #[test]
    fn same_seed_same_instance() {
        let spec = GeneratorSpec::square(6, 0.2, 0.3, 77);
        assert_eq!(generate_square(&spec).unwrap(), generate_square(&spec).unwrap());
        let other = GeneratorSpec { seed: 78, ..spec.clone() };
        assert_ne!(generate_square(&spec).unwrap(), generate_square(&other).unwrap());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate_square(&GeneratorSpec::square(10, 0.5, 0.6, 0)).is_err());
        assert!(generate_square(&GeneratorSpec::square(10, 1.0, 0.1, 0)).is_err());
        assert!(generate_square(&GeneratorSpec::square(10, 0.2, 0.0, 0)).is_err());
        assert!(generate_square(&GeneratorSpec::square(0, 0.2, 0.1, 0)).is_err());
        assert!(generate_square(&GeneratorSpec::square(10, 0.2, 0.8, 0)).is_ok());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_up(62.5), 63);
        assert_eq!(round_half_up(0.1 * 625.0), 63);
        assert_eq!(round_half_up(0.2 * 20.0), 4);
        assert_eq!(round_half_up(2.4999), 2);
    }
}
