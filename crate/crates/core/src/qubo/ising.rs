use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::QuboModel;
use crate::{Error, Result};

/// Spin model `offset + sum h_i s_i + sum_{i<j} J_ij s_i s_j` with
/// `s_i` in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub biases: Vec<f64>,
    pub couplings: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn num_vars(&self) -> usize {
        self.biases.len()
    }

    /// Energy of a spin configuration; positive entries are +1, the rest -1.
    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                what: "spin vector length",
                expected: self.num_vars(),
                actual: spins.len(),
            });
        }
        let s = |i: usize| if spins[i] > 0 { 1.0 } else { -1.0 };
        let mut energy = self.offset;
        for (i, h) in self.biases.iter().enumerate() {
            energy += h * s(i);
        }
        for (&(i, j), &v) in &self.couplings {
            energy += v * s(i) * s(j);
        }
        Ok(energy)
    }
}

/// Substitutes `x_i = (1 + s_i) / 2`.
pub fn to_ising(model: &QuboModel) -> IsingModel {
    let mut biases: Vec<f64> = model.linear().iter().map(|h| h / 2.0).collect();
    let mut offset = model.offset() + model.linear().iter().sum::<f64>() / 2.0;
    let mut couplings = BTreeMap::new();
    for (&(i, j), &v) in model.quadratic() {
        let quarter = v / 4.0;
        offset += quarter;
        biases[i] += quarter;
        biases[j] += quarter;
        couplings.insert((i, j), quarter);
    }
    IsingModel {
        biases,
        couplings,
        offset,
    }
}

/// Spin vector `2b - 1` of a bitstring.
pub fn spins_of(bits: &[bool]) -> Vec<i8> {
    bits.iter().map(|&b| if b { 1 } else { -1 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::t1;
    use crate::qubo::{build_qubo, default_weights, qubo_energy, SlackMode};
    use alloc::vec;
    use rand::Rng;

    #[test]
    fn single_variable() {
        let model = QuboModel::from_parts(1, vec![2.0], BTreeMap::new(), 0.0).unwrap();
        let ising = to_ising(&model);
        assert_eq!(ising.biases, vec![1.0]);
        assert_eq!(ising.offset, 1.0);
        assert!(ising.couplings.is_empty());
    }

    #[test]
    fn empty_model() {
        let model = QuboModel::from_parts(0, vec![], BTreeMap::new(), 0.0).unwrap();
        let ising = to_ising(&model);
        assert_eq!(ising.num_vars(), 0);
        assert_eq!(ising.offset, 0.0);
        assert_eq!(ising.energy(&[]).unwrap(), 0.0);
    }

    #[test]
    fn t1_energies_agree_on_random_bitstrings() {
        let t1 = t1();
        let model = build_qubo(&t1, default_weights(&t1), SlackMode::Bounded);
        let ising = to_ising(&model);
        let mut rng = crate::rng::seeded(11);
        for _ in 0..100 {
            let bits: Vec<bool> = (0..model.num_vars()).map(|_| rng.gen()).collect();
            let q = qubo_energy(&model, &bits).unwrap();
            let s = ising.energy(&spins_of(&bits)).unwrap();
            assert!((q - s).abs() <= 1e-9 * q.abs().max(1.0), "{q} vs {s}");
        }
    }
}
