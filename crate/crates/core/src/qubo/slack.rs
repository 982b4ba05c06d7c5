//! Binary expansions of the slack that turns a shelf's capacity inequality
//! into an equality.

use alloc::vec::Vec;

/// How the per-shelf slack is expanded into bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlackMode {
    /// Powers of two followed by one remainder coefficient, so the
    /// representable sums are exactly `0..=R`.
    #[default]
    Bounded,
    /// Plain powers of two `1, 2, ..., 2^floor(log2 R)`. The largest sums
    /// exceed `R`.
    PureBinary,
}

/// Slack coefficients of one shelf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackEncoding {
    pub mode: SlackMode,
    pub coefficients: Vec<u64>,
}

impl SlackEncoding {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn max_sum(&self) -> u64 {
        self.coefficients.iter().sum()
    }

    /// Bits representing `value`, chosen greedily starting from the last
    /// coefficient. Exact for every `value <= capacity` in both modes. A
    /// value that cannot be represented falls back to the nearest smaller
    /// greedy sum.
    pub fn represent(&self, value: u64) -> Vec<bool> {
        let mut bits = alloc::vec![false; self.coefficients.len()];
        let mut rest = value;
        for (bit, &coef) in self.coefficients.iter().enumerate().rev() {
            if coef <= rest {
                bits[bit] = true;
                rest -= coef;
            }
        }
        bits
    }

    pub fn value(&self, bits: &[bool]) -> u64 {
        self.coefficients
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(c, _)| c)
            .sum()
    }
}

/// Slack coefficients for remaining capacity `capacity`.
///
/// Bounded mode with `k = floor(log2 R)` yields `1, 2, ..., 2^(k-1)` and a
/// final `R + 1 - 2^k`; pure binary yields `1, 2, ..., 2^k`. Both are empty
/// for `R = 0`.
pub fn slack_encoding(capacity: u64, mode: SlackMode) -> SlackEncoding {
    let coefficients = if capacity == 0 {
        Vec::new()
    } else {
        let k = 63 - capacity.leading_zeros();
        match mode {
            SlackMode::Bounded => {
                let mut c: Vec<u64> = (0..k).map(|l| 1u64 << l).collect();
                c.push(capacity + 1 - (1u64 << k));
                c
            }
            SlackMode::PureBinary => (0..=k).map(|l| 1u64 << l).collect(),
        }
    };
    SlackEncoding { mode, coefficients }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn reachable(coefs: &[u64]) -> BTreeSet<u64> {
        let mut sums = BTreeSet::new();
        for mask in 0u32..(1 << coefs.len()) {
            sums.insert(
                coefs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, c)| c)
                    .sum(),
            );
        }
        sums
    }

    #[test]
    fn examples() {
        assert_eq!(slack_encoding(5, SlackMode::Bounded).coefficients, vec![1, 2, 2]);
        assert_eq!(slack_encoding(3, SlackMode::Bounded).coefficients, vec![1, 2]);
        assert_eq!(slack_encoding(2, SlackMode::Bounded).coefficients, vec![1, 1]);
        assert_eq!(slack_encoding(1, SlackMode::Bounded).coefficients, vec![1]);
        assert!(slack_encoding(0, SlackMode::Bounded).is_empty());
        assert!(slack_encoding(0, SlackMode::PureBinary).is_empty());
        assert_eq!(slack_encoding(5, SlackMode::PureBinary).coefficients, vec![1, 2, 4]);
        assert_eq!(slack_encoding(8, SlackMode::PureBinary).coefficients, vec![1, 2, 4, 8]);
    }

    #[test]
    fn bounded_reaches_exactly_zero_to_capacity() {
        for r in 0..=300u64 {
            let enc = slack_encoding(r, SlackMode::Bounded);
            if enc.len() <= 12 {
                let expected: BTreeSet<u64> = (0..=r).collect();
                assert_eq!(reachable(&enc.coefficients), expected, "R = {r}");
            }
            assert_eq!(enc.max_sum(), r);
            for v in 0..=r {
                assert_eq!(enc.value(&enc.represent(v)), v, "R = {r}, v = {v}");
            }
        }
    }

    #[test]
    fn pure_binary_covers_capacity() {
        for r in 1..=300u64 {
            let enc = slack_encoding(r, SlackMode::PureBinary);
            assert!(enc.max_sum() >= r);
            for v in 0..=r {
                assert_eq!(enc.value(&enc.represent(v)), v);
            }
        }
    }
}
