//! Counting and subset enumeration helpers.

use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

pub(crate) fn checked_pow(base: u64, exp: u64) -> Option<u64> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

pub(crate) fn big_pow(base: u64, exp: u64) -> BigUint {
    let mut acc = BigUint::one();
    let b = BigUint::from(base);
    for _ in 0..exp {
        acc *= &b;
    }
    acc
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `binomial` clamped into a u64; `None` when it does not fit.
pub(crate) fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    binomial(n, k).to_u64()
}

/// Lexicographic enumeration of the `k`-subsets of `0..n`.
///
/// ```text
/// let mut c = Combinations::new(4, 2);
/// while c.advance() { use(c.current()) }
/// ```
pub(crate) struct Combinations {
    n: usize,
    current: Vec<usize>,
    started: bool,
    exhausted: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (0..k).collect(),
            started: false,
            exhausted: k > n,
        }
    }

    pub(crate) fn current(&self) -> &[usize] {
        &self.current
    }

    /// Moves to the next subset; returns `false` once all have been visited.
    pub(crate) fn advance(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        if !self.started {
            self.started = true;
            return true;
        }
        let k = self.current.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.n - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return true;
            }
        }
        self.exhausted = true;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count_matches_binomial() {
        for n in 0..8 {
            for k in 0..=n + 1 {
                let mut c = Combinations::new(n, k);
                let mut count = 0u64;
                let mut prev: Option<Vec<usize>> = None;
                while c.advance() {
                    let cur = c.current().to_vec();
                    if let Some(p) = &prev {
                        assert!(p < &cur);
                    }
                    prev = Some(cur);
                    count += 1;
                }
                assert_eq!(count, binomial_u64(n as u64, k as u64).unwrap(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial_u64(16, 2), Some(120));
        assert_eq!(binomial_u64(144, 6), Some(11_143_364_232));
        assert_eq!(binomial_u64(3, 5), Some(0));
    }
}
