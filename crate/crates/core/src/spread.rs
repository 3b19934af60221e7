//! Exact spreadness of explicit set families.
//!
//! A family (a list, repeats allowed) is `R`-spread when a uniformly random
//! member contains any fixed nonempty `Z` with probability at most
//! `R^-|Z|`. The best such `R` is the minimum over every `Z` contained in
//! some member of `(N / count(Z))^(1/|Z|)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;

use crate::{HatError, Result};

/// The minimizing set of a family and the resulting spread.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadValue {
    /// Family size `N`.
    pub members: u64,
    /// `Z` attaining the minimum.
    pub worst: Vec<u32>,
    /// Members containing `worst`.
    pub count: u64,
    /// `(N / count)^(1/|worst|)` in floating point.
    pub value: f64,
}

impl SpreadValue {
    /// Exactly decides `R* >= base^(1/root)`, i.e.
    /// `N^root >= count^root * base^|Z|` for the worst `Z`.
    pub fn at_least_root(&self, base: u64, root: u32) -> bool {
        let lhs = BigUint::from(self.members).pow(root);
        let rhs = BigUint::from(self.count).pow(root) * BigUint::from(base).pow(self.worst.len() as u32);
        lhs >= rhs
    }
}

/// Orders `(N/c1)^(1/z1)` against `(N/c2)^(1/z2)`.
fn compare(n: u64, c1: u64, z1: usize, c2: u64, z2: usize) -> Ordering {
    // (N/c1)^z2 vs (N/c2)^z1  <=>  N^z2 c2^z1 vs N^z1 c1^z2
    let n = BigUint::from(n);
    let lhs = n.pow(z2 as u32) * BigUint::from(c2).pow(z1 as u32);
    let rhs = n.pow(z1 as u32) * BigUint::from(c1).pow(z2 as u32);
    lhs.cmp(&rhs)
}

/// Computes the spread of `family` by counting every nonempty subset of
/// every member. Work is `N * 2^w`, capped by `budget`.
pub fn spread_value(family: &[Vec<u32>], budget: u64) -> Result<SpreadValue> {
    if family.is_empty() {
        return Err(HatError::invalid("spread of an empty family is undefined"));
    }
    let mut sorted = Vec::with_capacity(family.len());
    let mut work: u64 = 0;
    for (i, m) in family.iter().enumerate() {
        let mut m = m.clone();
        m.sort_unstable();
        if m.windows(2).any(|w| w[0] == w[1]) {
            return Err(HatError::invalid(format!("member {i} repeats an element")));
        }
        if m.is_empty() {
            return Err(HatError::invalid(format!("member {i} is empty")));
        }
        if m.len() >= 63 {
            return Err(HatError::budget("spread subsets", "2^63", budget));
        }
        work = work.saturating_add(1u64 << m.len());
        sorted.push(m);
    }
    if work > budget {
        return Err(HatError::budget("spread subsets", work, budget));
    }

    let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    let mut z = Vec::new();
    for m in &sorted {
        for mask in 1u64..1 << m.len() {
            z.clear();
            z.extend((0..m.len()).filter(|&b| mask >> b & 1 == 1).map(|b| m[b]));
            *counts.entry(z.clone()).or_insert(0) += 1;
        }
    }

    let n = family.len() as u64;
    let mut best: Option<(&Vec<u32>, u64)> = None;
    for (z, &c) in &counts {
        let better = match best {
            None => true,
            Some((bz, bc)) => compare(n, c, z.len(), bc, bz.len()) == Ordering::Less,
        };
        if better {
            best = Some((z, c));
        }
    }
    let (worst, count) = best.expect("nonempty members");
    Ok(SpreadValue {
        members: n,
        worst: worst.clone(),
        count,
        value: libm::pow(n as f64 / count as f64, 1.0 / worst.len() as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn singletons_spread_by_their_number() {
        let fam: Vec<Vec<u32>> = (0..7).map(|x| vec![x]).collect();
        let s = spread_value(&fam, 1000).unwrap();
        assert_eq!((s.members, s.count), (7, 1));
        assert!((s.value - 7.0).abs() < 1e-12);
    }

    #[test]
    fn single_member_has_spread_one() {
        let s = spread_value(&[vec![3, 1, 4]], 1000).unwrap();
        assert_eq!(s.value, 1.0);
        assert!(s.at_least_root(1, 1));
        assert!(!s.at_least_root(2, 5));
    }

    #[test]
    fn worst_set_may_be_larger_than_one() {
        // every pair of {0,1,2} plus three copies of {0,1}: Z={0,1} gives
        // (6/4)^(1/2) ~ 1.22 while Z={0} gives 6/5 = 1.2
        let fam = vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1], vec![0, 1], vec![0, 1]];
        let s = spread_value(&fam, 1000).unwrap();
        assert_eq!(s.worst.len(), 1);
        assert!((s.value - 1.2).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_members() {
        assert!(spread_value(&[], 10).is_err());
        assert!(spread_value(&[vec![1, 1]], 10).is_err());
        assert!(spread_value(&[vec![1, 2, 3]], 3).is_err());
    }
}
