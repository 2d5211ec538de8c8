//! Bookkeeping for the exterior basis `e_I`, `I` an increasing multi-index.
//!
//! Multi-indices are stored as bitmasks over `0..n`. Within each degree the
//! basis is ordered lexicographically on the sorted index lists, which is the
//! order used for the dense coefficient arrays of [`crate::DoubleForm`].

use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::MAX_DIM;

pub type Mask = u16;

#[derive(Debug)]
pub struct Basis {
    n: usize,
    by_degree: Vec<Vec<Mask>>,
    rank: Vec<u32>,
}

impl Basis {
    fn build(n: usize) -> Self {
        let mut by_degree = Vec::with_capacity(n + 1);
        let mut rank = vec![0u32; 1 << n];
        for p in 0..=n {
            let masks: Vec<Mask> = (0..n)
                .combinations(p)
                .map(|c| c.iter().fold(0, |m, &i| m | (1 << i)))
                .collect();
            for (r, &m) in masks.iter().enumerate() {
                rank[m as usize] = r as u32;
            }
            by_degree.push(masks);
        }
        Self { n, by_degree, rank }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Increasing multi-indices of degree `p`, in storage order.
    pub fn subsets(&self, p: usize) -> &[Mask] {
        &self.by_degree[p]
    }

    pub fn count(&self, p: usize) -> usize {
        self.by_degree[p].len()
    }

    #[inline]
    pub fn rank(&self, mask: Mask) -> usize {
        self.rank[mask as usize] as usize
    }

    pub fn full(&self) -> Mask {
        ((1u32 << self.n) - 1) as Mask
    }
}

/// Cached basis tables for dimension `n`.
pub fn basis(n: usize) -> &'static Basis {
    static TABLES: OnceLock<Vec<Basis>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| (0..=MAX_DIM).map(Basis::build).collect());
    &tables[n]
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok(())
}

/// Sign of the permutation sorting the concatenation `(A, B)` of two disjoint
/// increasing multi-indices.
#[inline]
pub fn merge_sign(a: Mask, b: Mask) -> f64 {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += ((a as u32) >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `e_m ∧ e_A = insert_sign(m, A) · e_{A ∪ {m}}` for `m ∉ A`.
#[inline]
pub fn insert_sign(m: usize, a: Mask) -> f64 {
    if (a & ((1 << m) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn indices(mask: Mask) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(j)
        }
    })
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order_and_ranks() {
        let b = basis(4);
        let twos: Vec<Vec<usize>> = b.subsets(2).iter().map(|&m| indices(m).collect()).collect();
        assert_eq!(
            twos,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        for p in 0..=4 {
            assert_eq!(b.count(p), binomial(4, p));
            for (r, &m) in b.subsets(p).iter().enumerate() {
                assert_eq!(b.rank(m), r);
            }
        }
    }

    #[test]
    fn merge_sign_counts_inversions() {
        assert_eq!(merge_sign(0b01, 0b10), 1.0);
        assert_eq!(merge_sign(0b10, 0b01), -1.0);
        // (2,3) then (0,1): four inversions
        assert_eq!(merge_sign(0b1100, 0b0011), 1.0);
        // (1) then (0,2): one inversion
        assert_eq!(merge_sign(0b010, 0b101), -1.0);
        assert_eq!(insert_sign(2, 0b011), 1.0);
        assert_eq!(insert_sign(1, 0b101), -1.0);
    }
}
