use std::fmt;

use crate::basis::{indices, Mask};
use crate::error::{Error, Result};

/// Strictly increasing list of basis indices, stored 0-based.
///
/// Displayed 1-based, matching the usual `e_1, …, e_n` labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    mask: Mask,
}

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex { mask: 0 };

    /// Builds from 0-based entries; they must be strictly increasing and `< n`.
    pub fn new(entries: &[usize], n: usize) -> Result<Self> {
        let ok = entries.windows(2).all(|w| w[0] < w[1]) && entries.iter().all(|&i| i < n);
        if !ok {
            return Err(Error::InvalidMultiIndex {
                entries: entries.to_vec(),
                n,
            });
        }
        Ok(Self {
            mask: entries.iter().fold(0, |m, &i| m | (1 << i)),
        })
    }

    /// Builds from 1-based entries.
    pub fn one_based(entries: &[usize], n: usize) -> Result<Self> {
        if entries.contains(&0) {
            return Err(Error::InvalidMultiIndex {
                entries: entries.to_vec(),
                n,
            });
        }
        let zero: Vec<usize> = entries.iter().map(|i| i - 1).collect();
        Self::new(&zero, n)
    }

    pub fn from_mask(mask: Mask) -> Self {
        Self { mask }
    }

    pub fn mask(self) -> Mask {
        self.mask
    }

    pub fn degree(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn entries(self) -> Vec<usize> {
        indices(self.mask).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mask == 0 {
            return write!(f, "-");
        }
        let parts: Vec<String> = indices(self.mask).map(|i| (i + 1).to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Sorts an arbitrary index tuple, returning the permutation sign and the
/// multi-index, or `None` when an index repeats (the wedge vanishes).
pub fn sort_tuple(tuple: &[usize]) -> Option<(f64, MultiIndex)> {
    let mut v = tuple.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let mask = v.iter().fold(0, |m, &i| m | (1 << i));
    Some((sign, MultiIndex { mask }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(MultiIndex::new(&[0, 2, 3], 4).is_ok());
        assert!(MultiIndex::new(&[2, 1], 4).is_err());
        assert!(MultiIndex::new(&[1, 1], 4).is_err());
        assert!(MultiIndex::new(&[4], 4).is_err());
        assert!(MultiIndex::one_based(&[0], 4).is_err());
        let i = MultiIndex::one_based(&[1, 3], 4).unwrap();
        assert_eq!(i.entries(), vec![0, 2]);
        assert_eq!(i.to_string(), "1,3");
        assert_eq!(MultiIndex::EMPTY.degree(), 0);
    }

    #[test]
    fn sorting_signs() {
        let (s, i) = sort_tuple(&[2, 0, 1]).unwrap();
        assert_eq!(s, 1.0);
        assert_eq!(i.entries(), vec![0, 1, 2]);
        let (s, _) = sort_tuple(&[1, 0]).unwrap();
        assert_eq!(s, -1.0);
        assert!(sort_tuple(&[1, 2, 1]).is_none());
    }
}
