//! Canonical sorted sets of 1-based user / base-station indices.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A sorted, deduplicated set of indices.
///
/// Equality is structural, so two sets built from the same members in a
/// different order compare equal and serialize identically.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Inclusive range `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        if lo > hi {
            Self::new()
        } else {
            Self((lo..=hi).collect())
        }
    }

    /// Inclusive range over signed bounds, clipped to `[1, k]`.
    pub fn clipped_range(lo: i64, hi: i64, k: usize) -> Self {
        let lo = lo.max(1);
        let hi = hi.min(k as i64);
        if lo > hi {
            Self::new()
        } else {
            Self::range(lo as usize, hi as usize)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Self(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn insert(&mut self, i: usize) -> bool {
        match self.0.binary_search(&i) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, i);
                true
            }
        }
    }

    pub fn remove(&mut self, i: usize) -> bool {
        match self.0.binary_search(&i) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.iter().filter(|&i| other.contains(i)).collect()
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.iter().filter(|&i| !other.contains(i)).collect()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.iter().any(|i| other.contains(i))
    }

    /// Keep only members satisfying `keep`.
    pub fn retain(&mut self, keep: impl FnMut(&usize) -> bool) {
        self.0.retain(keep);
    }

    /// Bitmask with bit `i - 1` set for each member. Panics if a member exceeds 64.
    pub fn to_mask(&self) -> u64 {
        self.iter().fold(0u64, |m, i| {
            assert!((1..=64).contains(&i), "index {i} does not fit a 64-bit mask");
            m | (1u64 << (i - 1))
        })
    }

    pub fn from_mask(mask: u64) -> Self {
        Self((0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect())
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl From<Vec<usize>> for IndexSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl<const N: usize> From<[usize; N]> for IndexSet {
    fn from(a: [usize; N]) -> Self {
        a.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_is_canonical() {
        let a: IndexSet = vec![3, 1, 2, 3].into();
        assert_eq!(a, IndexSet::range(1, 3));
        assert_eq!(a.to_string(), "{1,2,3}");
    }

    #[test]
    fn set_algebra() {
        let a = IndexSet::from([1, 2, 5]);
        let b = IndexSet::from([2, 3]);
        assert_eq!(a.union(&b), IndexSet::from([1, 2, 3, 5]));
        assert_eq!(a.intersection(&b), IndexSet::from([2]));
        assert_eq!(a.difference(&b), IndexSet::from([1, 5]));
        assert!(IndexSet::from([2]).is_subset(&a));
        assert!(IndexSet::range(4, 2).is_empty());
    }

    #[test]
    fn clipped_range_truncates() {
        assert_eq!(IndexSet::clipped_range(-2, 2, 10), IndexSet::from([1, 2]));
        assert_eq!(IndexSet::clipped_range(9, 14, 10), IndexSet::from([9, 10]));
        assert!(IndexSet::clipped_range(11, 14, 10).is_empty());
    }

    #[test]
    fn mask_round_trip() {
        let a = IndexSet::from([1, 4, 64]);
        assert_eq!(IndexSet::from_mask(a.to_mask()), a);
    }
}
