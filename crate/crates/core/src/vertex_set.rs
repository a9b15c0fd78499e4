use std::fmt;

use fixedbitset::FixedBitSet;

use crate::space::VertexId;

/// A subset of the vertices `0..n` of a space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    bits: FixedBitSet,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        VertexSet { bits }
    }

    pub fn from_vertices<I: IntoIterator<Item = VertexId>>(n: usize, vertices: I) -> Self {
        let mut s = VertexSet::empty(n);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    pub fn from_predicate<F: FnMut(VertexId) -> bool>(n: usize, mut f: F) -> Self {
        VertexSet::from_vertices(n, (0..n).filter(|&v| f(v)))
    }

    /// Subset of `universe` selected by the bits of `mask` (bit `i` picks the
    /// `i`-th element of `universe`).
    pub fn from_mask(n: usize, universe: &[VertexId], mask: u64) -> Self {
        VertexSet::from_vertices(
            n,
            universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v),
        )
    }

    /// Size of the ambient vertex range.
    pub fn universe_len(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.bits.contains(v)
    }

    pub fn insert(&mut self, v: VertexId) {
        self.bits.insert(v);
    }

    pub fn remove(&mut self, v: VertexId) {
        self.bits.set(v, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.bits.ones()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        VertexSet { bits }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        VertexSet { bits }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        VertexSet { bits }
    }

    pub fn symmetric_difference(&self, other: &VertexSet) -> VertexSet {
        let mut bits = self.bits.clone();
        bits.symmetric_difference_with(&other.bits);
        VertexSet { bits }
    }

    pub fn complement(&self) -> VertexSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        VertexSet { bits }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = VertexSet::from_vertices(6, [0, 1, 2]);
        let b = VertexSet::from_vertices(6, [2, 3]);
        assert_eq!(a.union(&b).to_vec(), vec![0, 1, 2, 3]);
        assert_eq!(a.intersection(&b).to_vec(), vec![2]);
        assert_eq!(a.difference(&b).to_vec(), vec![0, 1]);
        assert_eq!(a.symmetric_difference(&b).to_vec(), vec![0, 1, 3]);
        assert_eq!(a.complement().to_vec(), vec![3, 4, 5]);
        assert!(VertexSet::from_vertices(6, [1]).is_subset(&a));
        assert_eq!(VertexSet::full(6).len(), 6);
    }

    #[test]
    fn mask_selects_universe_members() {
        let s = VertexSet::from_mask(10, &[3, 5, 7], 0b101);
        assert_eq!(s.to_vec(), vec![3, 7]);
    }
}
