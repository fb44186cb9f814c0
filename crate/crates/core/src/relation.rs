//! Finite partitions and binary relations over `0..n`.

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// A set of states, indexed `0..n`.
pub type StateSet = FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("state {0} is out of range")]
    OutOfRange(usize),
    #[error("state {0} appears in more than one block")]
    Overlap(usize),
    #[error("state {0} is not covered by any block")]
    Uncovered(usize),
    #[error("empty block")]
    EmptyBlock,
}

/// An equivalence relation stored as its blocks.
///
/// Blocks are kept sorted, and ordered by their smallest member, so two
/// partitions with the same blocks compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition, PartitionError> {
        let mut label = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            for &s in block {
                if s >= n {
                    return Err(PartitionError::OutOfRange(s));
                }
                if label[s] != usize::MAX {
                    return Err(PartitionError::Overlap(s));
                }
                label[s] = b;
            }
        }
        if let Some(s) = label.iter().position(|&l| l == usize::MAX) {
            return Err(PartitionError::Uncovered(s));
        }
        Ok(Partition::from_labels(&label))
    }

    /// Builds the partition whose blocks are the states sharing a label.
    pub fn from_labels<L: Eq + Clone + std::hash::Hash>(labels: &[L]) -> Partition {
        let mut seen: std::collections::HashMap<L, usize> = std::collections::HashMap::new();
        let mut block_of = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (s, l) in labels.iter().enumerate() {
            let b = *seen.entry(l.clone()).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(s);
            block_of.push(b);
        }
        Partition { block_of, blocks }
    }

    pub fn discrete(n: usize) -> Partition {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn trivial(n: usize) -> Partition {
        Partition::from_labels(&vec![0u8; n])
    }

    pub fn states(&self) -> usize {
        self.block_of.len()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, s: usize) -> usize {
        self.block_of[s]
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    /// The block containing `s`.
    pub fn class(&self, s: usize) -> &[usize] {
        &self.blocks[self.block_of[s]]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    /// True when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&s| coarser.same(b[0], s)))
    }

    /// Common refinement.
    pub fn meet(&self, other: &Partition) -> Partition {
        let labels: Vec<(usize, usize)> = (0..self.states())
            .map(|s| (self.block_of[s], other.block_of[s]))
            .collect();
        Partition::from_labels(&labels)
    }

    pub fn to_relation(&self) -> Relation {
        let mut r = Relation::empty(self.states());
        for block in &self.blocks {
            for &a in block {
                for &b in block {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    pub fn class_set(&self, s: usize) -> StateSet {
        let mut set = StateSet::with_capacity(self.states());
        for &t in self.class(s) {
            set.insert(t);
        }
        set
    }
}

/// A binary relation stored as successor rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<StateSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Relation {
        Relation {
            rows: vec![StateSet::with_capacity(n); n],
        }
    }

    pub fn identity(n: usize) -> Relation {
        let mut r = Relation::empty(n);
        for s in 0..n {
            r.insert(s, s);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Relation, PartitionError> {
        let mut r = Relation::empty(n);
        for &(a, b) in pairs {
            if a >= n {
                return Err(PartitionError::OutOfRange(a));
            }
            if b >= n {
                return Err(PartitionError::OutOfRange(b));
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a].insert(b);
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn successors(&self, a: usize) -> &StateSet {
        &self.rows[a]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.ones().map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    pub fn is_serial(&self) -> bool {
        self.rows.iter().all(|r| !r.is_clear())
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows
            .iter()
            .zip(&other.rows)
            .all(|(a, b)| a.is_subset(b))
    }

    /// `self ; other`: `a` reaches `c` when `a self b` and `b other c` for some `b`.
    pub fn then(&self, other: &Relation) -> Relation {
        let mut out = Relation::empty(self.states());
        for (a, row) in self.rows.iter().enumerate() {
            for b in row.ones() {
                out.rows[a].union_with(&other.rows[b]);
            }
        }
        out
    }

    pub fn converse(&self) -> Relation {
        let mut out = Relation::empty(self.states());
        for (a, b) in self.pairs() {
            out.insert(b, a);
        }
        out
    }

    pub fn transitive_closure(&self) -> Relation {
        let n = self.states();
        let mut rows = self.rows.clone();
        // Warshall.
        for k in 0..n {
            let via = rows[k].clone();
            for row in rows.iter_mut() {
                if row.contains(k) {
                    row.union_with(&via);
                }
            }
        }
        Relation { rows }
    }

    pub fn is_equivalence(&self) -> bool {
        let n = self.states();
        (0..n).all(|a| self.contains(a, a))
            && self.pairs().all(|(a, b)| self.contains(b, a))
            && self.then(self).is_subset(self)
    }

    /// The blocks of an equivalence relation.
    pub fn to_partition(&self) -> Option<Partition> {
        if !self.is_equivalence() {
            return None;
        }
        let labels: Vec<Vec<usize>> = self.rows.iter().map(|r| r.ones().collect()).collect();
        Some(Partition::from_labels(&labels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn malformed_blocks_are_rejected() {
        assert_eq!(
            Partition::from_blocks(3, &[vec![0, 1], vec![1, 2]]),
            Err(PartitionError::Overlap(1))
        );
        assert_eq!(
            Partition::from_blocks(3, &[vec![0, 1]]),
            Err(PartitionError::Uncovered(2))
        );
        assert_eq!(
            Partition::from_blocks(2, &[vec![0, 1], vec![]]),
            Err(PartitionError::EmptyBlock)
        );
        assert_eq!(
            Partition::from_blocks(2, &[vec![0, 5]]),
            Err(PartitionError::OutOfRange(5))
        );
    }

    #[test]
    fn partitions_are_canonical() {
        let a = Partition::from_blocks(4, &[vec![3, 1], vec![2, 0]]).unwrap();
        let b = Partition::from_blocks(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.blocks(), &[vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn meet_and_refinement() {
        let rows = Partition::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let cols = Partition::from_blocks(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        let m = rows.meet(&cols);
        assert_eq!(m, Partition::discrete(4));
        assert!(m.refines(&rows) && m.refines(&cols));
        assert!(!rows.refines(&cols));
        assert!(rows.refines(&Partition::trivial(4)));
    }

    #[test]
    fn composition_and_closure() {
        let r = Relation::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let rr = r.then(&r);
        assert_eq!(rr.pairs().collect::<Vec<_>>(), vec![(0, 2)]);
        let tc = r.transitive_closure();
        assert_eq!(tc.pairs().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(!r.is_serial());
        let p = Partition::from_blocks(3, &[vec![0, 2], vec![1]]).unwrap();
        assert_eq!(p.to_relation().to_partition(), Some(p));
    }
}
