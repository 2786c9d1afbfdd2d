//! Branch sequences and their three composition operators.
//!
//! A branch is either a child space or pruned. Sequential composition
//! concatenates, the two parallel compositions combine sequences pointwise
//! after padding the shorter one with its last branch. They differ only on
//! `prune`: absorbed by `or`, absorbing for `and`.

use std::fmt;

use crate::lattice::{Lattice, Store};

/// Labels of child spaces: anything that can be joined.
pub trait BranchLabel: Clone {
    fn merge(&self, other: &Self) -> Self;
}

impl<L: Lattice> BranchLabel for L {
    fn merge(&self, other: &Self) -> Self {
        self.join(other)
    }
}

impl BranchLabel for Store {
    fn merge(&self, other: &Self) -> Self {
        self.try_join(other).expect("world_line snapshots bind each location at one type")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Branch<W> {
    Space(W),
    Pruned,
}

impl<W: BranchLabel> Branch<W> {
    pub fn or(&self, other: &Self) -> Self {
        match (self, other) {
            (b, Branch::Pruned) | (Branch::Pruned, b) => b.clone(),
            (Branch::Space(a), Branch::Space(b)) => Branch::Space(a.merge(b)),
        }
    }

    pub fn and(&self, other: &Self) -> Self {
        match (self, other) {
            (_, Branch::Pruned) | (Branch::Pruned, _) => Branch::Pruned,
            (Branch::Space(a), Branch::Space(b)) => Branch::Space(a.merge(b)),
        }
    }
}

impl<W: fmt::Display> fmt::Display for Branch<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Space(w) => write!(f, "space {w}"),
            Branch::Pruned => f.write_str("prune"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BranchSeq<W> {
    pub items: Vec<Branch<W>>,
}

impl<W> Default for BranchSeq<W> {
    fn default() -> Self {
        BranchSeq { items: Vec::new() }
    }
}

impl<W> FromIterator<Branch<W>> for BranchSeq<W> {
    fn from_iter<I: IntoIterator<Item = Branch<W>>>(iter: I) -> Self {
        BranchSeq { items: iter.into_iter().collect() }
    }
}

impl<W: BranchLabel> BranchSeq<W> {
    pub fn empty() -> Self {
        BranchSeq { items: Vec::new() }
    }

    pub fn one(b: Branch<W>) -> Self {
        BranchSeq { items: vec![b] }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn pruned_count(&self) -> usize {
        self.items.iter().filter(|b| matches!(b, Branch::Pruned)).count()
    }

    fn pointwise(&self, other: &Self, f: impl Fn(&Branch<W>, &Branch<W>) -> Branch<W>) -> Self {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let n = self.len().max(other.len());
        let at = |s: &Self, i: usize| s.items[i.min(s.len() - 1)].clone();
        (0..n).map(|i| f(&at(self, i), &at(other, i))).collect()
    }

    /// Sequential composition.
    pub fn concat(mut self, other: Self) -> Self {
        self.items.extend(other.items);
        self
    }

    /// Disjunctive parallel composition.
    pub fn or(&self, other: &Self) -> Self {
        self.pointwise(other, Branch::or)
    }

    /// Conjunctive parallel composition.
    pub fn and(&self, other: &Self) -> Self {
        self.pointwise(other, Branch::and)
    }
}

impl<W: fmt::Display> fmt::Display for BranchSeq<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, b) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(">")
    }
}

pub fn seq_concat<W: BranchLabel>(a: &BranchSeq<W>, b: &BranchSeq<W>) -> BranchSeq<W> {
    a.clone().concat(b.clone())
}

pub fn par_or<W: BranchLabel>(a: &BranchSeq<W>, b: &BranchSeq<W>) -> BranchSeq<W> {
    a.or(b)
}

pub fn par_and<W: BranchLabel>(a: &BranchSeq<W>, b: &BranchSeq<W>) -> BranchSeq<W> {
    a.and(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeValue, Location};

    fn w(v: i64) -> Branch<Store> {
        Branch::Space([(Location(0), LatticeValue::LMax(v))].into_iter().collect())
    }

    fn seq(items: Vec<Branch<Store>>) -> BranchSeq<Store> {
        BranchSeq { items }
    }

    #[test]
    fn concat_examples() {
        assert_eq!(seq_concat(&seq(vec![w(1)]), &seq(vec![w(2)])), seq(vec![w(1), w(2)]));
        assert_eq!(seq_concat(&seq(vec![]), &seq(vec![w(1)])), seq(vec![w(1)]));
        assert_eq!(
            seq_concat(&seq(vec![w(1), Branch::Pruned]), &seq(vec![w(2)])),
            seq(vec![w(1), Branch::Pruned, w(2)])
        );
    }

    #[test]
    fn or_examples() {
        assert_eq!(par_or(&seq(vec![w(1)]), &seq(vec![Branch::Pruned])), seq(vec![w(1)]));
        assert_eq!(par_or(&seq(vec![w(1)]), &seq(vec![w(3)])), seq(vec![w(3)]));
        let b = seq(vec![w(1), w(2), w(3)]);
        assert_eq!(par_or(&b, &seq(vec![w(2)])), seq(vec![w(2), w(2), w(3)]));
    }

    #[test]
    fn and_examples() {
        assert_eq!(par_and(&seq(vec![w(1)]), &seq(vec![Branch::Pruned])), seq(vec![Branch::Pruned]));
        assert_eq!(par_and(&seq(vec![w(1)]), &seq(vec![w(3)])), seq(vec![w(3)]));
        let p = seq(vec![w(1), w(2), w(3)]);
        let first_only = seq(vec![Branch::Space(Store::new()), Branch::Pruned]);
        assert_eq!(par_and(&p, &first_only), seq(vec![w(1), Branch::Pruned, Branch::Pruned]));
    }
}
