use std::fmt;
use std::sync::Arc;

use crate::lattice::{FSet, Lattice};

use super::propagator::Propagator;

/// Identifier of a finite-domain variable.
pub type FdVar = u32;

/// Variable store: a partial map from fd variables to their domains,
/// ordered pointwise by superset inclusion.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VStore {
    domains: Vec<Option<FSet>>,
}

impl VStore {
    pub fn new() -> VStore {
        VStore::default()
    }

    pub fn from_domains(domains: impl IntoIterator<Item = FSet>) -> VStore {
        VStore { domains: domains.into_iter().map(Some).collect() }
    }

    /// The fragment `{x -> d}`.
    pub fn single(x: FdVar, d: FSet) -> VStore {
        let mut s = VStore::new();
        s.define(x, d);
        s
    }

    pub fn get(&self, x: FdVar) -> Option<&FSet> {
        self.domains.get(x as usize).and_then(|d| d.as_ref())
    }

    pub fn get_mut(&mut self, x: FdVar) -> Option<&mut FSet> {
        self.domains.get_mut(x as usize).and_then(|d| d.as_mut())
    }

    /// Joins `d` into the domain of `x`; returns whether it changed.
    pub fn define(&mut self, x: FdVar, d: FSet) -> bool {
        let i = x as usize;
        if self.domains.len() <= i {
            self.domains.resize(i + 1, None);
        }
        match &mut self.domains[i] {
            Some(old) => old.intersect_with(&d),
            slot @ None => {
                *slot = Some(d);
                true
            }
        }
    }

    /// Upper bound (exclusive) on the defined ids.
    pub fn capacity(&self) -> usize {
        self.domains.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FdVar, &FSet)> {
        self.domains.iter().enumerate().filter_map(|(i, d)| d.as_ref().map(|d| (i as FdVar, d)))
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_failed(&self) -> bool {
        self.iter().any(|(_, d)| d.is_empty())
    }

    pub fn all_singleton(&self) -> bool {
        self.iter().all(|(_, d)| d.is_singleton())
    }

    /// In-place join; returns whether `self` changed.
    pub fn join_assign(&mut self, other: &VStore) -> bool {
        let mut changed = false;
        for (x, d) in other.iter() {
            changed |= self.define(x, d.clone());
        }
        changed
    }
}

impl Lattice for VStore {
    fn join(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.join_assign(other);
        out
    }

    fn leq(&self, other: &Self) -> bool {
        self.iter().all(|(x, d)| other.get(x).is_some_and(|e| e.is_subset(d)))
    }
}

impl fmt::Display for VStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (x, d)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "x{x}:{d}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for VStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Constraint store: a set of propagators ordered by inclusion.
/// Kept sorted and deduplicated so that equal sets compare equal.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CStore {
    props: Arc<Vec<Propagator>>,
}

impl CStore {
    pub fn new() -> CStore {
        CStore::default()
    }

    pub fn from_props(props: impl IntoIterator<Item = Propagator>) -> CStore {
        let mut v: Vec<Propagator> = props.into_iter().collect();
        v.sort();
        v.dedup();
        CStore { props: Arc::new(v) }
    }

    pub fn props(&self) -> &[Propagator] {
        &self.props
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn contains(&self, p: &Propagator) -> bool {
        self.props.binary_search(p).is_ok()
    }

    /// Adds `p`; returns whether it was new.
    pub fn insert(&mut self, p: Propagator) -> bool {
        match self.props.binary_search(&p) {
            Ok(_) => false,
            Err(i) => {
                Arc::make_mut(&mut self.props).insert(i, p);
                true
            }
        }
    }

    pub fn join_assign(&mut self, other: &CStore) -> bool {
        if Arc::ptr_eq(&self.props, &other.props) || other.props.iter().all(|p| self.contains(p)) {
            return false;
        }
        if self.props.is_empty() {
            self.props = other.props.clone();
            return true;
        }
        let mut merged = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.props, &other.props);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                merged.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                merged.push(b[j]);
                j += 1;
            } else {
                merged.push(a[i]);
                i += 1;
                j += 1;
            }
        }
        self.props = Arc::new(merged);
        true
    }
}

/// `cs` with `p` added: the join of `cs` and `{p}`.
pub fn post(cs: &CStore, p: Propagator) -> CStore {
    let mut out = cs.clone();
    out.insert(p);
    out
}

impl Lattice for CStore {
    fn join(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.join_assign(other);
        out
    }

    fn leq(&self, other: &Self) -> bool {
        self.props.iter().all(|p| other.contains(p))
    }
}

impl fmt::Display for CStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.props.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for CStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
