//! Built-in lattices.
//!
//! Every spacetime variable holds a [`LatticeValue`]. Writes are joins and
//! conditions are entailment tests, so all information flow in a program is
//! monotone with respect to the orders defined here:
//!
//! | type     | order                         | join          | bottom            |
//! |----------|-------------------------------|---------------|-------------------|
//! | `LMax`   | natural `<=` on integers      | `max`         | `-inf` sentinel   |
//! | `LMin`   | reversed `>=`                 | `min`         | `+inf` sentinel   |
//! | `ES`     | `unknown <= true <= false`    | max           | `unknown`         |
//! | `FSet`   | superset inclusion            | intersection  | configured universe |
//! | `Store`  | pointwise, over bound keys    | pointwise     | empty map         |
//! | `VStore` | pointwise superset on domains | intersection  | empty store       |
//! | `CStore` | set inclusion                 | union         | empty set         |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ast::SpacetimeAnnotation;
use crate::solver::{CStore, VStore};

/// Largest value representable in an [`FSet`]. Larger elements are dropped.
pub const FSET_VALUE_LIMIT: i64 = 1 << 16;

/// Bottom sentinel of `LMax`.
pub const NEG_INF: i64 = i64::MIN;
/// Bottom sentinel of `LMin`.
pub const POS_INF: i64 = i64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("cannot combine a {0} value with a {1} value")]
    Mismatch(LatticeType, LatticeType),
    #[error("unknown lattice type `{0}`")]
    UnknownType(String),
}

/// Result of an entailment test `a |= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntailResult {
    True,
    False,
    Unknown,
}

/// Three-valued status lattice, ordered `unknown <= true <= false`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Es {
    Unknown,
    True,
    False,
}

impl fmt::Display for Es {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Es::Unknown => "unknown",
            Es::True => "true",
            Es::False => "false",
        })
    }
}

/// Tag naming one of the built-in lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeType {
    LMax,
    LMin,
    Es,
    FSet,
    Store,
    VStore,
    CStore,
}

impl LatticeType {
    pub const ALL: [LatticeType; 7] = [
        LatticeType::LMax,
        LatticeType::LMin,
        LatticeType::Es,
        LatticeType::FSet,
        LatticeType::Store,
        LatticeType::VStore,
        LatticeType::CStore,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LatticeType::LMax => "LMax",
            LatticeType::LMin => "LMin",
            LatticeType::Es => "ES",
            LatticeType::FSet => "FSet",
            LatticeType::Store => "Store",
            LatticeType::VStore => "VStore",
            LatticeType::CStore => "CStore",
        }
    }
}

impl fmt::Display for LatticeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeType {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LatticeType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| LatticeError::UnknownType(s.to_string()))
    }
}

/// Per-program lattice configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeConfig {
    /// `FSet` bottom is `{0, .., fset_universe - 1}`.
    pub fset_universe: u32,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig { fset_universe: 64 }
    }
}

/// Location of a variable in a space. Disjoint from source names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location(pub u32);

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

/// Finite set of small non-negative integers, ordered by superset inclusion.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FSet {
    // canonical: never ends with a zero word
    words: Vec<u64>,
}

impl FSet {
    pub fn empty() -> FSet {
        FSet { words: Vec::new() }
    }

    /// `{lo, .., hi}`, clamped to the representable range.
    pub fn range(lo: i64, hi: i64) -> FSet {
        let lo = lo.max(0);
        let hi = hi.min(FSET_VALUE_LIMIT - 1);
        let mut s = FSet::empty();
        if lo > hi {
            return s;
        }
        let (lo, hi) = (lo as usize, hi as usize);
        s.words = vec![0; hi / 64 + 1];
        for (w, word) in s.words.iter_mut().enumerate().skip(lo / 64) {
            let base = w * 64;
            let from = lo.max(base) - base;
            let to = hi.min(base + 63) - base;
            let width = to - from + 1;
            let mask = if width == 64 { u64::MAX } else { ((1u64 << width) - 1) << from };
            *word = mask;
        }
        s.trim();
        s
    }

    pub fn singleton(v: i64) -> FSet {
        let mut s = FSet::empty();
        s.insert(v);
        s
    }

    pub fn universe(size: u32) -> FSet {
        FSet::range(0, size as i64 - 1)
    }

    fn in_range(v: i64) -> bool {
        (0..FSET_VALUE_LIMIT).contains(&v)
    }

    pub fn contains(&self, v: i64) -> bool {
        if !Self::in_range(v) {
            return false;
        }
        let v = v as usize;
        self.words.get(v / 64).is_some_and(|w| w & (1 << (v % 64)) != 0)
    }

    /// Returns false when `v` was already present or is not representable.
    pub fn insert(&mut self, v: i64) -> bool {
        if !Self::in_range(v) || self.contains(v) {
            return false;
        }
        let v = v as usize;
        if self.words.len() <= v / 64 {
            self.words.resize(v / 64 + 1, 0);
        }
        self.words[v / 64] |= 1 << (v % 64);
        true
    }

    pub fn remove(&mut self, v: i64) -> bool {
        if !self.contains(v) {
            return false;
        }
        let v = v as usize;
        self.words[v / 64] &= !(1 << (v % 64));
        self.trim();
        true
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.len() == 1
    }

    pub fn min(&self) -> Option<i64> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| (i * 64 + w.trailing_zeros() as usize) as i64)
    }

    pub fn max(&self) -> Option<i64> {
        let last = self.words.len().checked_sub(1)?;
        let w = self.words[last];
        Some((last * 64 + 63 - w.leading_zeros() as usize) as i64)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some((i * 64 + bit) as i64)
            })
        })
    }

    pub fn intersect(&self, other: &FSet) -> FSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    /// In-place intersection; returns whether `self` shrank.
    pub fn intersect_with(&mut self, other: &FSet) -> bool {
        let mut changed = false;
        if self.words.len() > other.words.len() {
            self.words.truncate(other.words.len());
            changed = true;
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            let n = *a & *b;
            changed |= n != *a;
            *a = n;
        }
        self.trim();
        changed
    }

    pub fn union(&self, other: &FSet) -> FSet {
        let (long, short) = if self.words.len() >= other.words.len() { (self, other) } else { (other, self) };
        let mut s = long.clone();
        for (a, b) in s.words.iter_mut().zip(&short.words) {
            *a |= *b;
        }
        s
    }

    pub fn is_subset(&self, other: &FSet) -> bool {
        self.words.len() <= other.words.len()
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Keeps only the elements in `lo..=hi`; returns whether `self` shrank.
    pub fn retain_range(&mut self, lo: i64, hi: i64) -> bool {
        let before = self.len();
        if lo > hi {
            self.words.clear();
        } else {
            let keep = FSet::range(lo, hi);
            self.intersect_with(&keep);
        }
        self.len() != before
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl FromIterator<i64> for FSet {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        let mut s = FSet::empty();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Display for FSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let values: Vec<i64> = self.iter().collect();
        let mut first = true;
        let mut i = 0;
        while i < values.len() {
            let mut j = i;
            while j + 1 < values.len() && values[j + 1] == values[j] + 1 {
                j += 1;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            if j >= i + 2 {
                write!(f, "{}..{}", values[i], values[j])?;
            } else {
                for (k, v) in values[i..=j].iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
            }
            i = j + 1;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for FSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Join-semilattice interface shared by every value kind.
pub trait Lattice: Clone + PartialEq {
    /// Least upper bound.
    fn join(&self, other: &Self) -> Self;
    /// `self <= other`.
    fn leq(&self, other: &Self) -> bool;

    /// `self |= other`, i.e. `other <= self`.
    fn entails(&self, other: &Self) -> EntailResult {
        if other.leq(self) {
            EntailResult::True
        } else if self.leq(other) {
            EntailResult::False
        } else {
            EntailResult::Unknown
        }
    }
}

impl Lattice for FSet {
    fn join(&self, other: &Self) -> Self {
        self.intersect(other)
    }

    fn leq(&self, other: &Self) -> bool {
        other.is_subset(self)
    }
}

impl Lattice for Es {
    fn join(&self, other: &Self) -> Self {
        (*self).max(*other)
    }

    fn leq(&self, other: &Self) -> bool {
        self <= other
    }
}

/// Partial map from locations to lattice values, ordered pointwise.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Store<V = LatticeValue> {
    bindings: BTreeMap<Location, V>,
}

impl<V> Store<V> {
    pub fn new() -> Self {
        Store { bindings: BTreeMap::new() }
    }

    pub fn get(&self, loc: Location) -> Option<&V> {
        self.bindings.get(&loc)
    }

    pub fn insert(&mut self, loc: Location, v: V) -> Option<V> {
        self.bindings.insert(loc, v)
    }

    pub fn remove(&mut self, loc: Location) -> Option<V> {
        self.bindings.remove(&loc)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Location, &V)> {
        self.bindings.iter().map(|(l, v)| (*l, v))
    }

    pub fn locations(&self) -> impl Iterator<Item = Location> + '_ {
        self.bindings.keys().copied()
    }
}

impl<V> FromIterator<(Location, V)> for Store<V> {
    fn from_iter<I: IntoIterator<Item = (Location, V)>>(iter: I) -> Self {
        Store { bindings: iter.into_iter().collect() }
    }
}

impl<V: fmt::Display> fmt::Display for Store<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}->{v}")?;
        }
        f.write_str("}")
    }
}

impl<V: fmt::Display> fmt::Debug for Store<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Store<LatticeValue> {
    /// Joins `v` into the binding at `loc`; an unbound location acts as bottom.
    pub fn join_at(&mut self, loc: Location, v: &LatticeValue) -> Result<(), LatticeError> {
        match self.bindings.get_mut(&loc) {
            Some(old) => {
                old.join_assign(v)?;
            }
            None => {
                self.bindings.insert(loc, v.clone());
            }
        }
        Ok(())
    }

    pub fn try_join(&self, other: &Self) -> Result<Self, LatticeError> {
        let mut out = self.clone();
        for (l, v) in &other.bindings {
            out.join_at(*l, v)?;
        }
        Ok(out)
    }

    pub fn try_leq(&self, other: &Self) -> Result<bool, LatticeError> {
        for (l, v) in &self.bindings {
            match other.bindings.get(l) {
                Some(w) => {
                    if !v.try_leq(w)? {
                        return Ok(false);
                    }
                }
                None => return Ok(false),
            }
        }
        Ok(true)
    }
}

/// `s` with `loc` bound to `join(s(loc), v)`.
pub fn store_join(s: &Store, loc: Location, v: &LatticeValue) -> Result<Store, LatticeError> {
    let mut out = s.clone();
    out.join_at(loc, v)?;
    Ok(out)
}

/// A variable as seen by the semantics: its lifetime annotation and value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    pub spacetime: SpacetimeAnnotation,
    pub value: LatticeValue,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.spacetime.symbol(), self.value)
    }
}

/// Sub-store of the variables carrying `annotation`.
pub fn store_project(s: &Store<Var>, annotation: SpacetimeAnnotation) -> Store<Var> {
    s.iter()
        .filter(|(_, v)| v.spacetime == annotation)
        .map(|(l, v)| (l, v.clone()))
        .collect()
}

/// A value of one of the built-in lattices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum LatticeValue {
    LMax(i64),
    LMin(i64),
    Es(Es),
    FSet(FSet),
    Store(Store),
    VStore(VStore),
    CStore(CStore),
}

impl LatticeValue {
    pub fn lattice_type(&self) -> LatticeType {
        match self {
            LatticeValue::LMax(_) => LatticeType::LMax,
            LatticeValue::LMin(_) => LatticeType::LMin,
            LatticeValue::Es(_) => LatticeType::Es,
            LatticeValue::FSet(_) => LatticeType::FSet,
            LatticeValue::Store(_) => LatticeType::Store,
            LatticeValue::VStore(_) => LatticeType::VStore,
            LatticeValue::CStore(_) => LatticeType::CStore,
        }
    }

    fn mismatch(&self, other: &Self) -> LatticeError {
        LatticeError::Mismatch(self.lattice_type(), other.lattice_type())
    }

    pub fn join(&self, other: &Self) -> Result<LatticeValue, LatticeError> {
        let mut out = self.clone();
        out.join_assign(other)?;
        Ok(out)
    }

    /// In-place join; returns whether `self` changed.
    pub fn join_assign(&mut self, other: &Self) -> Result<bool, LatticeError> {
        use LatticeValue::*;
        let changed = match (&mut *self, other) {
            (LMax(a), LMax(b)) => {
                let n = (*a).max(*b);
                std::mem::replace(a, n) != n
            }
            (LMin(a), LMin(b)) => {
                let n = (*a).min(*b);
                std::mem::replace(a, n) != n
            }
            (Es(a), Es(b)) => {
                let n = a.join(b);
                std::mem::replace(a, n) != n
            }
            (FSet(a), FSet(b)) => a.intersect_with(b),
            (Store(a), Store(b)) => {
                let n = a.try_join(b)?;
                let changed = *a != n;
                *a = n;
                changed
            }
            (VStore(a), VStore(b)) => a.join_assign(b),
            (CStore(a), CStore(b)) => a.join_assign(b),
            _ => return Err(self.mismatch(other)),
        };
        Ok(changed)
    }

    /// `self <= other` in the lattice order.
    pub fn try_leq(&self, other: &Self) -> Result<bool, LatticeError> {
        use LatticeValue::*;
        Ok(match (self, other) {
            (LMax(a), LMax(b)) => a <= b,
            (LMin(a), LMin(b)) => a >= b,
            (Es(a), Es(b)) => a.leq(b),
            (FSet(a), FSet(b)) => a.leq(b),
            (Store(a), Store(b)) => a.try_leq(b)?,
            (VStore(a), VStore(b)) => a.leq(b),
            (CStore(a), CStore(b)) => a.leq(b),
            _ => return Err(self.mismatch(other)),
        })
    }

    /// `self |= other`: true when `other <= self`.
    pub fn entails(&self, other: &Self) -> Result<EntailResult, LatticeError> {
        if other.try_leq(self)? {
            Ok(EntailResult::True)
        } else if self.try_leq(other)? {
            Ok(EntailResult::False)
        } else {
            Ok(EntailResult::Unknown)
        }
    }

    pub fn is_bottom(&self, cfg: &LatticeConfig) -> bool {
        *self == bottom_of(self.lattice_type(), cfg)
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            LatticeValue::LMax(v) | LatticeValue::LMin(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for LatticeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeValue::LMax(NEG_INF) => f.write_str("-inf"),
            LatticeValue::LMin(POS_INF) => f.write_str("+inf"),
            LatticeValue::LMax(v) | LatticeValue::LMin(v) => write!(f, "{v}"),
            LatticeValue::Es(e) => write!(f, "{e}"),
            LatticeValue::FSet(s) => write!(f, "{s}"),
            LatticeValue::Store(s) => write!(f, "{s}"),
            LatticeValue::VStore(s) => write!(f, "{s}"),
            LatticeValue::CStore(s) => write!(f, "{s}"),
        }
    }
}

impl fmt::Debug for LatticeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.lattice_type(), self)
    }
}

/// Least element of `ty`.
pub fn bottom_of(ty: LatticeType, cfg: &LatticeConfig) -> LatticeValue {
    match ty {
        LatticeType::LMax => LatticeValue::LMax(NEG_INF),
        LatticeType::LMin => LatticeValue::LMin(POS_INF),
        LatticeType::Es => LatticeValue::Es(Es::Unknown),
        LatticeType::FSet => LatticeValue::FSet(FSet::universe(cfg.fset_universe)),
        LatticeType::Store => LatticeValue::Store(Store::new()),
        LatticeType::VStore => LatticeValue::VStore(VStore::new()),
        LatticeType::CStore => LatticeValue::CStore(CStore::new()),
    }
}

/// [`bottom_of`] for a type given by name.
pub fn bottom_of_named(tag: &str, cfg: &LatticeConfig) -> Result<LatticeValue, LatticeError> {
    Ok(bottom_of(tag.parse()?, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> LatticeValue {
        LatticeValue::FSet(v.iter().copied().collect())
    }

    #[test]
    fn join_examples() {
        assert_eq!(LatticeValue::LMax(3).join(&LatticeValue::LMax(5)).unwrap(), LatticeValue::LMax(5));
        assert_eq!(set(&[1, 2]).join(&set(&[2, 3])).unwrap(), set(&[2]));
        assert_eq!(
            LatticeValue::Es(Es::Unknown).join(&LatticeValue::Es(Es::True)).unwrap(),
            LatticeValue::Es(Es::True)
        );
        assert_eq!(LatticeValue::LMin(3).join(&LatticeValue::LMin(5)).unwrap(), LatticeValue::LMin(3));
    }

    #[test]
    fn join_rejects_mixed_variants() {
        let err = LatticeValue::LMax(1).join(&LatticeValue::LMin(1)).unwrap_err();
        assert_eq!(err, LatticeError::Mismatch(LatticeType::LMax, LatticeType::LMin));
    }

    #[test]
    fn entailment_examples() {
        assert_eq!(set(&[0]).entails(&set(&[0, 1, 2])).unwrap(), EntailResult::True);
        let u = LatticeValue::Es(Es::Unknown);
        assert_eq!(u.entails(&u).unwrap(), EntailResult::True);
        assert_eq!(set(&[1, 2]).entails(&set(&[2, 3])).unwrap(), EntailResult::Unknown);
        assert_eq!(set(&[0, 1, 2]).entails(&set(&[0])).unwrap(), EntailResult::False);
        // false |= true |= unknown
        assert_eq!(LatticeValue::Es(Es::False).entails(&LatticeValue::Es(Es::True)).unwrap(), EntailResult::True);
        assert_eq!(LatticeValue::Es(Es::True).entails(&u).unwrap(), EntailResult::True);
    }

    #[test]
    fn bottoms() {
        let cfg = LatticeConfig { fset_universe: 4 };
        assert_eq!(bottom_of(LatticeType::Es, &cfg), LatticeValue::Es(Es::Unknown));
        assert_eq!(bottom_of(LatticeType::Store, &cfg), LatticeValue::Store(Store::new()));
        assert_eq!(bottom_of(LatticeType::LMax, &cfg), LatticeValue::LMax(NEG_INF));
        assert_eq!(bottom_of(LatticeType::FSet, &cfg), set(&[0, 1, 2, 3]));
        assert!(matches!(bottom_of_named("Nope", &cfg), Err(LatticeError::UnknownType(_))));
        assert_eq!(bottom_of_named("LMin", &cfg).unwrap(), LatticeValue::LMin(POS_INF));
    }

    #[test]
    fn store_join_examples() {
        let l0 = Location(0);
        let s = store_join(&Store::new(), l0, &LatticeValue::LMax(1)).unwrap();
        assert_eq!(s.get(l0), Some(&LatticeValue::LMax(1)));

        let s: Store = [(l0, LatticeValue::LMax(2))].into_iter().collect();
        let s = store_join(&s, l0, &LatticeValue::LMax(1)).unwrap();
        assert_eq!(s.get(l0), Some(&LatticeValue::LMax(2)));

        let s: Store = [(l0, set(&[1, 2]))].into_iter().collect();
        let s = store_join(&s, l0, &set(&[2, 3])).unwrap();
        assert_eq!(s.get(l0), Some(&set(&[2])));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn store_projection() {
        use SpacetimeAnnotation::*;
        let var = |st, v| Var { spacetime: st, value: LatticeValue::LMax(v) };
        let s: Store<Var> = [(Location(0), var(WorldLine, 1))].into_iter().collect();
        assert_eq!(store_project(&s, WorldLine), s);
        assert!(store_project(&s, SingleSpace).is_empty());

        let s: Store<Var> = [
            (Location(0), var(WorldLine, 1)),
            (Location(1), var(SingleSpace, 2)),
            (Location(2), var(SingleTime, 3)),
        ]
        .into_iter()
        .collect();
        let p = store_project(&s, SingleTime);
        // filter oracle
        let expected: Store<Var> = s.iter().filter(|(l, _)| l.0 == 2).map(|(l, v)| (l, v.clone())).collect();
        assert_eq!(p, expected);
    }

    #[test]
    fn fset_basics() {
        let s = FSet::range(3, 130);
        assert_eq!(s.len(), 128);
        assert_eq!(s.min(), Some(3));
        assert_eq!(s.max(), Some(130));
        assert!(s.contains(64) && !s.contains(2) && !s.contains(131));
        let mut t = s.clone();
        assert!(t.retain_range(10, 20));
        assert_eq!(t.iter().collect::<Vec<_>>(), (10..=20).collect::<Vec<_>>());
        assert!(t.remove(20));
        assert_eq!(t.max(), Some(19));
        assert!(FSet::range(5, 4).is_empty());
        assert_eq!(format!("{}", FSet::from_iter([1, 2, 3, 5, 7, 8])), "{1..3,5,7,8}");
        assert_eq!(FSet::range(0, 63).len(), 64);
    }
}
