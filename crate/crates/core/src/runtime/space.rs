use std::collections::BTreeMap;
use std::fmt;

use crate::ast::SpacetimeAnnotation;
use crate::lattice::{LatticeType, LatticeValue, Location, Store};

/// Remaining accesses of one variable in the current instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counters {
    pub w: u32,
    pub rw: u32,
    pub r: u32,
}

impl Counters {
    pub fn writes(&self) -> u32 {
        self.w + self.rw
    }
}

impl fmt::Display for Counters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.w, self.rw, self.r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarCell {
    /// Name of the declaration, as uniquified by the checker.
    pub name: String,
    pub ty: LatticeType,
    pub spacetime: SpacetimeAnnotation,
    pub value: LatticeValue,
    pub counters: Counters,
}

/// Variables alive in the current instant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Space {
    pub cells: BTreeMap<Location, VarCell>,
    next: u32,
}

impl Space {
    pub fn new() -> Space {
        Space::default()
    }

    /// Binds a fresh location; locations are never reused.
    pub fn alloc(&mut self, cell: VarCell) -> Location {
        let loc = Location(self.next);
        self.next += 1;
        self.cells.insert(loc, cell);
        loc
    }

    pub fn get(&self, loc: Location) -> Option<&VarCell> {
        self.cells.get(&loc)
    }

    pub fn get_mut(&mut self, loc: Location) -> Option<&mut VarCell> {
        self.cells.get_mut(&loc)
    }

    pub fn value(&self, loc: Location) -> Option<&LatticeValue> {
        self.cells.get(&loc).map(|c| &c.value)
    }

    /// Values of the cells carrying `st`.
    pub fn project(&self, st: SpacetimeAnnotation) -> Store {
        self.cells.iter().filter(|(_, c)| c.spacetime == st).map(|(l, c)| (*l, c.value.clone())).collect()
    }

    /// Cells whose source name is `name`.
    pub fn find<'a>(&'a self, name: &'a str) -> impl Iterator<Item = (Location, &'a VarCell)> + 'a {
        self.cells.iter().filter(move |(_, c)| crate::analysis::display_name(&c.name) == name).map(|(l, c)| (*l, c))
    }
}
