use std::fmt;

use crate::lattice::FSet;

use super::store::FdVar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Propagator {
    /// `x <= v`
    LeConst(FdVar, i64),
    /// `x > v`
    GtConst(FdVar, i64),
    /// `x != y + c`
    NeOffset(FdVar, FdVar, i64),
    /// `x < y`
    LtVar(FdVar, FdVar),
    /// `z = x - y`
    EqDiff(FdVar, FdVar, FdVar),
}

/// Outcome of running one propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    /// Some domain became empty.
    Failed,
    /// Variables whose domains shrank (at most three).
    Changed([Option<FdVar>; 3]),
}

impl Propagator {
    pub fn vars(&self) -> Vec<FdVar> {
        match *self {
            Propagator::LeConst(x, _) | Propagator::GtConst(x, _) => vec![x],
            Propagator::NeOffset(x, y, _) | Propagator::LtVar(x, y) => vec![x, y],
            Propagator::EqDiff(z, x, y) => vec![z, x, y],
        }
    }

    /// Brute-force check of an assignment.
    pub fn satisfied_by(&self, value: impl Fn(FdVar) -> i64) -> bool {
        match *self {
            Propagator::LeConst(x, v) => value(x) <= v,
            Propagator::GtConst(x, v) => value(x) > v,
            Propagator::NeOffset(x, y, c) => value(x) != value(y) + c,
            Propagator::LtVar(x, y) => value(x) < value(y),
            Propagator::EqDiff(z, x, y) => value(z) == value(x) - value(y),
        }
    }

    /// Narrows the domains in `d`. Every variable the propagator mentions
    /// must be present.
    pub fn filter(&self, d: &mut [FSet]) -> Filter {
        let mut changed = [None; 3];
        let mut n = 0;
        let mut note = |x: FdVar, c: bool| {
            if c && !changed[..n].contains(&Some(x)) {
                changed[n] = Some(x);
                n += 1;
            }
        };
        match *self {
            Propagator::LeConst(x, v) => {
                let c = d[x as usize].retain_range(i64::MIN, v);
                note(x, c);
            }
            Propagator::GtConst(x, v) => {
                let c = d[x as usize].retain_range(v.saturating_add(1), i64::MAX);
                note(x, c);
            }
            Propagator::NeOffset(x, y, c) => {
                if let Some(b) = single(&d[y as usize]) {
                    let ch = d[x as usize].remove(b + c);
                    note(x, ch);
                }
                if let Some(a) = single(&d[x as usize]) {
                    let ch = d[y as usize].remove(a - c);
                    note(y, ch);
                }
            }
            Propagator::LtVar(x, y) => {
                let (xs, ys) = (x as usize, y as usize);
                if let Some(ymax) = d[ys].max() {
                    let c = d[xs].retain_range(i64::MIN, ymax - 1);
                    note(x, c);
                }
                if let Some(xmin) = d[xs].min() {
                    let c = d[ys].retain_range(xmin + 1, i64::MAX);
                    note(y, c);
                }
            }
            Propagator::EqDiff(z, x, y) => {
                // bounds reasoning until stable for this propagator
                loop {
                    let (Some((zl, zh)), Some((xl, xh)), Some((yl, yh))) =
                        (bounds(&d[z as usize]), bounds(&d[x as usize]), bounds(&d[y as usize]))
                    else {
                        break;
                    };
                    let cz = d[z as usize].retain_range(xl - yh, xh - yl);
                    let cx = d[x as usize].retain_range(zl + yl, zh + yh);
                    let cy = d[y as usize].retain_range(xl - zh, xh - zl);
                    note(z, cz);
                    note(x, cx);
                    note(y, cy);
                    if !(cz || cx || cy) {
                        break;
                    }
                }
            }
        }
        if self.vars().iter().any(|v| d[*v as usize].is_empty()) {
            Filter::Failed
        } else {
            Filter::Changed(changed)
        }
    }
}

fn single(s: &FSet) -> Option<i64> {
    if s.is_singleton() {
        s.min()
    } else {
        None
    }
}

fn bounds(s: &FSet) -> Option<(i64, i64)> {
    Some((s.min()?, s.max()?))
}

impl fmt::Display for Propagator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Propagator::LeConst(x, v) => write!(f, "x{x} <= {v}"),
            Propagator::GtConst(x, v) => write!(f, "x{x} > {v}"),
            Propagator::NeOffset(x, y, 0) => write!(f, "x{x} != x{y}"),
            Propagator::NeOffset(x, y, c) => write!(f, "x{x} != x{y} + {c}"),
            Propagator::LtVar(x, y) => write!(f, "x{x} < x{y}"),
            Propagator::EqDiff(z, x, y) => write!(f, "x{z} = x{x} - x{y}"),
        }
    }
}
