use std::collections::VecDeque;

use crate::lattice::{Es, FSet};

use super::propagator::{Filter, Propagator};
use super::store::{CStore, FdVar, VStore};

/// Order in which the worklist is scheduled. The fixpoint does not depend on
/// it; the choice only exists to test that claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WorklistOrder {
    #[default]
    Fifo,
    Lifo,
    /// FIFO, seeded with the propagators in reverse order.
    ReverseFifo,
}

/// Status of a store at fixpoint: `true` when every variable is fixed,
/// `false` when a domain is empty, `unknown` otherwise.
pub fn consistency(vs: &VStore, cs: &CStore) -> Es {
    if vs.is_failed() {
        Es::False
    } else if vs.all_singleton() && cs.props().iter().all(|p| p.vars().iter().all(|x| vs.get(*x).is_some())) {
        Es::True
    } else {
        Es::Unknown
    }
}

pub fn propagate_fixpoint(vs: &VStore, cs: &CStore) -> (VStore, Es) {
    propagate_with(vs, cs, WorklistOrder::Fifo)
}

pub fn propagate_with(vs: &VStore, cs: &CStore, order: WorklistOrder) -> (VStore, Es) {
    if vs.is_failed() {
        return (vs.clone(), Es::False);
    }
    // propagators over undefined variables are ignored
    let props: Vec<&Propagator> = cs.props().iter().filter(|p| p.vars().iter().all(|x| vs.get(*x).is_some())).collect();
    let n = vs.capacity();
    let mut doms: Vec<FSet> = (0..n as FdVar).map(|x| vs.get(x).cloned().unwrap_or_default()).collect();
    let mut watch: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, p) in props.iter().enumerate() {
        for x in p.vars() {
            if !watch[x as usize].contains(&i) {
                watch[x as usize].push(i);
            }
        }
    }
    let mut queued = vec![true; props.len()];
    let mut work: VecDeque<usize> = match order {
        WorklistOrder::ReverseFifo => (0..props.len()).rev().collect(),
        _ => (0..props.len()).collect(),
    };
    let mut failed = false;
    loop {
        let next = match order {
            WorklistOrder::Lifo => work.pop_back(),
            _ => work.pop_front(),
        };
        let Some(i) = next else { break };
        queued[i] = false;
        match props[i].filter(&mut doms) {
            Filter::Failed => {
                failed = true;
                break;
            }
            Filter::Changed(vars) => {
                for x in vars.into_iter().flatten() {
                    for &j in &watch[x as usize] {
                        if !queued[j] {
                            queued[j] = true;
                            work.push_back(j);
                        }
                    }
                }
            }
        }
    }
    let mut out = VStore::new();
    for (x, _) in vs.iter() {
        out.define(x, std::mem::take(&mut doms[x as usize]));
    }
    let status = if failed { Es::False } else { consistency(&out, cs) };
    (out, status)
}

/// The non-fixed variable with the smallest domain, lowest id first.
pub fn fail_first_var(vs: &VStore) -> Option<FdVar> {
    vs.iter().filter(|(_, d)| d.len() > 1).min_by_key(|(x, d)| (d.len(), *x)).map(|(x, _)| x)
}

/// `floor((min + max) / 2)` of the domain of `x`.
pub fn middle_value(vs: &VStore, x: FdVar) -> Option<i64> {
    let d = vs.get(x)?;
    Some((d.min()? + d.max()?).div_euclid(2))
}
