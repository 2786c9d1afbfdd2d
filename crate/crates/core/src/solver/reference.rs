use std::fmt;
use std::str::FromStr;

use crate::lattice::{Es, FSet};

use super::model::Model;
use super::propagate::{fail_first_var, middle_value, propagate_fixpoint};
use super::propagator::Propagator;
use super::store::{CStore, VStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    /// Enumerate every solution.
    #[default]
    All,
    /// Stop at the first solution.
    First,
    /// Branch and bound on the model objective.
    Bab,
}

impl FromStr for SearchStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(SearchStrategy::All),
            "first" => Ok(SearchStrategy::First),
            "bab" => Ok(SearchStrategy::Bab),
            _ => Err(format!("unknown strategy `{s}` (expected all, first or bab)")),
        }
    }
}

impl fmt::Display for SearchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStrategy::All => "all",
            SearchStrategy::First => "first",
            SearchStrategy::Bab => "bab",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub solutions: u64,
    pub failures: u64,
    pub best_objective: Option<i64>,
    /// Objective value of each solution, in discovery order.
    pub objectives: Vec<i64>,
}

/// Hand-written depth-first search using the same propagation, variable
/// selection (fail first) and value split (`x <= mid`, then `x > mid`) as
/// the spacetime solver program.
pub fn reference_search(model: &Model, strategy: SearchStrategy) -> SearchStats {
    let mut stats = SearchStats::default();
    let mut bound: Option<i64> = None;
    let mut stack: Vec<(VStore, CStore)> = vec![(model.domains.clone(), model.constraints.clone())];
    while let Some((mut domains, constraints)) = stack.pop() {
        stats.nodes += 1;
        if strategy == SearchStrategy::Bab {
            if let (Some(b), Some(x)) = (bound, model.objective) {
                domains.define(x, FSet::range(0, b - 1));
            }
        }
        let (domains, status) = propagate_fixpoint(&domains, &constraints);
        match status {
            Es::False => stats.failures += 1,
            Es::True => {
                stats.solutions += 1;
                if let Some(x) = model.objective {
                    let v = domains.get(x).and_then(|d| d.min()).expect("fixed objective");
                    stats.objectives.push(v);
                    if strategy == SearchStrategy::Bab {
                        bound = Some(v);
                        stats.best_objective = Some(v);
                    }
                }
                if strategy == SearchStrategy::First {
                    break;
                }
            }
            Es::Unknown => {
                let x = fail_first_var(&domains).expect("unknown status has an unfixed variable");
                let v = middle_value(&domains, x).expect("nonempty domain");
                let right = (domains.clone(), super::store::post(&constraints, Propagator::GtConst(x, v)));
                let left = (domains, super::store::post(&constraints, Propagator::LeConst(x, v)));
                stack.push(right);
                stack.push(left);
            }
        }
    }
    stats
}
