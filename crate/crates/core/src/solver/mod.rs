//! Finite-domain constraint solver: variable and constraint stores,
//! propagators, fixpoint propagation and branching primitives.

mod model;
mod propagate;
mod propagator;
mod reference;
mod store;

pub use model::{golomb, latin, queens, Model, ModelError, Problem};
pub use propagate::{consistency, fail_first_var, middle_value, propagate_fixpoint, propagate_with, WorklistOrder};
pub use propagator::{Filter, Propagator};
pub use reference::{reference_search, SearchStats, SearchStrategy};
pub use store::{post, CStore, FdVar, VStore};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Es, FSet, Lattice};

    fn set(v: &[i64]) -> FSet {
        v.iter().copied().collect()
    }

    #[test]
    fn greater_or_equal_example() {
        // x >= y as z = x - y with z >= 0
        let vs = VStore::from_domains([set(&[1, 2]), set(&[2, 3]), FSet::range(0, 10)]);
        let cs = CStore::from_props([Propagator::EqDiff(2, 0, 1)]);
        let (out, _) = propagate_fixpoint(&vs, &cs);
        assert_eq!(out.get(0), Some(&set(&[2])));
        // one application leaves y = {2,3}; the fixpoint also narrows y
        assert_eq!(out.get(1), Some(&set(&[2])));
    }

    #[test]
    fn empty_constraint_store() {
        let vs = VStore::from_domains([set(&[1, 2])]);
        let (out, st) = propagate_fixpoint(&vs, &CStore::new());
        assert_eq!(out, vs);
        assert_eq!(st, Es::Unknown);
        let vs = VStore::from_domains([set(&[1])]);
        assert_eq!(propagate_fixpoint(&vs, &CStore::new()).1, Es::True);
    }

    #[test]
    fn strict_order_fixes_both() {
        let vs = VStore::from_domains([set(&[1, 2]), set(&[1, 2])]);
        let cs = CStore::from_props([Propagator::LtVar(0, 1)]);
        let (out, st) = propagate_fixpoint(&vs, &cs);
        assert_eq!(out.get(0), Some(&set(&[1])));
        assert_eq!(out.get(1), Some(&set(&[2])));
        assert_eq!(st, Es::True);
    }

    #[test]
    fn post_is_set_insertion() {
        let p = Propagator::LeConst(0, 3);
        let cs = post(&CStore::new(), p);
        assert_eq!(cs.props(), &[p]);
        assert_eq!(post(&cs, p), cs);
        let both = post(&cs, Propagator::GtConst(0, 3));
        let vs = VStore::from_domains([FSet::range(0, 9)]);
        assert_eq!(propagate_fixpoint(&vs, &both).1, Es::False);
    }

    #[test]
    fn consistency_cases() {
        let cs = CStore::new();
        assert_eq!(consistency(&VStore::from_domains([set(&[1]), set(&[2])]), &cs), Es::True);
        assert_eq!(consistency(&VStore::from_domains([set(&[]), set(&[2])]), &cs), Es::False);
        assert_eq!(consistency(&VStore::from_domains([set(&[1, 2])]), &cs), Es::Unknown);
    }

    #[test]
    fn fail_first_and_middle() {
        assert_eq!(fail_first_var(&VStore::from_domains([set(&[1, 2, 3]), set(&[4, 5])])), Some(1));
        assert_eq!(fail_first_var(&VStore::from_domains([set(&[1, 2])])), Some(0));
        assert_eq!(fail_first_var(&VStore::from_domains([set(&[1, 2]), set(&[3, 4])])), Some(0));
        assert_eq!(middle_value(&VStore::from_domains([FSet::range(1, 4)]), 0), Some(2));
        assert_eq!(middle_value(&VStore::from_domains([set(&[5])]), 0), Some(5));
        assert_eq!(middle_value(&VStore::from_domains([set(&[1, 9])]), 0), Some(5));
    }

    #[test]
    fn vstore_order() {
        let a = VStore::from_domains([set(&[1, 2, 3])]);
        let b = VStore::from_domains([set(&[2])]);
        assert!(a.leq(&b));
        assert!(!b.leq(&a));
        assert_eq!(a.join(&b), b);
        let frag = VStore::single(1, set(&[4]));
        let j = a.join(&frag);
        assert_eq!(j.len(), 2);
        assert!(a.leq(&j) && frag.leq(&j));
    }

    #[test]
    fn model_text_round_trip() {
        let m = golomb(4);
        let text = m.to_string();
        let back = Model::parse(&text).unwrap();
        assert_eq!(back.domains, m.domains);
        assert_eq!(back.constraints, m.constraints);
        assert_eq!(back.objective, m.objective);
        assert!(Model::parse("var x 0 3\nle y 2").is_err());
    }

    #[test]
    fn small_reference_runs() {
        assert_eq!(reference_search(&queens(4), SearchStrategy::All).solutions, 2);
        let s = reference_search(&golomb(4), SearchStrategy::Bab);
        assert_eq!(s.best_objective, Some(6));
    }
}
