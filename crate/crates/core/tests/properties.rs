use proptest::prelude::*;

use spacetime_vm::ast::{pretty_program, pretty_statement};
use spacetime_vm::lattice::{Es, FSet, LatticeValue, Location, Store};
use spacetime_vm::parser::{parse_statement, parse_str};
use spacetime_vm::runtime::{Node, Queue, QueueStrategy};
use spacetime_vm::solver::{
    fail_first_var, middle_value, post, propagate_with, CStore, FdVar, Propagator, VStore, WorklistOrder,
};
use spacetime_vm::stdlib;

const VARS: u32 = 3;
const MAX: i64 = 5;

fn fset() -> impl Strategy<Value = FSet> {
    prop::collection::vec(0i64..8, 0..6).prop_map(|v| v.into_iter().collect())
}

fn vstore() -> impl Strategy<Value = VStore> {
    prop::collection::vec(prop::option::of(fset()), 0..4).prop_map(|ds| {
        let mut s = VStore::new();
        for (x, d) in ds.into_iter().enumerate() {
            if let Some(d) = d {
                s.define(x as FdVar, d);
            }
        }
        s
    })
}

fn propagator() -> impl Strategy<Value = Propagator> {
    let x = 0..VARS;
    prop_oneof![
        (x.clone(), 0..=MAX).prop_map(|(x, v)| Propagator::LeConst(x, v)),
        (x.clone(), 0..=MAX).prop_map(|(x, v)| Propagator::GtConst(x, v)),
        (x.clone(), x.clone(), -2i64..=2).prop_map(|(a, b, c)| Propagator::NeOffset(a, b, c)),
        (x.clone(), x.clone()).prop_map(|(a, b)| Propagator::LtVar(a, b)),
        (x.clone(), x.clone(), x).prop_map(|(z, a, b)| Propagator::EqDiff(z, a, b)),
    ]
}

fn cstore() -> impl Strategy<Value = CStore> {
    prop::collection::vec(propagator(), 0..5).prop_map(CStore::from_props)
}

fn value_of(ty: u8) -> BoxedStrategy<LatticeValue> {
    match ty {
        0 => (-5i64..5).prop_map(LatticeValue::LMax).boxed(),
        1 => (-5i64..5).prop_map(LatticeValue::LMin).boxed(),
        2 => prop_oneof![Just(Es::Unknown), Just(Es::True), Just(Es::False)].prop_map(LatticeValue::Es).boxed(),
        3 => fset().prop_map(LatticeValue::FSet).boxed(),
        4 => vstore().prop_map(LatticeValue::VStore).boxed(),
        _ => cstore().prop_map(LatticeValue::CStore).boxed(),
    }
}

fn triple() -> impl Strategy<Value = (LatticeValue, LatticeValue, LatticeValue)> {
    (0u8..6).prop_flat_map(|t| (value_of(t), value_of(t), value_of(t)))
}

fn lmax_store() -> impl Strategy<Value = Store> {
    prop::collection::vec(-3i64..3, 2).prop_map(|vs| {
        let mut s = Store::new();
        for (i, v) in vs.into_iter().enumerate() {
            s.join_at(Location(i as u32), &LatticeValue::LMax(v)).unwrap();
        }
        s
    })
}

/// Every node of `after` lies above some node of `before`.
fn dominated(before: &[Store], after: &[Store]) -> bool {
    after.iter().all(|a| before.iter().any(|b| b.try_leq(a).unwrap()))
}

fn domains() -> impl Strategy<Value = VStore> {
    prop::collection::vec((0..=MAX, 0..=MAX), VARS as usize).prop_map(|bounds| {
        VStore::from_domains(bounds.into_iter().map(|(a, b)| FSet::range(a.min(b), a.max(b))))
    })
}

/// Every assignment inside `d` satisfying `cs`.
fn solutions(d: &VStore, cs: &CStore) -> Vec<Vec<i64>> {
    let mut out = vec![];
    let mut current = vec![0; VARS as usize];
    fn go(i: usize, d: &VStore, cs: &CStore, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == current.len() {
            if cs.props().iter().all(|p| p.satisfied_by(|x| current[x as usize])) {
                out.push(current.clone());
            }
            return;
        }
        for v in d.get(i as FdVar).map(|s| s.iter().collect::<Vec<_>>()).unwrap_or_default() {
            current[i] = v;
            go(i + 1, d, cs, current, out);
        }
    }
    go(0, d, cs, &mut current, &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn join_is_a_semilattice((a, b, c) in triple()) {
        let ab = a.join(&b).unwrap();
        prop_assert_eq!(&ab, &b.join(&a).unwrap());
        prop_assert_eq!(ab.join(&c).unwrap(), a.join(&b.join(&c).unwrap()).unwrap());
        prop_assert_eq!(&a.join(&a).unwrap(), &a);
        prop_assert!(a.try_leq(&ab).unwrap() && b.try_leq(&ab).unwrap());
        // the join is the least upper bound
        if a.try_leq(&c).unwrap() && b.try_leq(&c).unwrap() {
            prop_assert!(ab.try_leq(&c).unwrap());
        }
    }

    #[test]
    fn entailment_agrees_with_order((a, b, _c) in triple()) {
        use spacetime_vm::lattice::EntailResult;
        let e = a.entails(&b).unwrap();
        prop_assert_eq!(e == EntailResult::True, b.try_leq(&a).unwrap());
        let ab = a.join(&b).unwrap();
        prop_assert_eq!(ab.entails(&b).unwrap(), EntailResult::True);
    }

    #[test]
    fn propagation_is_sound_extensive_and_idempotent(d in domains(), cs in cstore()) {
        let (out, status) = propagate_with(&d, &cs, WorklistOrder::Fifo);
        for x in 0..VARS {
            prop_assert!(out.get(x).unwrap().is_subset(d.get(x).unwrap()));
        }
        let before = solutions(&d, &cs);
        let after = solutions(&out, &cs);
        prop_assert_eq!(&before, &after);
        if status == Es::False {
            prop_assert!(before.is_empty());
        }
        if status == Es::True {
            prop_assert_eq!(before.len(), 1);
        }
        let (again, status2) = propagate_with(&out, &cs, WorklistOrder::Fifo);
        prop_assert_eq!(&again, &out);
        prop_assert_eq!(status, status2);
    }

    #[test]
    fn propagation_is_confluent(d in domains(), cs in cstore()) {
        // failed stores all stand for the top element, whatever is left in them
        let fifo = propagate_with(&d, &cs, WorklistOrder::Fifo);
        for order in [WorklistOrder::Lifo, WorklistOrder::ReverseFifo] {
            let other = propagate_with(&d, &cs, order);
            prop_assert_eq!(fifo.1, other.1);
            if fifo.1 != Es::False {
                prop_assert_eq!(&fifo.0, &other.0);
            }
        }
    }

    #[test]
    fn split_partitions_the_solutions(d in domains(), cs in cstore()) {
        let (out, status) = propagate_with(&d, &cs, WorklistOrder::Fifo);
        if status != Es::Unknown {
            return Ok(());
        }
        let x = fail_first_var(&out).unwrap();
        let v = middle_value(&out, x).unwrap();
        let left = solutions(&out, &post(&cs, Propagator::LeConst(x, v)));
        let right = solutions(&out, &post(&cs, Propagator::GtConst(x, v)));
        let dx = out.get(x).unwrap();
        prop_assert!(dx.min().unwrap() <= v && v < dx.max().unwrap());
        prop_assert!(left.iter().all(|s| !right.contains(s)));
        let mut both: Vec<_> = left.into_iter().chain(right).collect();
        both.sort();
        prop_assert_eq!(both, solutions(&out, &cs));
    }

    #[test]
    fn extensive_steps_grow_the_queue(
        roots in prop::collection::vec(lmax_store(), 1..4),
        steps in prop::collection::vec(prop::collection::vec(lmax_store(), 0..3), 1..6),
        fifo in any::<bool>(),
    ) {
        let mut q = Queue::new(if fifo { QueueStrategy::Fifo } else { QueueStrategy::StackLR });
        let mut id = 0;
        let mut mk = |store: Store| { id += 1; Node { id, parent: None, depth: 0, store } };
        q.push(roots.into_iter().map(&mut mk).collect());
        for deltas in steps {
            let before: Vec<Store> = q.pending().iter().map(|n| n.store.clone()).collect();
            let Some(n) = q.pop() else { break };
            let children = deltas.iter().map(|d| mk(n.store.try_join(d).unwrap())).collect();
            q.push(children);
            let after: Vec<Store> = q.pending().iter().map(|n| n.store.clone()).collect();
            prop_assert!(dominated(&before, &after));
        }
    }

    #[test]
    fn printing_then_parsing_is_stable(seed in any::<u64>()) {
        let text = random_statement(&mut Gen(seed), 3);
        let parsed = parse_statement(&text).unwrap();
        let printed = pretty_statement(&parsed);
        let reparsed = parse_statement(&printed).unwrap();
        prop_assert_eq!(&parsed, &reparsed);
        prop_assert_eq!(printed, pretty_statement(&reparsed));
    }
}

#[test]
fn every_strategy_parses_and_reprints() {
    for (name, _) in stdlib::names().iter().zip(0..) {
        let a = stdlib::asset(name).unwrap();
        let p = parse_str(a.source).unwrap();
        let printed = pretty_program(&p);
        let q = parse_str(&printed).unwrap();
        assert_eq!(p, q, "{name}");
        assert_eq!(printed, pretty_program(&q), "{name}");
    }
}

// A small splitmix generator keeps the statement shape a pure function of
// the proptest seed.
struct Gen(u64);

impl Gen {
    fn below(&mut self, n: u64) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        (z ^ (z >> 31)) % n
    }
}

fn random_statement(g: &mut Gen, depth: u32) -> String {
    let vars = ["x", "y", "z"];
    let v = |g: &mut Gen| vars[g.below(3) as usize];
    let annot = |g: &mut Gen| ["^r", "^w", "^rw", ""][g.below(4) as usize];
    let n = if depth == 0 { 9 } else { 16 };
    let sub = |g: &mut Gen| random_statement(g, depth.saturating_sub(1));
    match g.below(n) {
        0 => "nothing".into(),
        1 => "pause".into(),
        2 => "stop".into(),
        3 => "prune".into(),
        4 => format!("f({}{}, {})", v(g), annot(g), g.below(5)),
        5 => format!("{} <- {}", v(g), ["1", "true", "unknown", "bot", "{1, 2}"][g.below(5) as usize]),
        6 => format!("{} <- g(read {}, readwrite {})", v(g), v(g), v(g)),
        7 => format!("{} <- {}", v(g), v(g)),
        8 => "space nothing end".into(),
        9 => format!("when {} |= {} then {} else {} end", v(g), v(g), sub(g), sub(g)),
        10 => format!("when {} |= 3 then {} end", v(g), sub(g)),
        11 => format!("par {} <> {} <> {} end", sub(g), sub(g), sub(g)),
        12 => format!("par || {} || {} end", sub(g), sub(g)),
        13 => format!("loop {}; pause end", sub(g)),
        14 => {
            let st = ["single_time", "single_space", "world_line"][g.below(3) as usize];
            let ty = ["LMax", "LMin", "ES", "FSet"][g.below(4) as usize];
            format!("{st} {ty} {} = h({}); {}", v(g), v(g), sub(g))
        }
        _ => format!("flow {}; ({}) end", sub(g), sub(g)),
    }
}
