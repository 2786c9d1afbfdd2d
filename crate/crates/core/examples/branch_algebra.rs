//! Sequences of branches under the three composition operators.
//!
//! `cargo run --example branch_algebra`

use spacetime_vm::branch::{Branch, BranchSeq};
use spacetime_vm::lattice::{LatticeValue, Location, Store};

fn space(x: i64) -> Branch<Store> {
    Branch::Space([(Location(0), LatticeValue::LMax(x))].into_iter().collect())
}

fn main() {
    let tree: BranchSeq<Store> = [space(1), space(2)].into_iter().collect();
    let bound: BranchSeq<Store> = [Branch::Pruned].into_iter().collect();
    let one: BranchSeq<Store> = [space(5)].into_iter().collect();

    println!("{tree} or {bound} = {}", tree.or(&bound));
    println!("{tree} and {bound} = {}", tree.and(&bound));
    println!("{tree} and {one} = {}", tree.and(&one));
    println!("{tree} then {one} = {}", tree.clone().concat(one.clone()));
}
