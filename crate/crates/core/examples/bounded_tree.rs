//! Composing shipped strategies: the binary tree under a depth bound, with
//! both parallel operators.
//!
//! `cargo run --example bounded_tree -- 3`

use spacetime_vm::analysis::check_program;
use spacetime_vm::runtime::{Machine, MachineConfig};
use spacetime_vm::stdlib::{asset, compose};

fn main() {
    let limit: i64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let bound = asset("bounded_depth").unwrap().with("limit", limit).unwrap();
    let parts = [asset("binary_tree").unwrap(), bound];

    for (op, and) in [("<>", true), ("||", false)] {
        let checked = check_program(&compose(&parts, and), "main").expect("checks");
        let config = MachineConfig { max_instants: Some(40), ..Default::default() };
        let mut machine = Machine::new(&checked, config);
        machine.execute().expect("runs");
        let pruned: usize = machine.trace().iter().map(|r| r.pruned).sum();
        println!("binary_tree {op} {}: {} instants, {pruned} pruned", parts[1], machine.instants());
    }
    // `||` lets the unbounded tree through, so only the instant bound stops it
}
