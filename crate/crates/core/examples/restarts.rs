//! Iterative deepening and limited discrepancy search as restart loops
//! around fresh machines.
//!
//! `cargo run --example restarts`

use spacetime_vm::analysis::check_program;
use spacetime_vm::runtime::{Machine, MachineConfig};
use spacetime_vm::stdlib::{asset, compose, ids_driver, lds_driver};

fn main() {
    let ids = ids_driver(
        |limit| {
            let bound = asset("bounded_depth").unwrap().with("limit", limit as i64).unwrap();
            let program = compose(&[asset("binary_tree").unwrap(), bound], true);
            Machine::new(&check_program(&program, "main").unwrap(), MachineConfig::default())
        },
        5,
    )
    .expect("runs");
    for it in &ids.iterations {
        println!("ids limit {}: {} nodes", it.limit, it.nodes);
    }

    let depth = 4;
    let lds = lds_driver(
        |limit| {
            let a = asset("bd_and_bdis").unwrap().with("depth_limit", depth).unwrap();
            let a = a.with("dis_limit", limit as i64).unwrap();
            Machine::new(&a.check().unwrap(), MachineConfig::default())
        },
        depth as u32,
    )
    .expect("runs");
    for it in &lds.iterations {
        println!("lds limit {}: {} leaves{}", it.limit, it.leaves, if it.limit_hit { "" } else { ", complete" });
    }
}
