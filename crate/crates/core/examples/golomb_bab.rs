//! Branch and bound on Golomb rulers: every solution tightens the bound on
//! the ruler length.
//!
//! `cargo run --release --example golomb_bab -- 7`

use spacetime_vm::runtime::{Machine, MachineConfig};
use spacetime_vm::solver::golomb;
use spacetime_vm::stdlib::asset;

fn main() {
    let marks: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(6);
    let program = asset("minimize_bab").unwrap().check().expect("checks");
    let mut machine = Machine::new(&program, MachineConfig::default()).with_model(golomb(marks));
    machine.execute().expect("runs");
    for r in machine.trace().iter().filter(|r| r.is_solution()) {
        println!("node {} (instant {}): length {}", r.node, r.instant, r.objective.unwrap());
    }
    println!("{} nodes explored", machine.instants());
}
