//! All solutions of N-queens with the spacetime solver, checked against
//! the hand-written reference search.
//!
//! `cargo run --release --example nqueens -- 8`

use spacetime_vm::cli::solve;
use spacetime_vm::solver::{queens, reference_search, SearchStrategy};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(8);
    let model = queens(n);
    let st = solve(&model, SearchStrategy::All).expect("runs");
    let reference = reference_search(&model, SearchStrategy::All);
    println!("{n}-queens: {} solutions, {} nodes, {} failures", st.solutions, st.nodes, st.failures);
    println!("reference: {} solutions, {} nodes, {} failures", reference.solutions, reference.nodes, reference.failures);
    println!("{:.0} nodes/s", st.nodes_per_second);
}
