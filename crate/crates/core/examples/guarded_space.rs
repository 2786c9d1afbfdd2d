//! One instant of a program whose guard depends on a concurrent write.
//!
//! `cargo run --example guarded_space`

use spacetime_vm::analysis::check_program;
use spacetime_vm::parser::{parse_program, SourceProgram};
use spacetime_vm::runtime::{Machine, MachineConfig};

fn main() {
    let src = SourceProgram::new("guarded_space.st", include_str!("programs/guarded_space.st"));
    let program = parse_program(&src).expect("parses");
    let checked = check_program(&program, "main").expect("checks");
    let config = MachineConfig { max_instants: Some(1), watch: vec!["x".into()], ..Default::default() };
    let mut machine = Machine::new(&checked, config);
    machine.execute().expect("runs");

    let r = &machine.trace()[0];
    println!("after instant {}: {:?}", r.instant, r.watched);
    for (i, child) in r.children.iter().enumerate() {
        println!("child {}: {:?}", i + 1, child);
    }
}
