//! The static analysis accepts or rejects a program before it runs.
//!
//! `cargo run --example causality`

use spacetime_vm::analysis::{check_program, enumerate_paths};
use spacetime_vm::parser::{parse_statement, parse_str};

fn main() {
    let programs = [
        "proc main = world_line LMax x = 0; world_line LMax y = 0; when x |= y then x <- 1 end",
        "proc main = world_line LMax x = 0; world_line LMax y = 0; when x |= y then y <- 1 end",
        "proc main = world_line LMax x = 0; par inc(x^rw) <> inc(x^rw) end",
        "proc main = loop nothing end",
        "proc main = single_space LMax x = 0; space inc(x^rw) end; pause",
    ];
    for src in programs {
        match check_program(&parse_str(src).unwrap(), "main") {
            Ok(_) => println!("accepted: {src}"),
            Err(diags) => {
                println!("rejected: {src}");
                for d in diags {
                    println!("  {}", d.render("input"));
                }
            }
        }
    }

    let p = parse_statement("when x |= y then f(x^r) else g(x^r) end").unwrap();
    for path in enumerate_paths(&p).unwrap() {
        println!("path {path}");
    }
}
