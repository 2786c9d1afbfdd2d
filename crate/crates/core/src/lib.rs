pub mod analysis;
pub mod ast;
pub mod branch;
pub mod cli;
pub mod host;
pub mod lattice;
pub mod parser;
pub mod runtime;
pub mod solver;
pub mod stdlib;
