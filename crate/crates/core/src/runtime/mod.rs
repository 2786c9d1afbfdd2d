//! The space machine: runs a checked program one instant per search node.

mod counting;
mod exec;
mod machine;
mod queue;
mod space;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ast::Span;
use crate::host::HostError;
use crate::lattice::LatticeError;

pub use counting::{can_analysis, reach, Counts};
pub use exec::{eval_branch, locations, Deferred, Instant, Outcome};
pub use machine::{InstantRecord, Machine, MachineConfig};
pub use queue::{Node, Queue, QueueStrategy};
pub use space::{Counters, Space, VarCell};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CompletionCode {
    Terminated = 0,
    Paused = 1,
    Stopped = 2,
    Stuck = 3,
}

impl fmt::Display for CompletionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompletionCode::Terminated => "terminated",
            CompletionCode::Paused => "paused",
            CompletionCode::Stopped => "stopped",
            CompletionCode::Stuck => "stuck",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeError {
    #[error("no process can make progress; blocked on: {0}")]
    Stuck(String),
    #[error("{0}: loop body terminated in the instant it started")]
    InstantaneousLoop(Span),
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("type error: {0}")]
    Type(String),
    #[error(transparent)]
    Host(#[from] HostError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("the node queue is empty")]
    EmptyQueue,
}

#[cfg(test)]
mod tests;
