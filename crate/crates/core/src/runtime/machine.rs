use std::sync::Arc;

use serde::Serialize;

use crate::analysis::{display_name, CheckedProgram, Completion};
use crate::ast::{SpacetimeAnnotation, Statement};
use crate::branch::Branch;
use crate::host::HostCtx;
use crate::lattice::{bottom_of, Es, LatticeConfig, Store};
use crate::solver::Model;

use super::exec::{eval_branch, locations, Instant};
use super::queue::{Node, Queue, QueueStrategy};
use super::space::Space;
use super::{CompletionCode, RuntimeError};

#[derive(Debug, Clone, Default)]
pub struct MachineConfig {
    pub queue: QueueStrategy,
    /// Stop after this many instants.
    pub max_instants: Option<u64>,
    /// Variables whose values are recorded after every instant.
    pub watch: Vec<String>,
    pub lattice: LatticeConfig,
}

/// What happened during one instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstantRecord {
    pub instant: u64,
    pub node: u64,
    pub parent: Option<u64>,
    pub depth: u32,
    pub code: CompletionCode,
    /// Child nodes pushed on the queue.
    pub branches: usize,
    pub pruned: usize,
    /// Join of the statuses reported by propagation, if any ran.
    pub status: Option<String>,
    pub objective: Option<i64>,
    pub watched: Vec<(String, String)>,
    /// Watched world-line values of each child, in push order.
    pub children: Vec<Vec<(String, String)>>,
}

impl InstantRecord {
    pub fn is_solution(&self) -> bool {
        self.status.as_deref() == Some("true")
    }

    pub fn is_failure(&self) -> bool {
        self.status.as_deref() == Some("false")
    }
}

/// Runs a checked program, one search-tree node per instant.
#[derive(Debug, Clone)]
pub struct Machine {
    program: Statement,
    space: Space,
    queue: Queue,
    config: MachineConfig,
    model: Option<Arc<Model>>,
    code: CompletionCode,
    instant: u64,
    next_id: u64,
    trace: Vec<InstantRecord>,
}

impl Machine {
    pub fn new(program: &CheckedProgram, config: MachineConfig) -> Machine {
        let mut queue = Queue::new(config.queue);
        queue.push(vec![Node { id: 0, parent: None, depth: 0, store: Store::new() }]);
        Machine {
            program: program.body.clone(),
            space: Space::new(),
            queue,
            config,
            model: None,
            code: CompletionCode::Paused,
            instant: 0,
            next_id: 1,
            trace: Vec::new(),
        }
    }

    pub fn with_model(mut self, model: Model) -> Machine {
        self.model = Some(Arc::new(model));
        self
    }

    pub fn code(&self) -> CompletionCode {
        self.code
    }

    pub fn instants(&self) -> u64 {
        self.instant
    }

    pub fn trace(&self) -> &[InstantRecord] {
        &self.trace
    }

    pub fn queue(&self) -> &Queue {
        &self.queue
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn residual(&self) -> &Statement {
        &self.program
    }

    /// Whether another instant will run.
    pub fn can_continue(&self) -> bool {
        self.code == CompletionCode::Paused
            && !self.queue.is_empty()
            && self.config.max_instants.map_or(true, |m| self.instant < m)
    }

    /// Runs instants until the program terminates, stops, or runs out of nodes.
    pub fn execute(&mut self) -> Result<CompletionCode, RuntimeError> {
        while self.can_continue() {
            self.step()?;
        }
        Ok(self.code)
    }

    /// Pops one node and executes one instant on it.
    pub fn step(&mut self) -> Result<&InstantRecord, RuntimeError> {
        let node = self.queue.pop().ok_or(RuntimeError::EmptyQueue)?;
        let cfg = self.config.lattice;
        for (loc, cell) in self.space.cells.iter_mut() {
            if cell.spacetime == SpacetimeAnnotation::WorldLine {
                cell.value = node.store.get(*loc).cloned().unwrap_or_else(|| bottom_of(cell.ty, &cfg));
            }
        }
        let ctx = HostCtx { model: self.model.as_deref() };
        let program = std::mem::replace(&mut self.program, Statement::Nothing);
        let mut inst = Instant::new(&mut self.space, cfg, ctx);
        let outcome = inst.run(program)?;
        let (status, objective) = (inst.status, inst.objective);

        let mut children = Vec::new();
        let mut pruned = 0;
        for b in &outcome.branches.items {
            match b {
                Branch::Pruned => pruned += 1,
                Branch::Space(d) => {
                    let store = eval_branch(&self.space, &d.0, cfg, ctx)?;
                    children.push(Node { id: self.next_id, parent: Some(node.id), depth: node.depth + 1, store });
                    self.next_id += 1;
                }
            }
        }
        let watched = self.watched();
        let child_values = children.iter().map(|c| self.watched_in(&c.store)).collect();
        self.collect(&outcome.residual);
        self.program = outcome.residual;
        self.code = match outcome.code {
            Completion::Term => CompletionCode::Terminated,
            Completion::Pause => CompletionCode::Paused,
            Completion::Stop => CompletionCode::Stopped,
        };
        self.instant += 1;
        self.trace.push(InstantRecord {
            instant: self.instant,
            node: node.id,
            parent: node.parent,
            depth: node.depth,
            code: self.code,
            branches: children.len(),
            pruned,
            status: status.map(|s: Es| s.to_string()),
            objective,
            watched,
            children: child_values,
        });
        self.queue.push(children);
        Ok(self.trace.last().expect("just pushed"))
    }

    fn watched(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for w in &self.config.watch {
            for (_, cell) in self.space.find(w) {
                out.push((display_name(&cell.name).to_string(), cell.value.to_string()));
            }
        }
        out
    }

    fn watched_in(&self, store: &Store) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for w in &self.config.watch {
            for (loc, cell) in self.space.find(w) {
                if let Some(v) = store.get(loc) {
                    out.push((display_name(&cell.name).to_string(), v.to_string()));
                }
            }
        }
        out
    }

    // Drops single_time cells and cells the rest of the program can no
    // longer reach.
    fn collect(&mut self, residual: &Statement) {
        let live = locations(residual);
        self.space.cells.retain(|loc, cell| cell.spacetime != SpacetimeAnnotation::SingleTime && live.contains(loc));
    }
}
