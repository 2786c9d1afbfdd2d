//! Search strategies shipped as spacetime source, and the restart drivers
//! that run them with growing limits.
//!
//! Every asset defines a process named after it. The constant-initialized
//! declarations at the head of that process are its parameters.

use std::fmt;

use thiserror::Error;

use crate::analysis::{check_program, CheckedProgram, Diagnostic};
use crate::ast::{Init, Literal, ProcDef, Program, Span, Statement};
use crate::parser::{parse_program, SourceProgram};
use crate::runtime::{InstantRecord, Machine, RuntimeError};

const SOURCES: &[(&str, &str)] = &[
    ("binary_tree", include_str!("../stdlib/binary_tree.st")),
    ("node_count", include_str!("../stdlib/node_count.st")),
    ("depth_count", include_str!("../stdlib/depth_count.st")),
    ("bounded_depth", include_str!("../stdlib/bounded_depth.st")),
    ("bounded_discrepancy", include_str!("../stdlib/bounded_discrepancy.st")),
    ("bd_and_bdis", include_str!("../stdlib/bd_and_bdis.st")),
    ("csp_search", include_str!("../stdlib/csp_search.st")),
    ("minimize_bab", include_str!("../stdlib/minimize_bab.st")),
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StdlibError {
    #[error("unknown strategy `{name}`; available: {}", available.join(", "))]
    UnknownAsset { name: String, available: Vec<String> },
    #[error("strategy `{asset}` has no parameter `{param}`; parameters: {}", available.join(", "))]
    UnknownParam { asset: String, param: String, available: Vec<String> },
    #[error("{file}: {message}")]
    Parse { file: String, message: String },
    #[error("process `{0}` is defined twice")]
    Duplicate(String),
}

/// Names of the shipped strategies.
pub fn names() -> Vec<&'static str> {
    SOURCES.iter().map(|(n, _)| *n).collect()
}

/// Every process of every shipped strategy.
pub fn library() -> Program {
    let mut out = Program::default();
    for (name, text) in SOURCES {
        let parsed = parse_asset(name, text).expect("shipped strategies parse");
        out.procs.extend(parsed.procs);
    }
    out
}

fn parse_asset(name: &str, text: &str) -> Result<Program, StdlibError> {
    let file = format!("stdlib/{name}.st");
    parse_program(&SourceProgram::new(file.clone(), text)).map_err(|errs| StdlibError::Parse {
        file,
        message: errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "),
    })
}

/// Adds the processes of `text` to the library; names must not clash.
pub fn with_library(file: &str, text: &str) -> Result<Program, StdlibError> {
    let user = parse_program(&SourceProgram::new(file, text)).map_err(|errs| StdlibError::Parse {
        file: file.to_string(),
        message: errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "),
    })?;
    let mut program = library();
    for def in user.procs {
        if program.get(&def.name).is_some() {
            return Err(StdlibError::Duplicate(def.name));
        }
        program.procs.push(def);
    }
    Ok(program)
}

/// A shipped strategy with its parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyAsset {
    pub name: &'static str,
    pub source: &'static str,
    pub params: Vec<(String, Literal)>,
}

/// Looks up a shipped strategy by name.
pub fn asset(name: &str) -> Result<StrategyAsset, StdlibError> {
    let Some((name, source)) = SOURCES.iter().find(|(n, _)| *n == name) else {
        return Err(StdlibError::UnknownAsset {
            name: name.to_string(),
            available: names().into_iter().map(String::from).collect(),
        });
    };
    let program = parse_asset(name, source)?;
    let entry = program.get(name).expect("asset defines its entry process");
    let params = leading_constants(&entry.body).into_iter().map(|(n, l)| (n.to_string(), l.clone())).collect();
    Ok(StrategyAsset { name, source, params })
}

/// Every shipped strategy.
pub fn assets() -> Vec<StrategyAsset> {
    names().into_iter().map(|n| asset(n).expect("shipped")).collect()
}

fn leading_constants(mut s: &Statement) -> Vec<(&str, &Literal)> {
    let mut out = Vec::new();
    while let Statement::VarDecl { var, init: Init::Lit(l), body, .. } = s {
        out.push((var.as_name().unwrap_or_default(), l));
        s = body;
    }
    out
}

fn set_leading(mut s: &mut Statement, name: &str, value: &Literal) -> bool {
    while let Statement::VarDecl { var, init: Init::Lit(l), body, .. } = s {
        if var.as_name() == Some(name) {
            *l = value.clone();
            return true;
        }
        s = body;
    }
    false
}

impl StrategyAsset {
    pub fn param(&self, name: &str) -> Option<&Literal> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, l)| l)
    }

    /// Sets a parameter to a new constant.
    pub fn with(mut self, param: &str, value: impl Into<Literal>) -> Result<StrategyAsset, StdlibError> {
        let value = value.into();
        match self.params.iter_mut().find(|(n, _)| n == param) {
            Some((_, l)) => *l = value,
            None => {
                return Err(StdlibError::UnknownParam {
                    asset: self.name.to_string(),
                    param: param.to_string(),
                    available: self.params.iter().map(|(n, _)| n.clone()).collect(),
                })
            }
        }
        Ok(self)
    }

    /// Applies the parameter values to the entry process of `program`.
    pub fn apply(&self, program: &mut Program) {
        if let Some(def) = program.get_mut(self.name) {
            for (n, l) in &self.params {
                set_leading(&mut def.body, n, l);
            }
        }
    }

    /// The library with this strategy as its `main` process.
    pub fn program(&self) -> Program {
        compose(std::slice::from_ref(self), false)
    }

    pub fn check(&self) -> Result<CheckedProgram, Vec<Diagnostic>> {
        check_program(&self.program(), "main")
    }
}

impl fmt::Display for StrategyAsset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)?;
        if !self.params.is_empty() {
            let ps: Vec<_> = self.params.iter().map(|(n, l)| format!("{n}={l}")).collect();
            write!(f, "({})", ps.join(", "))?;
        }
        Ok(())
    }
}

/// The library with a `main` process running `parts` in parallel, under
/// `<>` when `and` holds and `||` otherwise.
pub fn compose(parts: &[StrategyAsset], and: bool) -> Program {
    let mut program = library();
    for a in parts {
        a.apply(&mut program);
    }
    let body = parts
        .iter()
        .map(|a| Statement::run(a.name, &[]))
        .reduce(|acc, s| if and { Statement::par_and(acc, s) } else { Statement::par_or(acc, s) })
        .unwrap_or(Statement::Nothing);
    program.define(ProcDef { name: "main".into(), params: vec![], body, span: Span::default() });
    program
}

/// Statistics of one restart.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Iteration {
    pub limit: u32,
    pub nodes: u64,
    /// Nodes without children.
    pub leaves: u64,
    pub solutions: u64,
    pub failures: u64,
    pub pruned: u64,
    /// Whether the limit cut off part of the tree.
    pub limit_hit: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DriverStats {
    pub iterations: Vec<Iteration>,
    /// An iteration explored the whole tree.
    pub complete: bool,
}

impl DriverStats {
    pub fn nodes(&self) -> u64 {
        self.iterations.iter().map(|i| i.nodes).sum()
    }

    pub fn solutions(&self) -> u64 {
        self.iterations.iter().map(|i| i.solutions).sum()
    }
}

fn restarts(
    mut make: impl FnMut(u32) -> Machine,
    limits: std::ops::Range<u32>,
    hit: impl Fn(&InstantRecord, u32) -> bool,
) -> Result<DriverStats, RuntimeError> {
    let mut stats = DriverStats::default();
    for limit in limits {
        let mut machine = make(limit);
        machine.execute()?;
        let mut it = Iteration { limit, ..Default::default() };
        for r in machine.trace() {
            it.nodes += 1;
            it.leaves += u64::from(r.branches == 0);
            it.solutions += u64::from(r.is_solution());
            it.failures += u64::from(r.is_failure());
            it.pruned += r.pruned as u64;
            it.limit_hit |= hit(r, limit);
        }
        let done = !it.limit_hit;
        stats.iterations.push(it);
        if done {
            stats.complete = true;
            break;
        }
    }
    Ok(stats)
}

/// Iterative deepening: runs `make(limit)` for limits `0..max_depth`,
/// stopping early once an iteration is not cut by its depth limit. A node
/// at the limit counts as cut unless propagation decided it.
pub fn ids_driver(make: impl FnMut(u32) -> Machine, max_depth: u32) -> Result<DriverStats, RuntimeError> {
    restarts(make, 0..max_depth, |r, limit| r.depth == limit && !r.is_solution() && !r.is_failure())
}

/// Limited discrepancy search: runs `make(limit)` for limits
/// `0..=max_dis`, stopping early once no right branch was pruned while
/// its left sibling was kept.
pub fn lds_driver(make: impl FnMut(u32) -> Machine, max_dis: u32) -> Result<DriverStats, RuntimeError> {
    restarts(make, 0..max_dis + 1, |r, _| r.pruned > 0 && r.branches > 0)
}
