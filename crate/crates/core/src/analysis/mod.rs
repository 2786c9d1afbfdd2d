//! Compile-time checks run before a program may execute.
//!
//! The pipeline inlines processes, resolves names and types, checks loops
//! and `space` bodies, then symbolically executes every kind of instant and
//! checks that each one admits a causal order of its accesses.

mod causality;
mod paths;
mod structure;
mod types;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ast::{inline_processes, InlineError, Program, Span, Statement};
use crate::parser::ParseError;

pub use causality::check_trace;
pub use paths::{Access, Atom, Completion, Explorer, Trace};
pub use structure::{check_instantaneous_loop, check_space_bodies, first_codes};
pub use types::{check_types, display_name, uniquify, VarInfo};

/// Upper bound on the number of outcomes tracked per statement.
pub const PATH_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: &'static str, span: Span, message: String) -> Diagnostic {
        Diagnostic { severity: Severity::Error, code, span, message }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: code: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}:{}: {}: {}", self.span.line, self.span.col, self.code, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.code, self.message)
    }
}

impl From<&ParseError> for Diagnostic {
    fn from(e: &ParseError) -> Diagnostic {
        Diagnostic::error("E-PARSE", Span::new(e.line, e.col), e.message.clone())
    }
}

impl From<&InlineError> for Diagnostic {
    fn from(e: &InlineError) -> Diagnostic {
        let code = match e {
            InlineError::Recursion { .. } => "E-RECURSION",
            InlineError::Arity { .. } => "E-ARITY",
            _ => "E-SCOPE",
        };
        Diagnostic::error(code, e.span(), e.to_string())
    }
}

/// A program that passed every check, flattened and with unique names.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckedProgram {
    pub body: Statement,
    pub vars: BTreeMap<String, VarInfo>,
}

/// One control-flow resolution of an instant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicPath {
    pub atoms: Vec<Atom>,
    pub completion: Completion,
}

impl fmt::Display for SymbolicPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(">")
    }
}

fn too_complex(p: &Statement) -> Diagnostic {
    Diagnostic::error(
        "E-COMPLEX",
        p.span(),
        format!("more than {PATH_LIMIT} paths per instant; split the program into smaller parallel parts"),
    )
}

/// Instant traces of `p`: first instants, resumed instants and the
/// instants executing `space` bodies.
pub fn instant_traces(p: &Statement) -> Result<Vec<(std::rc::Rc<Trace>, Completion)>, Diagnostic> {
    let mut ex = Explorer::new(PATH_LIMIT);
    let mut out = ex.surf(p).map_err(|_| too_complex(p))?;
    out.extend(ex.res(p).map_err(|_| too_complex(p))?);
    for b in paths::space_bodies(p) {
        out.extend(ex.surf(b).map_err(|_| too_complex(b))?);
    }
    Ok(out)
}

/// Every symbolic path of every instant of `p`, without duplicates.
pub fn enumerate_paths(p: &Statement) -> Result<Vec<SymbolicPath>, Diagnostic> {
    let mut out: Vec<SymbolicPath> = Vec::new();
    for (t, completion) in instant_traces(p)? {
        let path = SymbolicPath { atoms: causality::linearize(&t), completion };
        if !out.contains(&path) {
            out.push(path);
        }
    }
    Ok(out)
}

fn dedup(diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    let mut seen = BTreeSet::new();
    diags.into_iter().filter(|d| seen.insert((d.span.line, d.span.col, d.code, d.message.clone()))).collect()
}

/// Causality diagnostics of every instant of `p`.
pub fn check_causality(p: &Statement) -> Vec<Diagnostic> {
    match instant_traces(p) {
        Ok(traces) => dedup(traces.iter().flat_map(|(t, _)| check_trace(t)).collect()),
        Err(d) => vec![d],
    }
}

/// Runs every check on an already flattened statement.
pub fn check_statement(p: &Statement) -> Result<CheckedProgram, Vec<Diagnostic>> {
    let (body, vars) = uniquify(p);
    let mut diags = check_types(&body, &vars);
    diags.extend(check_instantaneous_loop(&body));
    diags.extend(check_space_bodies(&body));
    if diags.is_empty() {
        diags.extend(check_causality(&body));
    }
    let diags = dedup(diags);
    if diags.iter().any(Diagnostic::is_error) {
        Err(diags)
    } else {
        Ok(CheckedProgram { body, vars })
    }
}

/// Inlines `entry` and checks the result.
pub fn check_program(program: &Program, entry: &str) -> Result<CheckedProgram, Vec<Diagnostic>> {
    let flat = inline_processes(program, entry).map_err(|e| vec![Diagnostic::from(&e)])?;
    check_statement(&flat)
}
