//! Static upper bounds on the accesses left in the current instant.

use std::collections::HashMap;

use crate::ast::{AccessAnnotation, HostCall, Init, Statement, TellExpr, VarRef};

use super::space::Counters;

pub type Counts = HashMap<VarRef, Counters>;

pub fn add_access(c: &mut Counts, v: &VarRef, a: AccessAnnotation) {
    let e = c.entry(v.clone()).or_default();
    match a {
        AccessAnnotation::Read => e.r += 1,
        AccessAnnotation::Write => e.w += 1,
        AccessAnnotation::ReadWrite => e.rw += 1,
    }
}

pub fn add_counts(into: &mut Counts, from: &Counts) {
    for (v, c) in from {
        let e = into.entry(v.clone()).or_default();
        e.w += c.w;
        e.rw += c.rw;
        e.r += c.r;
    }
}

pub fn call_accesses(c: &HostCall, out: &mut Counts) {
    for a in &c.args {
        if let Some(v) = a.operand.var() {
            add_access(out, v, a.access);
        }
    }
}

/// Accesses of an atomic statement (call, tell, or declaration initializer).
pub fn atom_accesses(s: &Statement) -> Counts {
    let mut out = Counts::new();
    match s {
        Statement::Call(c) => call_accesses(c, &mut out),
        Statement::Tell { target, expr, .. } => {
            add_access(&mut out, target, AccessAnnotation::Write);
            match expr {
                TellExpr::Lit(_) => {}
                TellExpr::Var(v) => add_access(&mut out, v, AccessAnnotation::Read),
                TellExpr::Call(c) => call_accesses(c, &mut out),
            }
        }
        Statement::VarDecl { init, .. } => match init {
            Init::Lit(_) => {}
            Init::Var(v) => add_access(&mut out, v, AccessAnnotation::Read),
            Init::Call(c) => call_accesses(c, &mut out),
        },
        _ => {}
    }
    out
}

/// Accesses reachable in the first instant of `s`, and whether that
/// instant can terminate `s`. Guards are not counted; `space` bodies run
/// after the instant and are not counted either.
pub fn reach(s: &Statement, out: &mut Counts) -> bool {
    match s {
        Statement::Call(_) | Statement::Tell { .. } => {
            add_counts(out, &atom_accesses(s));
            true
        }
        Statement::VarDecl { body, .. } => {
            add_counts(out, &atom_accesses(s));
            reach(body, out)
        }
        Statement::When { then, els, .. } => {
            let a = reach(then, out);
            let b = reach(els, out);
            a || b
        }
        Statement::Seq(a, b) => reach(a, out) && reach(b, out),
        Statement::Loop(b, _) => {
            reach(b, out);
            false
        }
        Statement::ParOr(a, b) | Statement::ParAnd(a, b) => {
            let x = reach(a, out);
            let y = reach(b, out);
            x && y
        }
        Statement::Pause | Statement::Stop => false,
        Statement::Nothing | Statement::Prune | Statement::Space(..) | Statement::Run { .. } => true,
    }
}

/// Whether the first instant of `s` can terminate it.
pub fn can_terminate(s: &Statement) -> bool {
    crate::analysis::first_codes(s).contains(&crate::analysis::Completion::Term)
}

/// The can-analysis on a statement about to start.
pub fn can_analysis(s: &Statement) -> Counts {
    let mut out = Counts::new();
    reach(s, &mut out);
    out
}
