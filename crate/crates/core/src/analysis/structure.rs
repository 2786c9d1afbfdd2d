//! Structural checks: loops must not be instantaneous, `space` bodies must
//! be instantaneous, flat and write only world-line variables.

use std::collections::BTreeSet;

use crate::ast::{SpacetimeAnnotation, Statement, TellExpr, VarRef};

use super::paths::Completion;
use super::Diagnostic;

/// Completion codes `p` can end its first instant with.
pub fn first_codes(p: &Statement) -> BTreeSet<Completion> {
    use Completion::*;
    match p {
        Statement::Pause => [Pause].into(),
        Statement::Stop => [Stop].into(),
        Statement::VarDecl { body, .. } => first_codes(body),
        Statement::When { then, els, .. } => {
            let mut s = first_codes(then);
            s.extend(first_codes(els));
            s
        }
        Statement::Seq(a, b) => {
            let mut s = first_codes(a);
            if s.remove(&Term) {
                s.extend(first_codes(b));
            }
            s
        }
        Statement::Loop(b, _) => {
            let mut s = first_codes(b);
            s.remove(&Term);
            s
        }
        Statement::ParOr(a, b) | Statement::ParAnd(a, b) => {
            let (x, y) = (first_codes(a), first_codes(b));
            x.iter().flat_map(|i| y.iter().map(move |j| *i.max(j))).collect()
        }
        _ => [Term].into(),
    }
}

/// Loops whose body may terminate within the instant it started.
pub fn check_instantaneous_loop(p: &Statement) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    p.walk(&mut |s| {
        if let Statement::Loop(b, span) = s {
            if first_codes(b).contains(&Completion::Term) {
                out.push(Diagnostic::error(
                    "E-LOOP-0",
                    *span,
                    "loop body can terminate in the instant it starts; add a `pause` on every path".into(),
                ));
            }
        }
    });
    out
}

/// Checks every `space` body of `p`.
pub fn check_space_bodies(p: &Statement) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut env = Vec::new();
    go(p, &mut env, &mut out);
    out
}

fn go<'a>(p: &'a Statement, env: &mut Vec<(&'a VarRef, SpacetimeAnnotation)>, out: &mut Vec<Diagnostic>) {
    match p {
        Statement::VarDecl { var, st, body, .. } => {
            env.push((var, *st));
            go(body, env, out);
            env.pop();
        }
        Statement::Space(body, span) => {
            if first_codes(body) != [Completion::Term].into() {
                out.push(Diagnostic::error("E-SPACE-PAUSE", *span, "space body must be instantaneous".into()));
            }
            body.walk(&mut |s| {
                let bad = |what: &str| format!("space body must not contain {what}");
                let lookup = |v: &VarRef| env.iter().rev().find(|(w, _)| *w == v).map(|(_, st)| *st);
                let mut written = Vec::new();
                match s {
                    Statement::Space(_, sp) => out.push(Diagnostic::error("E-SPACE-NESTED", *sp, bad("a nested space"))),
                    Statement::Prune => out.push(Diagnostic::error("E-SPACE-NESTED", *span, bad("prune"))),
                    Statement::Pause | Statement::Stop | Statement::Loop(..) => {}
                    Statement::VarDecl { span: sp, .. } => {
                        out.push(Diagnostic::error("E-SPACE-DECL", *sp, bad("variable declarations")))
                    }
                    Statement::Call(c) => {
                        written.extend(c.args.iter().filter(|a| a.access.writes()).filter_map(|a| a.operand.var()))
                    }
                    Statement::Tell { target, expr, .. } => {
                        written.push(target);
                        if let TellExpr::Call(c) = expr {
                            written.extend(c.args.iter().filter(|a| a.access.writes()).filter_map(|a| a.operand.var()));
                        }
                    }
                    _ => {}
                }
                for v in written {
                    if let Some(st) = lookup(v).filter(|st| *st != SpacetimeAnnotation::WorldLine) {
                        out.push(Diagnostic::error(
                            "E-SPACE-WRITE",
                            *span,
                            format!(
                                "space body writes `{}`, a {} variable; only world_line variables travel with a branch",
                                super::types::display_name(v.as_name().unwrap_or_default()),
                                st.keyword()
                            ),
                        ));
                    }
                }
            });
        }
        _ => {
            for c in p.children() {
                go(c, env, out);
            }
        }
    }
}
