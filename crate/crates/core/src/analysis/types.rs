//! Scope and type checking, plus the unique renaming used by later passes.

use std::collections::BTreeMap;

use crate::ast::{
    rename_free, AccessAnnotation, HostCall, Init, Literal, Operand, SpacetimeAnnotation, Span, Statement, TellExpr,
    VarRef,
};
use crate::host::{Builtin, ParamType};
use crate::lattice::LatticeType;

use super::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarInfo {
    pub ty: LatticeType,
    pub st: SpacetimeAnnotation,
    pub span: Span,
}

/// Separator between a source name and its unique suffix.
pub const UNIQUE_SEP: char = '%';

/// Source name of a uniquely renamed variable.
pub fn display_name(n: &str) -> &str {
    let n = n.split(UNIQUE_SEP).next().unwrap_or(n);
    n.split('#').next().unwrap_or(n)
}

/// Renames every declaration to a unique name and records its type.
pub fn uniquify(p: &Statement) -> (Statement, BTreeMap<String, VarInfo>) {
    fn go(p: &mut Statement, k: &mut usize, vars: &mut BTreeMap<String, VarInfo>) {
        if let Statement::VarDecl { ty, var: var @ VarRef::Name(_), st, body, span, .. } = p {
            *k += 1;
            let old = var.clone();
            let new = format!("{}{UNIQUE_SEP}{k}", old.as_name().unwrap_or_default());
            rename_free(body, &old, &VarRef::Name(new.clone()));
            vars.insert(new.clone(), VarInfo { ty: *ty, st: *st, span: *span });
            *var = VarRef::Name(new);
        }
        match p {
            Statement::VarDecl { body, .. } | Statement::Loop(body, _) | Statement::Space(body, _) => go(body, k, vars),
            Statement::When { then, els, .. } => {
                go(then, k, vars);
                go(els, k, vars);
            }
            Statement::Seq(a, b) | Statement::ParOr(a, b) | Statement::ParAnd(a, b) => {
                go(a, k, vars);
                go(b, k, vars);
            }
            _ => {}
        }
    }
    let mut out = p.clone();
    let mut vars = BTreeMap::new();
    go(&mut out, &mut 0, &mut vars);
    (out, vars)
}

struct Checker<'a> {
    vars: &'a BTreeMap<String, VarInfo>,
    diags: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn err(&mut self, code: &'static str, span: Span, message: String) {
        self.diags.push(Diagnostic::error(code, span, message));
    }

    fn lookup(&mut self, v: &VarRef, span: Span) -> Option<VarInfo> {
        match v {
            VarRef::Name(n) => match self.vars.get(n) {
                Some(info) => Some(*info),
                None => {
                    self.err("E-SCOPE", span, format!("undeclared variable `{}`", display_name(n)));
                    None
                }
            },
            VarRef::Loc(l) => {
                self.err("E-SCOPE", span, format!("location {l} cannot appear in source"));
                None
            }
        }
    }

    fn literal_at(&mut self, l: &Literal, ty: LatticeType, span: Span) {
        if l.value_at(ty, &Default::default()).is_none() {
            self.err("E-TYPE", span, format!("constant `{l}` is not a {ty} value"));
        }
    }

    fn operand_type(&mut self, o: &Operand, span: Span) -> Option<LatticeType> {
        match o {
            Operand::Var(v) => self.lookup(v, span).map(|i| i.ty),
            Operand::Lit(l) => l.own_type(),
        }
    }

    /// Checks a call and returns its builtin.
    fn call(&mut self, c: &HostCall) -> Option<Builtin> {
        let b = match c.func.parse::<Builtin>() {
            Ok(b) => b,
            Err(msg) => {
                self.err("E-HOST", c.span, msg);
                return None;
            }
        };
        let sig = b.signature();
        if sig.params.len() != c.args.len() {
            self.err(
                "E-HOST",
                c.span,
                format!("`{}` expects {} argument(s), got {}", c.func, sig.params.len(), c.args.len()),
            );
            return Some(b);
        }
        let mut first: Option<LatticeType> = None;
        for (i, (param, arg)) in sig.params.iter().zip(&c.args).enumerate() {
            let expected = match param.ty {
                ParamType::Exact(t) => Some(t),
                ParamType::Any => None,
                ParamType::SameAsFirst => first,
            };
            match &arg.operand {
                Operand::Lit(l) => {
                    if param.access != AccessAnnotation::Read {
                        self.err(
                            "E-ACCESS",
                            c.span,
                            format!("argument {} of `{}` is written and cannot be a constant", i + 1, c.func),
                        );
                    }
                    match expected.or(l.own_type()) {
                        Some(t) => self.literal_at(l, t, c.span),
                        None => self.err("E-TYPE", c.span, format!("cannot infer the type of constant `{l}`")),
                    }
                }
                Operand::Var(v) => {
                    let Some(info) = self.lookup(v, c.span) else { continue };
                    if i == 0 {
                        first = Some(info.ty);
                    }
                    if let Some(t) = expected {
                        if t != info.ty {
                            self.err(
                                "E-TYPE",
                                c.span,
                                format!("argument {} of `{}` must be {t}, `{v}` is {}", i + 1, c.func, info.ty, v = display(v)),
                            );
                        }
                    }
                    if arg.access != param.access {
                        self.err(
                            "E-ACCESS",
                            c.span,
                            format!(
                                "argument {} of `{}` must be annotated `{}`, found `{}`",
                                i + 1,
                                c.func,
                                param.access.suffix(),
                                arg.access.suffix()
                            ),
                        );
                    }
                }
            }
        }
        Some(b)
    }

    fn stmt(&mut self, p: &Statement) {
        match p {
            Statement::VarDecl { ty, init, body, span, .. } => {
                match init {
                    Init::Lit(l) => self.literal_at(l, *ty, *span),
                    Init::Var(v) => {
                        if let Some(info) = self.lookup(v, *span) {
                            if info.ty != *ty {
                                self.err("E-TYPE", *span, format!("cannot initialize a {ty} from a {}", info.ty));
                            }
                        }
                    }
                    Init::Call(c) => {
                        if let Some(b) = self.call(c) {
                            match b.signature().ret {
                                Some(r) if r == *ty => {}
                                Some(r) => self.err("E-TYPE", *span, format!("`{}` returns {r}, not {ty}", c.func)),
                                None => self.err("E-TYPE", *span, format!("`{}` returns no value", c.func)),
                            }
                        }
                    }
                }
                self.stmt(body);
            }
            Statement::When { left, right, then, els, span } => {
                let (lt, rt) = (self.operand_type(left, *span), self.operand_type(right, *span));
                match (lt, rt) {
                    (Some(a), Some(b)) if a != b => {
                        self.err("E-TYPE", *span, format!("cannot compare {a} with {b}"));
                    }
                    (Some(t), None) | (None, Some(t)) => {
                        for o in [left, right] {
                            if let Operand::Lit(l) = o {
                                self.literal_at(l, t, *span);
                            }
                        }
                    }
                    (None, None) if left.var().is_none() && right.var().is_none() => {
                        self.err("E-TYPE", *span, "an entailment needs at least one variable".into());
                    }
                    _ => {}
                }
                self.stmt(then);
                self.stmt(els);
            }
            Statement::Call(c) => {
                self.call(c);
            }
            Statement::Tell { target, expr, span } => {
                let Some(info) = self.lookup(target, *span) else { return };
                match expr {
                    TellExpr::Lit(l) => self.literal_at(l, info.ty, *span),
                    TellExpr::Var(v) => {
                        if let Some(src) = self.lookup(v, *span) {
                            if src.ty != info.ty {
                                self.err("E-TYPE", *span, format!("cannot join a {} into a {}", src.ty, info.ty));
                            }
                        }
                    }
                    TellExpr::Call(c) => {
                        if let Some(b) = self.call(c) {
                            match b.signature().ret {
                                Some(r) if r == info.ty => {}
                                Some(r) => {
                                    self.err("E-TYPE", *span, format!("`{}` returns {r}, not {}", c.func, info.ty))
                                }
                                None => self.err("E-TYPE", *span, format!("`{}` returns no value", c.func)),
                            }
                        }
                    }
                }
            }
            Statement::Run { name, span, .. } => {
                self.err("E-SCOPE", *span, format!("unresolved process call `{name}`"));
            }
            _ => {
                for c in p.children() {
                    self.stmt(c);
                }
            }
        }
    }
}

fn display(v: &VarRef) -> String {
    match v {
        VarRef::Name(n) => display_name(n).to_string(),
        VarRef::Loc(l) => l.to_string(),
    }
}

/// Type-checks a uniquely renamed statement.
pub fn check_types(p: &Statement, vars: &BTreeMap<String, VarInfo>) -> Vec<Diagnostic> {
    let mut c = Checker { vars, diags: Vec::new() };
    c.stmt(p);
    c.diags
}
