//! Symbolic execution of one instant.
//!
//! `surf(p)` describes the instants that start `p`, `res(p)` the instants
//! that resume `p` from one of its pause points. Each outcome pairs a trace of
//! atoms with a completion code. Traces keep the series-parallel structure of
//! the program so that program order can be read off them.

use std::fmt;
use std::rc::Rc;

use crate::ast::{rename_free, AccessAnnotation, HostCall, Init, Operand, Span, Statement, TellExpr, VarRef};

use super::types::display_name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Completion {
    Term,
    Pause,
    Stop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    /// Guard `left |= right`.
    Entail { left: Operand, right: Operand, span: Span },
    /// Host call, tell or declaration; only variable arguments are kept.
    Call { func: String, args: Vec<(VarRef, AccessAnnotation)>, span: Span },
}

impl Atom {
    pub fn span(&self) -> Span {
        match self {
            Atom::Entail { span, .. } | Atom::Call { span, .. } => *span,
        }
    }

    /// Variables and the way the atom touches them.
    pub fn accesses(&self) -> Vec<(&VarRef, Access)> {
        match self {
            Atom::Entail { left, right, .. } => {
                let mut out = Vec::new();
                if let Some(v) = left.var() {
                    out.push((v, Access::GuardLeft));
                }
                if let Some(v) = right.var() {
                    out.push((v, Access::GuardRight));
                }
                out
            }
            Atom::Call { args, .. } => args
                .iter()
                .map(|(v, a)| {
                    let acc = match a {
                        AccessAnnotation::Read => Access::Read,
                        AccessAnnotation::Write => Access::Write,
                        AccessAnnotation::ReadWrite => Access::ReadWrite,
                    };
                    (v, acc)
                })
                .collect(),
        }
    }
}

fn shown(v: &VarRef) -> String {
    match v {
        VarRef::Name(n) => display_name(n).to_string(),
        VarRef::Loc(l) => l.to_string(),
    }
}

fn shown_operand(o: &Operand) -> String {
    match o {
        Operand::Var(v) => shown(v),
        Operand::Lit(l) => l.to_string(),
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Entail { left, right, .. } => write!(f, "{} |= {}", shown_operand(left), shown_operand(right)),
            Atom::Call { func, args, .. } => {
                write!(f, "{func}(")?;
                for (i, (v, a)) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}^{}", shown(v), a.suffix())?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Access {
    Read,
    Write,
    ReadWrite,
    GuardLeft,
    GuardRight,
}

#[derive(Debug)]
pub enum Trace {
    Empty,
    Atom(Atom),
    Seq(Rc<Trace>, Rc<Trace>),
    Par(Rc<Trace>, Rc<Trace>),
}

impl Trace {
    fn seq(a: &Rc<Trace>, b: &Rc<Trace>) -> Rc<Trace> {
        match (&**a, &**b) {
            (Trace::Empty, _) => b.clone(),
            (_, Trace::Empty) => a.clone(),
            _ => Rc::new(Trace::Seq(a.clone(), b.clone())),
        }
    }

    fn par(a: &Rc<Trace>, b: &Rc<Trace>) -> Rc<Trace> {
        match (&**a, &**b) {
            (Trace::Empty, _) => b.clone(),
            (_, Trace::Empty) => a.clone(),
            _ => Rc::new(Trace::Par(a.clone(), b.clone())),
        }
    }

    /// Atoms in a linear order compatible with program order, each with the
    /// position of its leaf in the trace tree.
    pub fn atoms(&self) -> Vec<(&Atom, Vec<(bool, u8)>)> {
        fn go<'a>(t: &'a Trace, pos: &mut Vec<(bool, u8)>, out: &mut Vec<(&'a Atom, Vec<(bool, u8)>)>) {
            match t {
                Trace::Empty => {}
                Trace::Atom(a) => out.push((a, pos.clone())),
                Trace::Seq(a, b) | Trace::Par(a, b) => {
                    let seq = matches!(t, Trace::Seq(..));
                    pos.push((seq, 0));
                    go(a, pos, out);
                    pos.pop();
                    pos.push((seq, 1));
                    go(b, pos, out);
                    pos.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

/// Whether the leaf at `a` comes before the leaf at `b` in program order.
pub fn before(a: &[(bool, u8)], b: &[(bool, u8)]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x.0 && x.1 == 0 && y.1 == 1;
        }
    }
    false
}

pub type Outcome = (Rc<Trace>, Completion);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TooComplex;

pub struct Explorer {
    limit: usize,
    generation: usize,
}

fn atom(a: Atom) -> Rc<Trace> {
    Rc::new(Trace::Atom(a))
}

fn call_args(c: &HostCall) -> Vec<(VarRef, AccessAnnotation)> {
    c.args.iter().filter_map(|a| a.operand.var().map(|v| (v.clone(), a.access))).collect()
}

fn empty() -> Rc<Trace> {
    Rc::new(Trace::Empty)
}

impl Explorer {
    pub fn new(limit: usize) -> Explorer {
        Explorer { limit, generation: 0 }
    }

    fn check(&self, v: Vec<Outcome>) -> Result<Vec<Outcome>, TooComplex> {
        if v.len() > self.limit {
            Err(TooComplex)
        } else {
            Ok(v)
        }
    }

    fn then(&self, first: Vec<Outcome>, next: &[Outcome]) -> Result<Vec<Outcome>, TooComplex> {
        let mut out = Vec::new();
        for (t, k) in first {
            if k == Completion::Term {
                if out.len() + next.len() > self.limit {
                    return Err(TooComplex);
                }
                for (t2, k2) in next {
                    out.push((Trace::seq(&t, t2), *k2));
                }
            } else {
                out.push((t, k));
            }
        }
        self.check(out)
    }

    fn product(&self, a: &[Outcome], b: &[Outcome]) -> Result<Vec<Outcome>, TooComplex> {
        if a.len().saturating_mul(b.len()) > self.limit {
            return Err(TooComplex);
        }
        let mut out = Vec::new();
        for (t1, k1) in a {
            for (t2, k2) in b {
                out.push((Trace::par(t1, t2), (*k1).max(*k2)));
            }
        }
        Ok(out)
    }

    fn decl_atom(p: &Statement) -> Rc<Trace> {
        let Statement::VarDecl { var, init, span, .. } = p else { unreachable!() };
        let (func, mut args) = match init {
            Init::Lit(_) => ("init".to_string(), vec![]),
            Init::Var(v) => ("init".to_string(), vec![(v.clone(), AccessAnnotation::Read)]),
            Init::Call(c) => (c.func.clone(), call_args(c)),
        };
        args.push((var.clone(), AccessAnnotation::Write));
        atom(Atom::Call { func, args, span: *span })
    }

    // A fresh copy of a loop body whose declarations do not clash with the
    // previous iteration.
    fn reincarnate(&mut self, body: &Statement) -> Statement {
        self.generation += 1;
        let g = self.generation;
        fn go(p: &mut Statement, g: usize) {
            if let Statement::VarDecl { var: var @ VarRef::Name(_), body, .. } = p {
                let old = var.clone();
                let new = VarRef::Name(format!("{}'{g}", old.as_name().unwrap_or_default()));
                rename_free(body, &old, &new);
                *var = new;
            }
            match p {
                Statement::VarDecl { body, .. } | Statement::Loop(body, _) | Statement::Space(body, _) => go(body, g),
                Statement::When { then, els, .. } => {
                    go(then, g);
                    go(els, g);
                }
                Statement::Seq(a, b) | Statement::ParOr(a, b) | Statement::ParAnd(a, b) => {
                    go(a, g);
                    go(b, g);
                }
                _ => {}
            }
        }
        let mut b = body.clone();
        go(&mut b, g);
        b
    }

    pub fn surf(&mut self, p: &Statement) -> Result<Vec<Outcome>, TooComplex> {
        use Completion::*;
        Ok(match p {
            Statement::Nothing | Statement::Prune | Statement::Space(..) => vec![(empty(), Term)],
            Statement::Pause => vec![(empty(), Pause)],
            Statement::Stop => vec![(empty(), Stop)],
            Statement::Call(c) => {
                vec![(atom(Atom::Call { func: c.func.clone(), args: call_args(c), span: c.span }), Term)]
            }
            Statement::Tell { target, expr, span } => {
                let (func, mut args) = match expr {
                    TellExpr::Lit(_) => ("join_into".to_string(), vec![]),
                    TellExpr::Var(v) => ("join_into".to_string(), vec![(v.clone(), AccessAnnotation::Read)]),
                    TellExpr::Call(c) => (c.func.clone(), call_args(c)),
                };
                args.push((target.clone(), AccessAnnotation::Write));
                vec![(atom(Atom::Call { func, args, span: *span }), Term)]
            }
            Statement::VarDecl { body, .. } => {
                let a = Self::decl_atom(p);
                let b = self.surf(body)?;
                b.into_iter().map(|(t, k)| (Trace::seq(&a, &t), k)).collect()
            }
            Statement::When { left, right, then, els, span } => {
                let yes = atom(Atom::Entail { left: left.clone(), right: right.clone(), span: *span });
                let no = atom(Atom::Entail { left: right.clone(), right: left.clone(), span: *span });
                let mut out: Vec<Outcome> =
                    self.surf(then)?.into_iter().map(|(t, k)| (Trace::seq(&yes, &t), k)).collect();
                out.extend(self.surf(els)?.into_iter().map(|(t, k)| (Trace::seq(&no, &t), k)));
                self.check(out)?
            }
            Statement::Seq(a, b) => {
                let first = self.surf(a)?;
                let next = if first.iter().any(|(_, k)| *k == Term) { self.surf(b)? } else { vec![] };
                self.then(first, &next)?
            }
            Statement::Loop(b, _) => self.surf(b)?,
            Statement::ParOr(a, b) | Statement::ParAnd(a, b) => {
                let (x, y) = (self.surf(a)?, self.surf(b)?);
                self.product(&x, &y)?
            }
            Statement::Run { .. } => vec![(empty(), Term)],
        })
    }

    fn can_terminate(&mut self, p: &Statement) -> Result<bool, TooComplex> {
        Ok(self.surf(p)?.iter().chain(self.res(p)?.iter()).any(|(_, k)| *k == Completion::Term))
    }

    pub fn res(&mut self, p: &Statement) -> Result<Vec<Outcome>, TooComplex> {
        use Completion::*;
        Ok(match p {
            Statement::Pause => vec![(empty(), Term)],
            Statement::VarDecl { st, body, .. } => {
                let inner = self.res(body)?;
                if *st == crate::ast::SpacetimeAnnotation::SingleTime {
                    let a = Self::decl_atom(p);
                    inner.into_iter().map(|(t, k)| (Trace::seq(&a, &t), k)).collect()
                } else {
                    inner
                }
            }
            Statement::When { then, els, .. } => {
                let mut out = self.res(then)?;
                out.extend(self.res(els)?);
                self.check(out)?
            }
            Statement::Seq(a, b) => {
                let first = self.res(a)?;
                let next = if first.iter().any(|(_, k)| *k == Term) { self.surf(b)? } else { vec![] };
                let mut out = self.then(first, &next)?;
                out.extend(self.res(b)?);
                self.check(out)?
            }
            Statement::Loop(b, _) => {
                let first = self.res(b)?;
                let again = self.reincarnate(b);
                let next = if first.iter().any(|(_, k)| *k == Term) { self.surf(&again)? } else { vec![] };
                self.then(first, &next)?
            }
            Statement::ParOr(a, b) => {
                let mut x = self.res(a)?;
                if self.can_terminate(a)? {
                    x.push((empty(), Term));
                }
                let mut y = self.res(b)?;
                if self.can_terminate(b)? {
                    y.push((empty(), Term));
                }
                self.product(&x, &y)?
            }
            Statement::ParAnd(a, b) => {
                let (x, y) = (self.res(a)?, self.res(b)?);
                let mut out = self.product(&x, &y)?;
                // The instant after one side completed.
                out.push((empty(), Term));
                out
            }
            _ => vec![],
        })
    }
}

/// Bodies of every `space` in `p`.
pub fn space_bodies(p: &Statement) -> Vec<&Statement> {
    let mut out = Vec::new();
    fn go<'a>(p: &'a Statement, out: &mut Vec<&'a Statement>) {
        if let Statement::Space(b, _) = p {
            out.push(&**b);
        }
        for c in p.children() {
            go(c, out);
        }
    }
    go(p, &mut out);
    out
}
