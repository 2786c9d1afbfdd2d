//! Execution of one instant.
//!
//! The residual program is unfolded into a tree of running statements.
//! Every round recomputes the access counters of what is left, then steps
//! every thread as far as its next blocked access. An access is blocked
//! while an access it must follow is still pending; a guard is blocked
//! until its outcome can no longer change.

use std::collections::BTreeSet;
use std::mem;

use crate::analysis::Completion;
use crate::ast::{
    rename_free, HostCall, Init, Literal, Operand, SpacetimeAnnotation, Span, Statement, TellExpr,
    VarRef,
};
use crate::branch::{Branch, BranchLabel, BranchSeq};
use crate::host::{self, Builtin, HostCtx, ParamType};
use crate::lattice::{EntailResult, Es, Lattice, LatticeConfig, LatticeType, LatticeValue, Location, Store};

use super::counting::{add_counts, atom_accesses, can_terminate, reach, Counts};
use super::space::{Counters, Space, VarCell};
use super::RuntimeError;

/// Bodies of the `space` statements merged into one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Deferred(pub Vec<Statement>);

impl BranchLabel for Deferred {
    fn merge(&self, other: &Self) -> Self {
        Deferred(self.0.iter().chain(&other.0).cloned().collect())
    }
}

/// Result of one instant of a statement.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: Completion,
    pub residual: Statement,
    pub branches: BranchSeq<Deferred>,
}

enum Act {
    Todo(Statement),
    Guard { left: Operand, right: Operand, then: Statement, els: Statement },
    Seq { first: Box<Act>, rest: Statement },
    After { prefix: BranchSeq<Deferred>, inner: Box<Act> },
    Par { and: bool, a: Box<Act>, b: Box<Act> },
    Loop { body: Box<Act>, orig: Statement, span: Span, prefix: Option<BranchSeq<Deferred>> },
    Decl { loc: Location, name: String, ty: LatticeType, st: SpacetimeAnnotation, init: Init, span: Span, body: Box<Act> },
    Done(Outcome),
}

fn done(code: Completion, residual: Statement, branches: BranchSeq<Deferred>) -> Act {
    Act::Done(Outcome { code, residual, branches })
}

fn take(act: &mut Act) -> Act {
    mem::replace(act, done(Completion::Term, Statement::Nothing, BranchSeq::empty()))
}

fn act_can_terminate(act: &Act) -> bool {
    match act {
        Act::Todo(s) => can_terminate(s),
        Act::Guard { then, els, .. } => can_terminate(then) || can_terminate(els),
        Act::Seq { first, rest } => act_can_terminate(first) && can_terminate(rest),
        Act::After { inner, .. } => act_can_terminate(inner),
        Act::Par { a, b, .. } => act_can_terminate(a) && act_can_terminate(b),
        Act::Loop { .. } => false,
        Act::Decl { body, .. } => act_can_terminate(body),
        Act::Done(o) => o.code == Completion::Term,
    }
}

/// Accesses still pending in `act`; returns whether `act` can terminate.
fn count_act(act: &Act, out: &mut Counts) -> bool {
    match act {
        Act::Todo(s) => reach(s, out),
        Act::Guard { then, els, .. } => {
            let a = reach(then, out);
            let b = reach(els, out);
            a || b
        }
        Act::Seq { first, rest } => count_act(first, out) && reach(rest, out),
        Act::After { inner, .. } => count_act(inner, out),
        Act::Par { a, b, .. } => {
            let x = count_act(a, out);
            let y = count_act(b, out);
            x && y
        }
        Act::Loop { body, orig, .. } => {
            if count_act(body, out) {
                reach(orig, out);
            }
            false
        }
        Act::Decl { body, .. } => count_act(body, out),
        Act::Done(o) => o.code == Completion::Term,
    }
}

/// Locations referenced by `s`.
pub fn locations(s: &Statement) -> BTreeSet<Location> {
    fn op(o: &Operand, out: &mut BTreeSet<Location>) {
        if let Operand::Var(VarRef::Loc(l)) = o {
            out.insert(*l);
        }
    }
    fn var(v: &VarRef, out: &mut BTreeSet<Location>) {
        if let VarRef::Loc(l) = v {
            out.insert(*l);
        }
    }
    fn call(c: &HostCall, out: &mut BTreeSet<Location>) {
        for a in &c.args {
            op(&a.operand, out);
        }
    }
    let mut out = BTreeSet::new();
    s.walk(&mut |s| match s {
        Statement::VarDecl { init, .. } => match init {
            Init::Lit(_) => {}
            Init::Var(v) => var(v, &mut out),
            Init::Call(c) => call(c, &mut out),
        },
        Statement::When { left, right, .. } => {
            op(left, &mut out);
            op(right, &mut out);
        }
        Statement::Call(c) => call(c, &mut out),
        Statement::Tell { target, expr, .. } => {
            var(target, &mut out);
            match expr {
                TellExpr::Lit(_) => {}
                TellExpr::Var(v) => var(v, &mut out),
                TellExpr::Call(c) => call(c, &mut out),
            }
        }
        _ => {}
    });
    out
}

/// State of one running instant.
pub struct Instant<'a> {
    pub space: &'a mut Space,
    pub cfg: LatticeConfig,
    pub ctx: HostCtx<'a>,
    /// Join of the statuses reported by solver built-ins.
    pub status: Option<Es>,
    /// Objective value of the last solution found by propagation.
    pub objective: Option<i64>,
    /// Rounds of scheduling used so far.
    pub rounds: usize,
    progress: bool,
}

impl<'a> Instant<'a> {
    pub fn new(space: &'a mut Space, cfg: LatticeConfig, ctx: HostCtx<'a>) -> Instant<'a> {
        Instant { space, cfg, ctx, status: None, objective: None, rounds: 0, progress: false }
    }

    /// Runs `p` until every thread has completed for this instant.
    pub fn run(&mut self, p: Statement) -> Result<Outcome, RuntimeError> {
        let mut act = Act::Todo(p);
        loop {
            self.recount(&act);
            self.progress = false;
            self.rounds += 1;
            self.step(&mut act, &Counts::new())?;
            if let Act::Done(o) = act {
                return Ok(o);
            }
            if !self.progress {
                return Err(RuntimeError::Stuck(self.blocked(&act)));
            }
        }
    }

    fn blocked(&self, act: &Act) -> String {
        fn go(act: &Act, out: &mut Vec<String>) {
            match act {
                Act::Todo(s) => out.push(crate::ast::pretty_statement(s).lines().next().unwrap_or("").to_string()),
                Act::Guard { left, right, .. } => out.push(format!("when {left} |= {right}")),
                Act::Seq { first, .. } => go(first, out),
                Act::After { inner, .. } | Act::Loop { body: inner, .. } | Act::Decl { body: inner, .. } => {
                    go(inner, out)
                }
                Act::Par { a, b, .. } => {
                    go(a, out);
                    go(b, out);
                }
                Act::Done(_) => {}
            }
        }
        let mut out = Vec::new();
        go(act, &mut out);
        out.join("; ")
    }

    /// The can-analysis on the statements left in this instant.
    fn recount(&mut self, act: &Act) {
        let mut counts = Counts::new();
        count_act(act, &mut counts);
        for cell in self.space.cells.values_mut() {
            cell.counters = Counters::default();
        }
        for (v, c) in counts {
            if let VarRef::Loc(l) = v {
                if let Some(cell) = self.space.get_mut(l) {
                    cell.counters = c;
                }
            }
        }
    }

    fn cell(&self, v: &VarRef) -> Result<&VarCell, RuntimeError> {
        match v {
            VarRef::Loc(l) => self.space.get(*l).ok_or_else(|| RuntimeError::Unbound(l.to_string())),
            VarRef::Name(n) => Err(RuntimeError::Unbound(n.clone())),
        }
    }

    fn ready(&self, acc: &Counts) -> Result<bool, RuntimeError> {
        for (v, c) in acc {
            let cell = self.cell(v)?;
            if c.r > 0 && (cell.counters.w > 0 || cell.counters.rw > 0) {
                return Ok(false);
            }
            if c.rw > 0 && cell.counters.w > 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn consume(&mut self, acc: &Counts) {
        for (v, c) in acc {
            if let VarRef::Loc(l) = v {
                if let Some(cell) = self.space.get_mut(*l) {
                    cell.counters.w = cell.counters.w.saturating_sub(c.w);
                    cell.counters.rw = cell.counters.rw.saturating_sub(c.rw);
                    cell.counters.r = cell.counters.r.saturating_sub(c.r);
                }
            }
        }
    }

    fn join_into(&mut self, v: &VarRef, value: &LatticeValue) -> Result<(), RuntimeError> {
        let VarRef::Loc(l) = v else { return Err(RuntimeError::Unbound(v.to_string())) };
        let cell = self.space.get_mut(*l).ok_or_else(|| RuntimeError::Unbound(l.to_string()))?;
        cell.value.join_assign(value)?;
        Ok(())
    }

    fn literal(&self, l: &Literal, ty: LatticeType) -> Result<LatticeValue, RuntimeError> {
        l.value_at(ty, &self.cfg).ok_or_else(|| RuntimeError::Type(format!("constant `{l}` at type {ty}")))
    }

    /// Performs a host call whose accesses are ready; returns its result.
    fn call(&mut self, c: &HostCall) -> Result<Option<LatticeValue>, RuntimeError> {
        let b: Builtin = c.func.parse().map_err(RuntimeError::Type)?;
        let sig = b.signature();
        let mut args = Vec::with_capacity(c.args.len());
        for (param, arg) in sig.params.iter().zip(&c.args) {
            let v = match &arg.operand {
                Operand::Var(v) => self.cell(v)?.value.clone(),
                Operand::Lit(l) => {
                    let ty = match param.ty {
                        ParamType::Exact(t) => Some(t),
                        ParamType::SameAsFirst => args.first().map(LatticeValue::lattice_type),
                        ParamType::Any => l.own_type(),
                    };
                    let ty = ty.ok_or_else(|| RuntimeError::Type(format!("untyped constant `{l}`")))?;
                    self.literal(l, ty)?
                }
            };
            args.push(v);
        }
        let out = host::call(b, &args, &self.ctx)?;
        for (i, v) in &out.writes {
            if let Some(var) = c.args[*i].operand.var() {
                let var = var.clone();
                self.join_into(&var, v)?;
            }
        }
        if b.reports_status() {
            if let Some(LatticeValue::Es(e)) = &out.ret {
                self.status = Some(self.status.map_or(*e, |s| s.join(e)));
                if *e == Es::True && b == Builtin::Propagate {
                    self.objective = self.solution_objective(&c.args[0].operand);
                }
            }
        }
        Ok(out.ret)
    }

    fn solution_objective(&self, domains: &Operand) -> Option<i64> {
        let x = self.ctx.model?.objective?;
        let LatticeValue::VStore(d) = &self.cell(domains.var()?).ok()?.value else { return None };
        d.get(x)?.min()
    }

    /// Tries to run an atomic statement; returns false when blocked.
    fn atom(&mut self, s: &Statement) -> Result<bool, RuntimeError> {
        let acc = atom_accesses(s);
        if !self.ready(&acc)? {
            return Ok(false);
        }
        match s {
            Statement::Call(c) => {
                self.call(c)?;
            }
            Statement::Tell { target, expr, .. } => {
                let ty = self.cell(target)?.ty;
                let v = match expr {
                    TellExpr::Lit(l) => self.literal(l, ty)?,
                    TellExpr::Var(v) => self.cell(v)?.value.clone(),
                    TellExpr::Call(c) => {
                        self.call(c)?.ok_or_else(|| RuntimeError::Type(format!("`{}` returns no value", c.func)))?
                    }
                };
                self.join_into(target, &v)?;
            }
            _ => unreachable!("not an atom"),
        }
        self.consume(&acc);
        Ok(true)
    }

    fn declare(&mut self, s: Statement, cont: &Counts) -> Result<Act, RuntimeError> {
        let acc = atom_accesses(&s);
        if !self.ready(&acc)? {
            return Ok(Act::Todo(s));
        }
        let Statement::VarDecl { ty, var, st, init, body, span } = s else { unreachable!() };
        let value = match &init {
            Init::Lit(l) => self.literal(l, ty)?,
            Init::Var(v) => self.cell(v)?.value.clone(),
            Init::Call(c) => {
                self.call(c)?.ok_or_else(|| RuntimeError::Type(format!("`{}` returns no value", c.func)))?
            }
        };
        self.consume(&acc);
        let name = var.as_name().unwrap_or_default().to_string();
        let loc =
            self.space.alloc(VarCell { name: name.clone(), ty, spacetime: st, value, counters: Counters::default() });
        let body = crate::ast::substitute(&body, &name, loc);
        let mut c = Counts::new();
        reach(&body, &mut c);
        if let Some(cell) = self.space.get_mut(loc) {
            cell.counters = c.get(&VarRef::Loc(loc)).copied().unwrap_or_default();
        }
        let mut act = Act::Decl { loc, name, ty, st, init, span, body: Box::new(Act::Todo(body)) };
        self.step(&mut act, cont)?;
        Ok(act)
    }

    /// Decides a guard when its outcome is stable.
    fn decide(&self, left: &Operand, right: &Operand, cont: &Counts) -> Result<Option<bool>, RuntimeError> {
        let ty = match (left, right) {
            (Operand::Var(v), _) | (_, Operand::Var(v)) => self.cell(v)?.ty,
            _ => return Err(RuntimeError::Type("entailment between constants".into())),
        };
        let value = |o: &Operand| -> Result<LatticeValue, RuntimeError> {
            match o {
                Operand::Var(v) => Ok(self.cell(v)?.value.clone()),
                Operand::Lit(l) => self.literal(l, ty),
            }
        };
        // writes sequenced after the guard cannot affect it
        let pending = |o: &Operand| -> Result<u32, RuntimeError> {
            match o {
                Operand::Var(v) => {
                    let later = cont.get(v).map_or(0, Counters::writes);
                    Ok(self.cell(v)?.counters.writes().saturating_sub(later))
                }
                Operand::Lit(_) => Ok(0),
            }
        };
        let holds = value(left)?.entails(&value(right)?)? == EntailResult::True;
        let unstable = if holds { pending(right)? } else { pending(left)? };
        Ok(if unstable == 0 { Some(holds) } else { None })
    }

    fn start(&mut self, s: Statement, cont: &Counts) -> Result<Act, RuntimeError> {
        use Completion::*;
        let mut act = match s {
            Statement::Nothing => done(Term, Statement::Nothing, BranchSeq::empty()),
            Statement::Pause => done(Pause, Statement::Nothing, BranchSeq::empty()),
            Statement::Stop => done(Stop, Statement::Stop, BranchSeq::empty()),
            Statement::Prune => done(Term, Statement::Nothing, BranchSeq::one(Branch::Pruned)),
            Statement::Space(b, _) => {
                done(Term, Statement::Nothing, BranchSeq::one(Branch::Space(Deferred(vec![*b]))))
            }
            Statement::Call(_) | Statement::Tell { .. } => {
                if self.atom(&s)? {
                    done(Term, Statement::Nothing, BranchSeq::empty())
                } else {
                    return Ok(Act::Todo(s));
                }
            }
            Statement::VarDecl { .. } => {
                let act = self.declare(s, cont)?;
                if !matches!(act, Act::Todo(_)) {
                    self.progress = true;
                }
                return Ok(act);
            }
            Statement::When { left, right, then, els, .. } => Act::Guard { left, right, then: *then, els: *els },
            Statement::Seq(a, b) => Act::Seq { first: Box::new(Act::Todo(*a)), rest: *b },
            Statement::ParOr(a, b) => Act::Par { and: false, a: Box::new(Act::Todo(*a)), b: Box::new(Act::Todo(*b)) },
            Statement::ParAnd(a, b) => Act::Par { and: true, a: Box::new(Act::Todo(*a)), b: Box::new(Act::Todo(*b)) },
            Statement::Loop(b, span) => {
                Act::Loop { body: Box::new(Act::Todo((*b).clone())), orig: *b, span, prefix: None }
            }
            Statement::Run { name, .. } => return Err(RuntimeError::Type(format!("unresolved process `{name}`"))),
        };
        self.progress = true;
        if !matches!(act, Act::Done(_)) {
            self.step(&mut act, cont)?;
        }
        Ok(act)
    }

    fn step(&mut self, act: &mut Act, cont: &Counts) -> Result<(), RuntimeError> {
        match act {
            Act::Done(_) => {}
            Act::Todo(_) => {
                let Act::Todo(s) = take(act) else { unreachable!() };
                *act = self.start(s, cont)?;
            }
            Act::Guard { left, right, then, els, .. } => {
                let mut after = Counts::new();
                let t1 = reach(then, &mut after);
                let t2 = reach(els, &mut after);
                if t1 || t2 {
                    add_counts(&mut after, cont);
                }
                if let Some(holds) = self.decide(left, right, &after)? {
                    let chosen = mem::replace(if holds { then } else { els }, Statement::Nothing);
                    self.progress = true;
                    *act = self.start(chosen, cont)?;
                }
            }
            Act::Seq { first, rest } => {
                let mut after = Counts::new();
                if reach(rest, &mut after) {
                    add_counts(&mut after, cont);
                }
                self.step(first, &after)?;
                if let Act::Done(o) = &mut **first {
                    let o = mem::replace(o, Outcome { code: Completion::Term, residual: Statement::Nothing, branches: BranchSeq::empty() });
                    let rest = mem::replace(rest, Statement::Nothing);
                    if o.code == Completion::Term {
                        let inner = self.start(rest, cont)?;
                        *act = Act::After { prefix: o.branches, inner: Box::new(inner) };
                        self.finish_after(act);
                    } else {
                        *act = done(o.code, Statement::seq(o.residual, rest), o.branches);
                    }
                }
            }
            Act::After { inner, .. } => {
                self.step(inner, cont)?;
                self.finish_after(act);
            }
            Act::Par { and, a, b } => {
                let empty = Counts::new();
                let ca = if act_can_terminate(b) { cont } else { &empty };
                self.step(a, ca)?;
                let cb = if act_can_terminate(a) { cont } else { &empty };
                self.step(b, cb)?;
                if let (Act::Done(x), Act::Done(y)) = (&**a, &**b) {
                    let code = x.code.max(y.code);
                    let branches = if *and { x.branches.and(&y.branches) } else { x.branches.or(&y.branches) };
                    let exit = *and && (x.code == Completion::Term || y.code == Completion::Term);
                    let residual = if code == Completion::Term || exit {
                        Statement::Nothing
                    } else if *and {
                        Statement::par_and(x.residual.clone(), y.residual.clone())
                    } else {
                        Statement::par_or(x.residual.clone(), y.residual.clone())
                    };
                    *act = done(code, residual, branches);
                }
            }
            Act::Loop { body, orig, span, prefix } => {
                let mut again = Counts::new();
                reach(orig, &mut again);
                self.step(body, &again)?;
                if let Act::Done(o) = &**body {
                    if o.code == Completion::Term {
                        if prefix.is_some() {
                            return Err(RuntimeError::InstantaneousLoop(*span));
                        }
                        *prefix = Some(o.branches.clone());
                        **body = self.start(orig.clone(), &again)?;
                        if let Act::Done(o2) = &**body {
                            if o2.code == Completion::Term {
                                return Err(RuntimeError::InstantaneousLoop(*span));
                            }
                        }
                    }
                }
                if let Act::Done(o) = &**body {
                    let branches = match prefix.take() {
                        Some(p) => p.concat(o.branches.clone()),
                        None => o.branches.clone(),
                    };
                    let residual = Statement::seq(o.residual.clone(), Statement::Loop(Box::new(orig.clone()), *span));
                    *act = done(o.code, residual, branches);
                }
            }
            Act::Decl { body, .. } => {
                self.step(body, cont)?;
                if let Act::Done(_) = &**body {
                    let Act::Decl { loc, name, ty, st, init, span, body } = take(act) else { unreachable!() };
                    let Act::Done(mut o) = *body else { unreachable!() };
                    if st == SpacetimeAnnotation::SingleTime && o.residual != Statement::Nothing {
                        rename_free(&mut o.residual, &VarRef::Loc(loc), &VarRef::Name(name.clone()));
                        o.residual = Statement::VarDecl {
                            ty,
                            var: VarRef::Name(name),
                            st,
                            init,
                            body: Box::new(o.residual),
                            span,
                        };
                    }
                    *act = Act::Done(o);
                }
            }
        }
        Ok(())
    }

    fn finish_after(&mut self, act: &mut Act) {
        if let Act::After { inner, .. } = act {
            if !matches!(**inner, Act::Done(_)) {
                return;
            }
        } else {
            return;
        }
        let Act::After { prefix, inner } = take(act) else { unreachable!() };
        let Act::Done(o) = *inner else { unreachable!() };
        *act = done(o.code, o.residual, prefix.concat(o.branches));
    }
}

/// Evaluates the bodies of one branch, each on its own copy of `space`,
/// and joins the world-line values they produce.
pub fn eval_branch(
    space: &Space,
    bodies: &[Statement],
    cfg: LatticeConfig,
    ctx: HostCtx,
) -> Result<Store, RuntimeError> {
    let mut acc: Option<Store> = None;
    for b in bodies {
        let mut copy = space.clone();
        let mut inst = Instant::new(&mut copy, cfg, ctx);
        inst.run(b.clone())?;
        let snap = copy.project(SpacetimeAnnotation::WorldLine);
        acc = Some(match acc {
            None => snap,
            Some(s) => s.try_join(&snap)?,
        });
    }
    Ok(acc.unwrap_or_else(|| space.project(SpacetimeAnnotation::WorldLine)))
}
