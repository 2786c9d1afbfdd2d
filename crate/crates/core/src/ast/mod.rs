//! Abstract syntax of spacetime programs.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::lattice::{bottom_of, Es, FSet, LatticeConfig, LatticeType, LatticeValue, Location};

mod inline;
mod pretty;

pub use inline::{inline_processes, InlineError};
pub use pretty::{pretty_program, pretty_statement};

/// Source position, 1-based. Spans never take part in structural equality.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Span {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Lifetime of a variable across the search tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpacetimeAnnotation {
    /// Global to the search, one location for the whole run.
    SingleSpace,
    /// Reallocated in every instant.
    SingleTime,
    /// Backtracked along the paths of the tree.
    WorldLine,
}

impl SpacetimeAnnotation {
    pub fn keyword(self) -> &'static str {
        match self {
            SpacetimeAnnotation::SingleSpace => "single_space",
            SpacetimeAnnotation::SingleTime => "single_time",
            SpacetimeAnnotation::WorldLine => "world_line",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            SpacetimeAnnotation::SingleSpace => "→",
            SpacetimeAnnotation::SingleTime => "↻",
            SpacetimeAnnotation::WorldLine => "↓",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AccessAnnotation {
    Read,
    Write,
    ReadWrite,
}

impl AccessAnnotation {
    pub fn suffix(self) -> &'static str {
        match self {
            AccessAnnotation::Read => "r",
            AccessAnnotation::Write => "w",
            AccessAnnotation::ReadWrite => "rw",
        }
    }

    pub fn reads(self) -> bool {
        self != AccessAnnotation::Write
    }

    pub fn writes(self) -> bool {
        self != AccessAnnotation::Read
    }
}

/// Either a source name or a runtime location.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarRef {
    Name(String),
    Loc(Location),
}

impl VarRef {
    pub fn name(n: impl Into<String>) -> VarRef {
        VarRef::Name(n.into())
    }

    pub fn as_name(&self) -> Option<&str> {
        match self {
            VarRef::Name(n) => Some(n),
            VarRef::Loc(_) => None,
        }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarRef::Name(n) => f.write_str(n),
            VarRef::Loc(l) => write!(f, "{l}"),
        }
    }
}

/// Constant appearing in source.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Int(i64),
    Es(Es),
    Set(FSet),
    Bot,
}

impl From<i64> for Literal {
    fn from(n: i64) -> Literal {
        Literal::Int(n)
    }
}

impl Literal {
    /// The lattice value of this literal when used at type `ty`.
    pub fn value_at(&self, ty: LatticeType, cfg: &LatticeConfig) -> Option<LatticeValue> {
        match (self, ty) {
            (Literal::Bot, _) => Some(bottom_of(ty, cfg)),
            (Literal::Int(v), LatticeType::LMax) => Some(LatticeValue::LMax(*v)),
            (Literal::Int(v), LatticeType::LMin) => Some(LatticeValue::LMin(*v)),
            (Literal::Es(e), LatticeType::Es) => Some(LatticeValue::Es(*e)),
            (Literal::Set(s), LatticeType::FSet) => Some(LatticeValue::FSet(s.clone())),
            _ => None,
        }
    }

    /// Type of the literal when it determines one on its own.
    pub fn own_type(&self) -> Option<LatticeType> {
        match self {
            Literal::Es(_) => Some(LatticeType::Es),
            Literal::Set(_) => Some(LatticeType::FSet),
            Literal::Int(_) | Literal::Bot => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Es(e) => write!(f, "{e}"),
            Literal::Set(s) => write!(f, "{s}"),
            Literal::Bot => f.write_str("bot"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Var(VarRef),
    Lit(Literal),
}

impl Operand {
    pub fn var(&self) -> Option<&VarRef> {
        match self {
            Operand::Var(v) => Some(v),
            Operand::Lit(_) => None,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => write!(f, "{v}"),
            Operand::Lit(l) => write!(f, "{l}"),
        }
    }
}

/// Host call argument. Literal arguments are always read.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arg {
    pub operand: Operand,
    pub access: AccessAnnotation,
}

impl Arg {
    pub fn var(name: &str, access: AccessAnnotation) -> Arg {
        Arg { operand: Operand::Var(VarRef::name(name)), access }
    }

    pub fn lit(l: Literal) -> Arg {
        Arg { operand: Operand::Lit(l), access: AccessAnnotation::Read }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HostCall {
    pub func: String,
    pub args: Vec<Arg>,
    pub span: Span,
}

impl HostCall {
    pub fn new(func: &str, args: Vec<Arg>) -> HostCall {
        HostCall { func: func.to_string(), args, span: Span::default() }
    }
}

/// Initializer of a declaration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Init {
    Lit(Literal),
    Var(VarRef),
    Call(HostCall),
}

/// Right-hand side of a tell `x <- e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TellExpr {
    Lit(Literal),
    Var(VarRef),
    Call(HostCall),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Statement {
    /// `T x st = init; body`: the declaration scopes over `body`.
    VarDecl {
        ty: LatticeType,
        var: VarRef,
        st: SpacetimeAnnotation,
        init: Init,
        body: Box<Statement>,
        span: Span,
    },
    When {
        left: Operand,
        right: Operand,
        then: Box<Statement>,
        els: Box<Statement>,
        span: Span,
    },
    Call(HostCall),
    Tell {
        target: VarRef,
        expr: TellExpr,
        span: Span,
    },
    Nothing,
    Pause,
    Stop,
    Prune,
    Loop(Box<Statement>, Span),
    Seq(Box<Statement>, Box<Statement>),
    ParOr(Box<Statement>, Box<Statement>),
    ParAnd(Box<Statement>, Box<Statement>),
    Space(Box<Statement>, Span),
    /// Process call, removed by [`inline_processes`].
    Run {
        name: String,
        args: Vec<VarRef>,
        span: Span,
    },
}

impl Statement {
    pub fn seq(a: Statement, b: Statement) -> Statement {
        Statement::Seq(Box::new(a), Box::new(b))
    }

    pub fn seq_all(items: impl IntoIterator<Item = Statement>) -> Statement {
        let mut items: Vec<Statement> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else { return Statement::Nothing };
        while let Some(s) = items.pop() {
            acc = Statement::seq(s, acc);
        }
        acc
    }

    pub fn par_or(a: Statement, b: Statement) -> Statement {
        Statement::ParOr(Box::new(a), Box::new(b))
    }

    pub fn par_and(a: Statement, b: Statement) -> Statement {
        Statement::ParAnd(Box::new(a), Box::new(b))
    }

    pub fn looping(body: Statement) -> Statement {
        Statement::Loop(Box::new(body), Span::default())
    }

    pub fn space(body: Statement) -> Statement {
        Statement::Space(Box::new(body), Span::default())
    }

    /// `flow p end`, i.e. `loop p; pause end`.
    pub fn flow(body: Statement) -> Statement {
        Statement::looping(Statement::seq(body, Statement::Pause))
    }

    pub fn when(left: Operand, right: Operand, then: Statement, els: Statement) -> Statement {
        Statement::When { left, right, then: Box::new(then), els: Box::new(els), span: Span::default() }
    }

    pub fn call(func: &str, args: Vec<Arg>) -> Statement {
        Statement::Call(HostCall::new(func, args))
    }

    pub fn decl(ty: LatticeType, name: &str, st: SpacetimeAnnotation, init: Init, body: Statement) -> Statement {
        Statement::VarDecl { ty, var: VarRef::name(name), st, init, body: Box::new(body), span: Span::default() }
    }

    pub fn run(name: &str, args: &[&str]) -> Statement {
        Statement::Run { name: name.to_string(), args: args.iter().map(|a| VarRef::name(*a)).collect(), span: Span::default() }
    }

    pub fn span(&self) -> Span {
        match self {
            Statement::VarDecl { span, .. }
            | Statement::When { span, .. }
            | Statement::Tell { span, .. }
            | Statement::Loop(_, span)
            | Statement::Space(_, span)
            | Statement::Run { span, .. } => *span,
            Statement::Call(c) => c.span,
            Statement::Seq(a, _) | Statement::ParOr(a, _) | Statement::ParAnd(a, _) => a.span(),
            _ => Span::default(),
        }
    }

    /// Direct sub-statements.
    pub fn children(&self) -> Vec<&Statement> {
        match self {
            Statement::VarDecl { body, .. } => vec![body],
            Statement::When { then, els, .. } => vec![then, els],
            Statement::Loop(b, _) | Statement::Space(b, _) => vec![b],
            Statement::Seq(a, b) | Statement::ParOr(a, b) | Statement::ParAnd(a, b) => vec![a, b],
            _ => vec![],
        }
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut impl FnMut(&Statement)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn contains_run(&self) -> bool {
        let mut found = false;
        self.walk(&mut |s| found |= matches!(s, Statement::Run { .. }));
        found
    }
}

fn rename_ref(r: &mut VarRef, from: &VarRef, to: &VarRef) {
    if r == from {
        *r = to.clone();
    }
}

fn rename_operand(o: &mut Operand, from: &VarRef, to: &VarRef) {
    if let Operand::Var(v) = o {
        rename_ref(v, from, to);
    }
}

fn rename_call(c: &mut HostCall, from: &VarRef, to: &VarRef) {
    for a in &mut c.args {
        rename_operand(&mut a.operand, from, to);
    }
}

/// Replaces free occurrences of `from` by `to` in place.
///
/// A declaration of `from` shadows it in its body; its initializer is still
/// evaluated in the enclosing scope and is therefore renamed.
pub fn rename_free(p: &mut Statement, from: &VarRef, to: &VarRef) {
    match p {
        Statement::VarDecl { var, init, body, .. } => {
            match init {
                Init::Lit(_) => {}
                Init::Var(v) => rename_ref(v, from, to),
                Init::Call(c) => rename_call(c, from, to),
            }
            if var != from {
                rename_free(body, from, to);
            }
        }
        Statement::When { left, right, then, els, .. } => {
            rename_operand(left, from, to);
            rename_operand(right, from, to);
            rename_free(then, from, to);
            rename_free(els, from, to);
        }
        Statement::Call(c) => rename_call(c, from, to),
        Statement::Tell { target, expr, .. } => {
            rename_ref(target, from, to);
            match expr {
                TellExpr::Lit(_) => {}
                TellExpr::Var(v) => rename_ref(v, from, to),
                TellExpr::Call(c) => rename_call(c, from, to),
            }
        }
        Statement::Run { args, .. } => {
            for a in args {
                rename_ref(a, from, to);
            }
        }
        Statement::Loop(b, _) | Statement::Space(b, _) => rename_free(b, from, to),
        Statement::Seq(a, b) | Statement::ParOr(a, b) | Statement::ParAnd(a, b) => {
            rename_free(a, from, to);
            rename_free(b, from, to);
        }
        Statement::Nothing | Statement::Pause | Statement::Stop | Statement::Prune => {}
    }
}

/// `p` with every free occurrence of `name` replaced by `loc`.
pub fn substitute(p: &Statement, name: &str, loc: Location) -> Statement {
    let mut out = p.clone();
    rename_free(&mut out, &VarRef::name(name), &VarRef::Loc(loc));
    out
}

fn collect_free(p: &Statement, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let use_ref = |r: &VarRef, bound: &Vec<String>, out: &mut BTreeSet<String>| {
        if let VarRef::Name(n) = r {
            if !bound.contains(n) {
                out.insert(n.clone());
            }
        }
    };
    let use_call = |c: &HostCall, bound: &Vec<String>, out: &mut BTreeSet<String>| {
        for a in &c.args {
            if let Operand::Var(VarRef::Name(n)) = &a.operand {
                if !bound.contains(n) {
                    out.insert(n.clone());
                }
            }
        }
    };
    match p {
        Statement::VarDecl { var, init, body, .. } => {
            match init {
                Init::Lit(_) => {}
                Init::Var(v) => use_ref(v, bound, out),
                Init::Call(c) => use_call(c, bound, out),
            }
            let pushed = if let VarRef::Name(n) = var {
                bound.push(n.clone());
                true
            } else {
                false
            };
            collect_free(body, bound, out);
            if pushed {
                bound.pop();
            }
        }
        Statement::When { left, right, then, els, .. } => {
            for o in [left, right] {
                if let Operand::Var(v) = o {
                    use_ref(v, bound, out);
                }
            }
            collect_free(then, bound, out);
            collect_free(els, bound, out);
        }
        Statement::Call(c) => use_call(c, bound, out),
        Statement::Tell { target, expr, .. } => {
            use_ref(target, bound, out);
            match expr {
                TellExpr::Lit(_) => {}
                TellExpr::Var(v) => use_ref(v, bound, out),
                TellExpr::Call(c) => use_call(c, bound, out),
            }
        }
        Statement::Run { args, .. } => {
            for a in args {
                use_ref(a, bound, out);
            }
        }
        _ => {
            for c in p.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

/// Names referenced in `p` but not declared in it.
pub fn free_names(p: &Statement) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(p, &mut Vec::new(), &mut out);
    out
}

/// `proc name(params) = body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Statement,
    pub span: Span,
}

/// A parsed source file: a list of process definitions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub procs: Vec<ProcDef>,
}

impl Program {
    pub fn get(&self, name: &str) -> Option<&ProcDef> {
        self.procs.iter().find(|p| p.name == name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut ProcDef> {
        self.procs.iter_mut().find(|p| p.name == name)
    }

    /// Adds `def`, replacing any existing process of the same name.
    pub fn define(&mut self, def: ProcDef) {
        match self.get_mut(&def.name) {
            Some(old) => *old = def,
            None => self.procs.push(def),
        }
    }
}
