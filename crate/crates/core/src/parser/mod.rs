//! Surface syntax.
//!
//! ```text
//! program  := def*
//! def      := ("proc" | "flow") IDENT ["(" [IDENT ("," IDENT)*] ")"] "=" seq
//! seq      := item (";" item)* [";"]
//! item     := decl | stmt
//! decl     := TYPE IDENT ANNOT "=" init | ANNOT TYPE IDENT "=" init
//! stmt     := "nothing" | "pause" | "stop" | "prune"
//!           | "loop" seq "end" | "flow" seq "end" | "space" seq "end"
//!           | "par" [OP] seq (OP seq)* "end"
//!           | "when" operand "|=" operand "then" seq ["else" seq] "end"
//!           | "run" IDENT "(" [IDENT ("," IDENT)*] ")"
//!           | IDENT "<-" (literal | IDENT | call)
//!           | call
//!           | "(" seq ")"
//! call     := IDENT "(" [arg ("," arg)*] ")"
//! arg      := ["read" | "write" | "readwrite"] operand ["^" ("r" | "w" | "rw")]
//! ```
//!
//! A declaration scopes over the rest of its sequence. `flow p end` is
//! `loop p; pause end`, and a `flow` definition wraps its body the same way.

use std::fmt;

use crate::ast::{
    AccessAnnotation, Arg, HostCall, Init, Literal, Operand, ProcDef, Program, SpacetimeAnnotation, Span, Statement,
    TellExpr, VarRef,
};
use crate::lattice::{Es, FSet, LatticeType, Location};

mod lexer;

use lexer::{lex, Tok, Token};

/// A source text with the name it was loaded from.
#[derive(Debug, Clone)]
pub struct SourceProgram {
    pub path: String,
    pub text: String,
}

impl SourceProgram {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> SourceProgram {
        SourceProgram { path: path.into(), text: text.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn type_kw(k: &str) -> Option<LatticeType> {
    Some(match k {
        "LMax" => LatticeType::LMax,
        "LMin" => LatticeType::LMin,
        "ES" => LatticeType::Es,
        "FSet" => LatticeType::FSet,
        "VStore" => LatticeType::VStore,
        "CStore" => LatticeType::CStore,
        _ => return None,
    })
}

fn annot_kw(k: &str) -> Option<SpacetimeAnnotation> {
    Some(match k {
        "single_space" => SpacetimeAnnotation::SingleSpace,
        "single_time" => SpacetimeAnnotation::SingleTime,
        "world_line" => SpacetimeAnnotation::WorldLine,
        _ => return None,
    })
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        let t = &self.toks[self.pos];
        Span::new(t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        let message = match expected {
            [] => format!("unexpected {}", t.tok),
            [one] => format!("expected {one}, found {}", t.tok),
            many => format!("expected one of {}, found {}", many.join(", "), t.tok),
        };
        ParseError { line: t.line, col: t.col, message, expected: expected.iter().map(|s| s.to_string()).collect() }
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{k}`")]))
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{s}`")]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    /// `proc`, or a `flow` that opens a definition rather than a statement.
    fn at_def_start(&self) -> bool {
        if self.is_kw("proc") {
            return true;
        }
        if !self.is_kw("flow") || !matches!(self.peek_at(1), Tok::Ident(_)) {
            return false;
        }
        match self.peek_at(2) {
            Tok::Sym("=") => true,
            Tok::Sym("(") => {
                let mut k = 3;
                loop {
                    match self.peek_at(k) {
                        Tok::Ident(_) | Tok::Sym(",") => k += 1,
                        Tok::Sym(")") => return matches!(self.peek_at(k + 1), Tok::Sym("=")),
                        _ => return false,
                    }
                }
            }
            _ => false,
        }
    }

    fn at_seq_stop(&self) -> bool {
        matches!(self.peek(), Tok::Kw("end") | Tok::Kw("else") | Tok::Sym("||") | Tok::Sym("<>") | Tok::Sym(")") | Tok::Eof)
            || self.at_def_start()
    }

    fn program(&mut self, errors: &mut Vec<ParseError>) -> Program {
        let mut program = Program::default();
        while *self.peek() != Tok::Eof {
            match self.def() {
                Ok(d) => program.procs.push(d),
                Err(e) => {
                    errors.push(e);
                    self.bump();
                    while *self.peek() != Tok::Eof && !self.at_def_start() {
                        self.bump();
                    }
                }
            }
        }
        program
    }

    fn def(&mut self) -> PResult<ProcDef> {
        let span = self.span();
        let flow = if self.eat_kw("flow") {
            true
        } else if self.eat_kw("proc") {
            false
        } else {
            return Err(self.error(&["`proc`", "`flow`"]));
        };
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat_sym("(") {
            if !self.is_sym(")") {
                params.push(self.ident()?);
                while self.eat_sym(",") {
                    params.push(self.ident()?);
                }
            }
            self.expect_sym(")")?;
        }
        self.expect_sym("=")?;
        let body = self.seq()?;
        if !(*self.peek() == Tok::Eof || self.at_def_start()) {
            return Err(self.error(&["`;`", "`proc`", "end of input"]));
        }
        let body = if flow { Statement::flow(body) } else { body };
        Ok(ProcDef { name, params, body, span })
    }

    fn seq(&mut self) -> PResult<Statement> {
        let mut items = Vec::new();
        loop {
            if let Some(decl) = self.try_decl()? {
                items.push(decl);
                break;
            }
            items.push(self.stmt()?);
            if !self.eat_sym(";") || self.at_seq_stop() {
                break;
            }
        }
        // a declaration, if any, is last and takes nothing yet
        Ok(Statement::seq_all(items))
    }

    fn try_decl(&mut self) -> PResult<Option<Statement>> {
        let span = self.span();
        let (ty, name, st) = match (self.peek().clone(), self.peek_at(1).clone()) {
            (Tok::Kw(t), Tok::Ident(_)) if type_kw(t).is_some() => {
                self.bump();
                let name = self.ident()?;
                let st = match self.peek() {
                    Tok::Kw(a) if annot_kw(a).is_some() => annot_kw(a).unwrap(),
                    _ => return Err(self.error(&["`single_space`", "`single_time`", "`world_line`"])),
                };
                self.bump();
                (type_kw(t).unwrap(), name, st)
            }
            (Tok::Kw(a), _) if annot_kw(a).is_some() => {
                self.bump();
                let ty = match self.peek() {
                    Tok::Kw(t) if type_kw(t).is_some() => type_kw(t).unwrap(),
                    _ => return Err(self.error(&["lattice type"])),
                };
                self.bump();
                (ty, self.ident()?, annot_kw(a).unwrap())
            }
            _ => return Ok(None),
        };
        self.expect_sym("=")?;
        let init = self.init()?;
        let body = if self.eat_sym(";") && !self.at_seq_stop() { self.seq()? } else { Statement::Nothing };
        Ok(Some(Statement::VarDecl { ty, var: VarRef::Name(name), st, init, body: Box::new(body), span }))
    }

    fn init(&mut self) -> PResult<Init> {
        if let Some(l) = self.try_literal()? {
            return Ok(Init::Lit(l));
        }
        match (self.peek().clone(), self.peek_at(1)) {
            (Tok::Ident(_), Tok::Sym("(")) => Ok(Init::Call(self.call()?)),
            (Tok::Ident(n), _) => {
                self.bump();
                Ok(Init::Var(VarRef::Name(n)))
            }
            (Tok::Loc(l), _) => {
                self.bump();
                Ok(Init::Var(VarRef::Loc(Location(l))))
            }
            _ => Err(self.error(&["literal", "variable", "host call"])),
        }
    }

    fn try_literal(&mut self) -> PResult<Option<Literal>> {
        let lit = match self.peek().clone() {
            Tok::Int(v) => Literal::Int(v),
            Tok::Kw("true") => Literal::Es(Es::True),
            Tok::Kw("false") => Literal::Es(Es::False),
            Tok::Kw("unknown") => Literal::Es(Es::Unknown),
            Tok::Kw("bot") => Literal::Bot,
            Tok::Sym("{") => {
                self.bump();
                let mut set = FSet::empty();
                if !self.is_sym("}") {
                    loop {
                        let lo = self.int()?;
                        let hi = if self.eat_sym("..") { self.int()? } else { lo };
                        if lo < 0 || hi < lo {
                            let t = &self.toks[self.pos - 1];
                            return Err(ParseError {
                                line: t.line,
                                col: t.col,
                                message: "set elements must be non-negative, ranges increasing".into(),
                                expected: vec![],
                            });
                        }
                        set = set.union(&FSet::range(lo, hi));
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym("}")?;
                return Ok(Some(Literal::Set(set)));
            }
            _ => return Ok(None),
        };
        self.bump();
        Ok(Some(lit))
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(v)
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn operand(&mut self) -> PResult<Operand> {
        if let Some(l) = self.try_literal()? {
            return Ok(Operand::Lit(l));
        }
        match self.peek().clone() {
            Tok::Ident(n) => {
                self.bump();
                Ok(Operand::Var(VarRef::Name(n)))
            }
            Tok::Loc(l) => {
                self.bump();
                Ok(Operand::Var(VarRef::Loc(Location(l))))
            }
            _ => Err(self.error(&["operand"])),
        }
    }

    fn arg(&mut self) -> PResult<Arg> {
        let prefix = match self.peek() {
            Tok::Kw("read") => Some(AccessAnnotation::Read),
            Tok::Kw("write") => Some(AccessAnnotation::Write),
            Tok::Kw("readwrite") => Some(AccessAnnotation::ReadWrite),
            _ => None,
        };
        if prefix.is_some() {
            self.bump();
        }
        let operand = self.operand()?;
        let mut access = prefix.unwrap_or(AccessAnnotation::Read);
        if self.eat_sym("^") {
            if prefix.is_some() {
                return Err(self.error(&[]));
            }
            access = match self.peek() {
                Tok::Ident(s) if s == "r" => AccessAnnotation::Read,
                Tok::Ident(s) if s == "w" => AccessAnnotation::Write,
                Tok::Ident(s) if s == "rw" => AccessAnnotation::ReadWrite,
                _ => return Err(self.error(&["`r`", "`w`", "`rw`"])),
            };
            self.bump();
        }
        if matches!(operand, Operand::Lit(_)) && access != AccessAnnotation::Read {
            let t = &self.toks[self.pos - 1];
            return Err(ParseError {
                line: t.line,
                col: t.col,
                message: "a literal argument can only be read".into(),
                expected: vec![],
            });
        }
        Ok(Arg { operand, access })
    }

    fn call(&mut self) -> PResult<HostCall> {
        let span = self.span();
        let func = self.ident()?;
        self.expect_sym("(")?;
        let mut args = Vec::new();
        if !self.is_sym(")") {
            args.push(self.arg()?);
            while self.eat_sym(",") {
                args.push(self.arg()?);
            }
        }
        self.expect_sym(")")?;
        Ok(HostCall { func, args, span })
    }

    fn block(&mut self) -> PResult<Statement> {
        let body = self.seq()?;
        self.expect_kw("end")?;
        Ok(body)
    }

    fn stmt(&mut self) -> PResult<Statement> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Kw("nothing") => {
                self.bump();
                Ok(Statement::Nothing)
            }
            Tok::Kw("pause") => {
                self.bump();
                Ok(Statement::Pause)
            }
            Tok::Kw("stop") => {
                self.bump();
                Ok(Statement::Stop)
            }
            Tok::Kw("prune") => {
                self.bump();
                Ok(Statement::Prune)
            }
            Tok::Kw("loop") => {
                self.bump();
                Ok(Statement::Loop(Box::new(self.block()?), span))
            }
            Tok::Kw("flow") => {
                self.bump();
                let body = self.block()?;
                Ok(Statement::Loop(Box::new(Statement::seq(body, Statement::Pause)), span))
            }
            Tok::Kw("space") => {
                self.bump();
                Ok(Statement::Space(Box::new(self.block()?), span))
            }
            Tok::Kw("par") => {
                self.bump();
                self.par()
            }
            Tok::Kw("when") => {
                self.bump();
                let left = self.operand()?;
                self.expect_sym("|=")?;
                let right = self.operand()?;
                self.expect_kw("then")?;
                let then = self.seq()?;
                let els = if self.eat_kw("else") { self.seq()? } else { Statement::Nothing };
                self.expect_kw("end")?;
                Ok(Statement::When { left, right, then: Box::new(then), els: Box::new(els), span })
            }
            Tok::Kw("run") => {
                self.bump();
                let name = self.ident()?;
                self.expect_sym("(")?;
                let mut args = Vec::new();
                if !self.is_sym(")") {
                    loop {
                        match self.operand()? {
                            Operand::Var(v) => args.push(v),
                            Operand::Lit(_) => {
                                let t = &self.toks[self.pos - 1];
                                return Err(ParseError {
                                    line: t.line,
                                    col: t.col,
                                    message: "process arguments must be variables".into(),
                                    expected: vec!["variable".into()],
                                });
                            }
                        }
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym(")")?;
                Ok(Statement::Run { name, args, span })
            }
            Tok::Sym("(") => {
                self.bump();
                let body = self.seq()?;
                self.expect_sym(")")?;
                Ok(body)
            }
            Tok::Ident(n) => match self.peek_at(1) {
                Tok::Sym("<-") => {
                    self.bump();
                    self.bump();
                    let expr = if let Some(l) = self.try_literal()? {
                        TellExpr::Lit(l)
                    } else {
                        match (self.peek().clone(), self.peek_at(1)) {
                            (Tok::Ident(_), Tok::Sym("(")) => TellExpr::Call(self.call()?),
                            (Tok::Ident(v), _) => {
                                self.bump();
                                TellExpr::Var(VarRef::Name(v))
                            }
                            (Tok::Loc(l), _) => {
                                self.bump();
                                TellExpr::Var(VarRef::Loc(Location(l)))
                            }
                            _ => return Err(self.error(&["literal", "variable", "host call"])),
                        }
                    };
                    Ok(Statement::Tell { target: VarRef::Name(n), expr, span })
                }
                Tok::Sym("(") => Ok(Statement::Call(self.call()?)),
                _ => {
                    self.bump();
                    Err(self.error(&["`(`", "`<-`"]))
                }
            },
            _ => Err(self.error(&["statement"])),
        }
    }

    fn par(&mut self) -> PResult<Statement> {
        let op_of = |t: &Tok| match t {
            Tok::Sym("||") => Some(true),
            Tok::Sym("<>") => Some(false),
            _ => None,
        };
        let mut or = op_of(self.peek());
        if or.is_some() {
            self.bump();
        }
        let mut items = vec![self.seq()?];
        while let Some(this) = op_of(self.peek()) {
            if or.is_some_and(|o| o != this) {
                return Err(ParseError {
                    message: "`||` and `<>` cannot be mixed in one `par`; nest them".into(),
                    ..self.error(&[])
                });
            }
            or = Some(this);
            self.bump();
            items.push(self.seq()?);
        }
        self.expect_kw("end")?;
        let mut acc = items.pop().unwrap();
        while let Some(s) = items.pop() {
            acc = if or.unwrap_or(true) { Statement::par_or(s, acc) } else { Statement::par_and(s, acc) };
        }
        Ok(acc)
    }
}

/// Parses a whole source file. On failure, every error found after
/// recovering at the next process definition is returned.
pub fn parse_program(src: &SourceProgram) -> Result<Program, Vec<ParseError>> {
    parse_str(&src.text)
}

pub fn parse_str(text: &str) -> Result<Program, Vec<ParseError>> {
    let toks = lex(text).map_err(|e| vec![e])?;
    let mut parser = Parser { toks, pos: 0 };
    let mut errors = Vec::new();
    let program = parser.program(&mut errors);
    if errors.is_empty() {
        Ok(program)
    } else {
        Err(errors)
    }
}

/// Parses a single statement sequence.
pub fn parse_statement(text: &str) -> Result<Statement, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let s = parser.seq()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(&["end of input"]));
    }
    Ok(s)
}
