use std::fmt::Write;

use super::{AccessAnnotation, Arg, HostCall, Init, Operand, Program, Statement, TellExpr};

fn arg(a: &Arg) -> String {
    match a.access {
        AccessAnnotation::Read => a.operand.to_string(),
        acc => format!("{}^{}", a.operand, acc.suffix()),
    }
}

fn call(c: &HostCall) -> String {
    let args: Vec<String> = c.args.iter().map(arg).collect();
    format!("{}({})", c.func, args.join(", "))
}

struct Printer {
    out: String,
}

impl Printer {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    // Prints a sequence; every item but the last gets a trailing `;`.
    fn seq(&mut self, p: &Statement, depth: usize) {
        let mut items = Vec::new();
        let mut cur = p;
        loop {
            match cur {
                Statement::Seq(a, b) => {
                    items.push(&**a);
                    cur = b;
                }
                Statement::VarDecl { ty, var, st, init, body, .. } => {
                    let init = match init {
                        Init::Lit(l) => l.to_string(),
                        Init::Var(v) => v.to_string(),
                        Init::Call(c) => call(c),
                    };
                    for item in items.drain(..) {
                        self.item(item, depth, true);
                    }
                    self.line(depth, &format!("{ty} {var} {} = {init};", st.keyword()));
                    cur = body;
                }
                _ => {
                    items.push(cur);
                    break;
                }
            }
        }
        let n = items.len();
        for (i, item) in items.into_iter().enumerate() {
            self.item(item, depth, i + 1 < n);
        }
    }

    fn item(&mut self, p: &Statement, depth: usize, semi: bool) {
        let start = self.out.len();
        self.stmt(p, depth);
        if semi {
            // the statement's last line ends with '\n'
            self.out.pop();
            self.out.push_str(";\n");
        }
        debug_assert!(self.out.len() > start);
    }

    fn par_items<'a>(&self, p: &'a Statement, or: bool, items: &mut Vec<&'a Statement>) {
        match (p, or) {
            (Statement::ParOr(a, b), true) | (Statement::ParAnd(a, b), false) => {
                items.push(a);
                self.par_items(b, or, items);
            }
            _ => items.push(p),
        }
    }

    fn stmt(&mut self, p: &Statement, depth: usize) {
        match p {
            Statement::Nothing => self.line(depth, "nothing"),
            Statement::Pause => self.line(depth, "pause"),
            Statement::Stop => self.line(depth, "stop"),
            Statement::Prune => self.line(depth, "prune"),
            Statement::Call(c) => self.line(depth, &call(c)),
            Statement::Tell { target, expr, .. } => {
                let e = match expr {
                    TellExpr::Lit(l) => l.to_string(),
                    TellExpr::Var(v) => v.to_string(),
                    TellExpr::Call(c) => call(c),
                };
                self.line(depth, &format!("{target} <- {e}"));
            }
            Statement::Run { name, args, .. } => {
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                self.line(depth, &format!("run {name}({})", args.join(", ")));
            }
            Statement::Loop(b, _) => self.block("loop", b, depth),
            Statement::Space(b, _) => self.block("space", b, depth),
            Statement::When { left, right, then, els, .. } => {
                self.line(depth, &format!("when {} |= {} then", operand(left), operand(right)));
                self.seq(then, depth + 1);
                if **els != Statement::Nothing {
                    self.line(depth, "else");
                    self.seq(els, depth + 1);
                }
                self.line(depth, "end");
            }
            Statement::ParOr(..) | Statement::ParAnd(..) => {
                let or = matches!(p, Statement::ParOr(..));
                let mut items = Vec::new();
                self.par_items(p, or, &mut items);
                self.line(depth, "par");
                for (i, item) in items.into_iter().enumerate() {
                    if i > 0 {
                        self.line(depth, if or { "||" } else { "<>" });
                    }
                    self.seq(item, depth + 1);
                }
                self.line(depth, "end");
            }
            Statement::Seq(..) | Statement::VarDecl { .. } => {
                // nested sequence in item position
                self.line(depth, "(");
                self.seq(p, depth + 1);
                self.line(depth, ")");
            }
        }
    }

    fn block(&mut self, kw: &str, body: &Statement, depth: usize) {
        self.line(depth, kw);
        self.seq(body, depth + 1);
        self.line(depth, "end");
    }
}

fn operand(o: &Operand) -> String {
    o.to_string()
}

/// Concrete syntax for `p`, parseable back to an equal statement.
pub fn pretty_statement(p: &Statement) -> String {
    let mut pr = Printer { out: String::new() };
    pr.seq(p, 0);
    pr.out
}

pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for (i, def) in p.procs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if def.params.is_empty() {
            let _ = writeln!(out, "proc {} =", def.name);
        } else {
            let _ = writeln!(out, "proc {}({}) =", def.name, def.params.join(", "));
        }
        let mut pr = Printer { out: String::new() };
        pr.seq(&def.body, 1);
        out.push_str(&pr.out);
    }
    out
}
