use thiserror::Error;

use super::{rename_free, Program, Span, Statement, VarRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InlineError {
    #[error("no process named `{0}`")]
    MissingEntry(String),
    #[error("entry process `{0}` must not take parameters")]
    EntryWithParams(String),
    #[error("call to unknown process `{name}`")]
    UnknownProcess { name: String, span: Span },
    #[error("process `{name}` expects {expected} argument(s), got {found}")]
    Arity { name: String, expected: usize, found: usize, span: Span },
    #[error("recursion between processes: {}", cycle.join(" -> "))]
    Recursion { cycle: Vec<String>, span: Span },
}

impl InlineError {
    pub fn span(&self) -> Span {
        match self {
            InlineError::UnknownProcess { span, .. }
            | InlineError::Arity { span, .. }
            | InlineError::Recursion { span, .. } => *span,
            _ => Span::new(1, 1),
        }
    }
}

struct Inliner<'a> {
    program: &'a Program,
    fresh: usize,
}

impl Inliner<'_> {
    fn next(&mut self) -> usize {
        self.fresh += 1;
        self.fresh
    }

    // Gives every declaration in `p` a name no other copy can capture.
    fn freshen(&mut self, p: &mut Statement) {
        if let Statement::VarDecl { var: var @ VarRef::Name(_), body, .. } = p {
            let old = var.clone();
            let base = old.as_name().unwrap_or_default();
            let base = base.split('#').next().unwrap_or(base);
            let new = VarRef::Name(format!("{base}#{}", self.next()));
            rename_free(body, &old, &new);
            *var = new;
        }
        match p {
            Statement::VarDecl { body, .. } | Statement::Loop(body, _) | Statement::Space(body, _) => {
                self.freshen(body)
            }
            Statement::When { then, els, .. } => {
                self.freshen(then);
                self.freshen(els);
            }
            Statement::Seq(a, b) | Statement::ParOr(a, b) | Statement::ParAnd(a, b) => {
                self.freshen(a);
                self.freshen(b);
            }
            _ => {}
        }
    }

    fn expand(&mut self, p: &mut Statement, stack: &mut Vec<String>) -> Result<(), InlineError> {
        match p {
            Statement::Run { name, args, span } => {
                if let Some(pos) = stack.iter().position(|n| n == name) {
                    let mut cycle = stack[pos..].to_vec();
                    cycle.push(name.clone());
                    return Err(InlineError::Recursion { cycle, span: *span });
                }
                let def = self
                    .program
                    .get(name)
                    .ok_or_else(|| InlineError::UnknownProcess { name: name.clone(), span: *span })?;
                if def.params.len() != args.len() {
                    return Err(InlineError::Arity {
                        name: name.clone(),
                        expected: def.params.len(),
                        found: args.len(),
                        span: *span,
                    });
                }
                let mut body = def.body.clone();
                self.freshen(&mut body);
                // two phases so that swapped arguments do not collide
                let k = self.next();
                for param in &def.params {
                    let tmp = VarRef::Name(format!("{param}#param{k}"));
                    rename_free(&mut body, &VarRef::name(param.as_str()), &tmp);
                }
                for (param, arg) in def.params.iter().zip(args.iter()) {
                    let tmp = VarRef::Name(format!("{param}#param{k}"));
                    rename_free(&mut body, &tmp, arg);
                }
                stack.push(name.clone());
                self.expand(&mut body, stack)?;
                stack.pop();
                *p = body;
                Ok(())
            }
            Statement::VarDecl { body, .. } | Statement::Loop(body, _) | Statement::Space(body, _) => {
                self.expand(body, stack)
            }
            Statement::When { then, els, .. } => {
                self.expand(then, stack)?;
                self.expand(els, stack)
            }
            Statement::Seq(a, b) | Statement::ParOr(a, b) | Statement::ParAnd(a, b) => {
                self.expand(a, stack)?;
                self.expand(b, stack)
            }
            _ => Ok(()),
        }
    }
}

/// Flattens `program` into the body of `entry` with every `run` replaced by
/// the called body. Parameters are passed by reference: they are renamed to
/// the caller's variables. Local declarations of inlined bodies are renamed
/// `name#k` so that independent copies never share a variable.
pub fn inline_processes(program: &Program, entry: &str) -> Result<Statement, InlineError> {
    let def = program.get(entry).ok_or_else(|| InlineError::MissingEntry(entry.to_string()))?;
    if !def.params.is_empty() {
        return Err(InlineError::EntryWithParams(entry.to_string()));
    }
    let mut inliner = Inliner { program, fresh: 0 };
    let mut body = def.body.clone();
    inliner.expand(&mut body, &mut vec![entry.to_string()])?;
    Ok(body)
}
