//! Causality of a single instant.
//!
//! On every variable, writes come before read-writes, which come before
//! reads. A guard `x |= y` needs `y` final, so every write on `y` precedes
//! it, and every write on `x` that is not sequenced after it precedes it as
//! well, which keeps the guard stable once decided. A trace is causal when
//! these requirements agree with program order and with one another.

use std::collections::BTreeMap;

use crate::ast::VarRef;

use super::paths::{before, Access, Atom, Trace};
use super::Diagnostic;

fn is_write(a: Access) -> bool {
    matches!(a, Access::Write | Access::ReadWrite)
}

fn name(v: &VarRef) -> String {
    match v {
        VarRef::Name(n) => super::types::display_name(n).to_string(),
        VarRef::Loc(l) => l.to_string(),
    }
}

/// Checks one instant trace.
pub fn check_trace(trace: &Trace) -> Vec<Diagnostic> {
    let atoms = trace.atoms();
    let n = atoms.len();
    let mut diags = Vec::new();
    let mut by_var: BTreeMap<&VarRef, Vec<(usize, Access)>> = BTreeMap::new();
    for (i, (a, _)) in atoms.iter().enumerate() {
        for (v, acc) in a.accesses() {
            by_var.entry(v).or_default().push((i, acc));
        }
    }
    let po = |i: usize, j: usize| before(&atoms[i].1, &atoms[j].1);
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, uses) in &by_var {
        for &(i, ai) in uses {
            for &(j, aj) in uses {
                if i == j {
                    if ai != aj && (is_write(ai) || is_write(aj)) {
                        diags.push(Diagnostic::error(
                            "E-CAUSAL-2",
                            atoms[i].0.span(),
                            format!("`{}` both reads and writes `{}`", atoms[i].0, name(v)),
                        ));
                    }
                    continue;
                }
                let required = match (ai, aj) {
                    (Access::ReadWrite, Access::ReadWrite) => {
                        if i < j {
                            diags.push(Diagnostic::error(
                                "E-CAUSAL-RW",
                                atoms[j].0.span(),
                                format!(
                                    "`{}` is read-written twice in one instant, by `{}` and `{}`",
                                    name(v),
                                    atoms[i].0,
                                    atoms[j].0
                                ),
                            ));
                        }
                        continue;
                    }
                    (Access::Write, Access::ReadWrite | Access::Read) | (Access::ReadWrite, Access::Read) => {
                        Some("E-CAUSAL-2")
                    }
                    (Access::Write | Access::ReadWrite, Access::GuardRight) => Some("E-CAUSAL-1"),
                    (Access::Write | Access::ReadWrite, Access::GuardLeft) if !po(j, i) => None,
                    _ => continue,
                };
                if let Some(code) = required {
                    if po(j, i) {
                        let message = if code == "E-CAUSAL-1" {
                            format!("`{}` writes `{}` after the entailment `{}` used it", atoms[i].0, name(v), atoms[j].0)
                        } else {
                            format!("`{}` accesses `{}` before `{}` writes it", atoms[j].0, name(v), atoms[i].0)
                        };
                        diags.push(Diagnostic::error(code, atoms[i].0.span(), message));
                        continue;
                    }
                }
                edges[i].push(j);
            }
        }
    }
    if !diags.is_empty() {
        return diags;
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && po(i, j) {
                edges[i].push(j);
            }
        }
    }
    if let Some(cycle) = find_cycle(&edges) {
        let shown: Vec<String> = cycle.iter().map(|&i| format!("`{}`", atoms[i].0)).collect();
        diags.push(Diagnostic::error(
            "E-CAUSAL-CYCLE",
            atoms[cycle[0]].0.span(),
            format!("no causal order exists between {}", shown.join(", ")),
        ));
    }
    diags
}

fn find_cycle(edges: &[Vec<usize>]) -> Option<Vec<usize>> {
    // 0 unvisited, 1 on stack, 2 done
    let n = edges.len();
    let mut color = vec![0u8; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        stack.push((root, 0));
        color[root] = 1;
        while let Some(&mut (u, ref mut k)) = stack.last_mut() {
            if *k < edges[u].len() {
                let v = edges[u][*k];
                *k += 1;
                match color[v] {
                    0 => {
                        color[v] = 1;
                        stack.push((v, 0));
                    }
                    1 => {
                        let from = stack.iter().position(|&(w, _)| w == v).unwrap();
                        return Some(stack[from..].iter().map(|&(w, _)| w).collect());
                    }
                    _ => {}
                }
            } else {
                color[u] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Atoms of a trace in program order.
pub fn linearize(trace: &Trace) -> Vec<Atom> {
    trace.atoms().into_iter().map(|(a, _)| a.clone()).collect()
}
