use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::lattice::FSet;

use super::propagator::Propagator;
use super::store::{CStore, FdVar, VStore};

/// A finite-domain problem: initial domains, constraints and an optional
/// variable to minimize.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub names: Vec<String>,
    pub domains: VStore,
    pub constraints: CStore,
    pub objective: Option<FdVar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model line {line}: {message}")]
pub struct ModelError {
    pub line: usize,
    pub message: String,
}

impl Model {
    pub fn new() -> Model {
        Model::default()
    }

    pub fn var(&mut self, name: impl Into<String>, lo: i64, hi: i64) -> FdVar {
        let x = self.names.len() as FdVar;
        self.names.push(name.into());
        self.domains.define(x, FSet::range(lo, hi));
        x
    }

    pub fn post(&mut self, p: Propagator) {
        self.constraints.insert(p);
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    /// Reads the line-based model format:
    ///
    /// ```text
    /// var NAME LO HI
    /// le X V | gt X V | lt X Y | ne X Y [C] | eqdiff Z X Y
    /// minimize X
    /// ```
    ///
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Model, ModelError> {
        let mut m = Model::new();
        let mut ids: HashMap<String, FdVar> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ModelError { line, message };
            let words: Vec<&str> = raw.split_whitespace().collect();
            if words.is_empty() || words[0].starts_with('#') {
                continue;
            }
            let var = |w: &str| ids.get(w).copied().ok_or_else(|| err(format!("unknown variable `{w}`")));
            let int = |w: &str| w.parse::<i64>().map_err(|_| err(format!("expected an integer, found `{w}`")));
            let arity = |n: usize| {
                if words.len() == n + 1 {
                    Ok(())
                } else {
                    Err(err(format!("`{}` takes {n} operand(s)", words[0])))
                }
            };
            match words[0] {
                "var" => {
                    arity(3)?;
                    let (lo, hi) = (int(words[2])?, int(words[3])?);
                    if lo < 0 || hi < lo {
                        return Err(err("domain bounds must satisfy 0 <= lo <= hi".into()));
                    }
                    if ids.contains_key(words[1]) {
                        return Err(err(format!("variable `{}` declared twice", words[1])));
                    }
                    let x = m.var(words[1], lo, hi);
                    ids.insert(words[1].to_string(), x);
                }
                "le" => {
                    arity(2)?;
                    m.post(Propagator::LeConst(var(words[1])?, int(words[2])?));
                }
                "gt" => {
                    arity(2)?;
                    m.post(Propagator::GtConst(var(words[1])?, int(words[2])?));
                }
                "lt" => {
                    arity(2)?;
                    m.post(Propagator::LtVar(var(words[1])?, var(words[2])?));
                }
                "ne" => {
                    let c = match words.len() {
                        3 => 0,
                        4 => int(words[3])?,
                        _ => return Err(err("`ne` takes 2 or 3 operands".into())),
                    };
                    m.post(Propagator::NeOffset(var(words[1])?, var(words[2])?, c));
                }
                "eqdiff" => {
                    arity(3)?;
                    m.post(Propagator::EqDiff(var(words[1])?, var(words[2])?, var(words[3])?));
                }
                "minimize" => {
                    arity(1)?;
                    m.objective = Some(var(words[1])?);
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        Ok(m)
    }
}

impl fmt::Display for Model {
    /// Writes the model in the format read by [`Model::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |x: FdVar| &self.names[x as usize];
        for (x, d) in self.domains.iter() {
            writeln!(f, "var {} {} {}", name(x), d.min().unwrap_or(0), d.max().unwrap_or(0))?;
        }
        for p in self.constraints.props() {
            match *p {
                Propagator::LeConst(x, v) => writeln!(f, "le {} {v}", name(x))?,
                Propagator::GtConst(x, v) => writeln!(f, "gt {} {v}", name(x))?,
                Propagator::LtVar(x, y) => writeln!(f, "lt {} {}", name(x), name(y))?,
                Propagator::NeOffset(x, y, c) => writeln!(f, "ne {} {} {c}", name(x), name(y))?,
                Propagator::EqDiff(z, x, y) => writeln!(f, "eqdiff {} {} {}", name(z), name(x), name(y))?,
            }
        }
        if let Some(x) = self.objective {
            writeln!(f, "minimize {}", name(x))?;
        }
        Ok(())
    }
}

/// N-Queens: one variable per column holding the row of its queen.
pub fn queens(n: usize) -> Model {
    let mut m = Model::new();
    let q: Vec<FdVar> = (0..n).map(|i| m.var(format!("q{i}"), 0, n as i64 - 1)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let d = (j - i) as i64;
            m.post(Propagator::NeOffset(q[i], q[j], 0));
            m.post(Propagator::NeOffset(q[i], q[j], d));
            m.post(Propagator::NeOffset(q[i], q[j], -d));
        }
    }
    m
}

/// Latin square of order n with pairwise row and column disequalities.
pub fn latin(n: usize) -> Model {
    let mut m = Model::new();
    let mut cell = vec![vec![0; n]; n];
    for (r, row) in cell.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = m.var(format!("c{r}_{c}"), 0, n as i64 - 1);
        }
    }
    for a in 0..n {
        for b in 0..n {
            for k in b + 1..n {
                m.post(Propagator::NeOffset(cell[a][b], cell[a][k], 0));
                m.post(Propagator::NeOffset(cell[b][a], cell[k][a], 0));
            }
        }
    }
    m
}

/// Golomb ruler with `marks` marks, minimizing its length.
///
/// Marks `x0 = 0 < x1 < ...`, one difference variable per pair of marks,
/// all differences distinct, and the first gap smaller than the last one
/// to break the mirror symmetry.
pub fn golomb(marks: usize) -> Model {
    assert!(marks >= 2, "a ruler needs two marks");
    let ub = (marks * marks) as i64;
    let mut m = Model::new();
    let x: Vec<FdVar> = (0..marks).map(|i| m.var(format!("x{i}"), 0, ub)).collect();
    m.post(Propagator::LeConst(x[0], 0));
    for i in 0..marks - 1 {
        m.post(Propagator::LtVar(x[i], x[i + 1]));
    }
    let mut diffs = Vec::new();
    for i in 0..marks {
        for j in i + 1..marks {
            let d = m.var(format!("d{i}_{j}"), 1, ub);
            m.post(Propagator::EqDiff(d, x[j], x[i]));
            diffs.push((i, j, d));
        }
    }
    for (a, &(_, _, da)) in diffs.iter().enumerate() {
        for &(_, _, db) in &diffs[a + 1..] {
            m.post(Propagator::NeOffset(da, db, 0));
        }
    }
    if marks >= 3 {
        let first = diffs.iter().find(|(i, j, _)| (*i, *j) == (0, 1)).unwrap().2;
        let last = diffs.iter().find(|(i, j, _)| (*i, *j) == (marks - 2, marks - 1)).unwrap().2;
        m.post(Propagator::LtVar(first, last));
    }
    m.objective = Some(x[marks - 1]);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Queens,
    Golomb,
    Latin,
}

impl Problem {
    pub fn model(self, size: usize) -> Model {
        match self {
            Problem::Queens => queens(size),
            Problem::Golomb => golomb(size),
            Problem::Latin => latin(size),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::Queens => "queens",
            Problem::Golomb => "golomb",
            Problem::Latin => "latin",
        }
    }

    /// Largest size run without `--force`.
    pub fn desk_limit(self) -> usize {
        match self {
            Problem::Queens => 11,
            Problem::Golomb => 9,
            Problem::Latin => 20,
        }
    }
}

impl std::str::FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "queens" => Ok(Problem::Queens),
            "golomb" => Ok(Problem::Golomb),
            "latin" => Ok(Problem::Latin),
            _ => Err(format!("unknown problem `{s}` (expected queens, golomb or latin)")),
        }
    }
}
