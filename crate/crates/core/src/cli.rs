//! The `stvm` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{check_program, CheckedProgram};
use crate::runtime::{CompletionCode, InstantRecord, Machine, MachineConfig, QueueStrategy};
use crate::solver::{reference_search, Model, Problem, SearchStats, SearchStrategy};
use crate::stdlib;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_STOPPED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "stvm", version, about = "Run spacetime search programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Execute the `main` process of a program.
    Run(RunArgs),
    /// Parse and analyse a program without running it.
    Check {
        file: PathBuf,
    },
    /// Solve a benchmark with the spacetime solver and the reference solver.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    pub file: PathBuf,
    /// Node queue: dfs or bfs.
    #[arg(long, default_value = "dfs")]
    pub queue: QueueStrategy,
    /// Print this variable after every instant.
    #[arg(long = "watch", value_name = "VAR")]
    pub watch: Vec<String>,
    #[arg(long, value_name = "N")]
    pub max_instants: Option<u64>,
    /// Print one line per instant.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub json: bool,
    /// Constraint model for the `model_*` built-ins: a model file or
    /// PROBLEM:SIZE such as queens:8.
    #[arg(long, value_name = "MODEL")]
    pub model: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// queens, golomb or latin.
    pub problem: Problem,
    pub size: usize,
    /// all, first or bab; defaults to bab for golomb, first for latin and
    /// all for queens.
    #[arg(long)]
    pub strategy: Option<SearchStrategy>,
    #[arg(long)]
    pub json: bool,
    /// Allow sizes above the desk-scale limit.
    #[arg(long)]
    pub force: bool,
}

/// Summary of a search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub nodes: u64,
    pub solutions: u64,
    pub failures: u64,
    pub pruned: u64,
    pub best_objective: Option<i64>,
    pub wall_time: f64,
    pub nodes_per_second: f64,
}

impl RunStats {
    pub fn from_trace(trace: &[InstantRecord], seconds: f64) -> RunStats {
        let nodes = trace.len() as u64;
        RunStats {
            nodes,
            solutions: trace.iter().filter(|r| r.is_solution()).count() as u64,
            failures: trace.iter().filter(|r| r.is_failure()).count() as u64,
            pruned: trace.iter().map(|r| r.pruned as u64).sum(),
            best_objective: trace.iter().filter_map(|r| r.objective).min(),
            wall_time: seconds,
            nodes_per_second: rate(nodes, seconds),
        }
    }

    pub fn from_reference(s: &SearchStats, seconds: f64) -> RunStats {
        RunStats {
            nodes: s.nodes,
            solutions: s.solutions,
            failures: s.failures,
            // every solved or failed node closes its subtree
            pruned: s.solutions + s.failures,
            best_objective: s.objectives.iter().copied().min(),
            wall_time: seconds,
            nodes_per_second: rate(s.nodes, seconds),
        }
    }

    /// Same search tree: equal counts and best objective.
    pub fn same_search(&self, other: &RunStats) -> bool {
        (self.nodes, self.solutions, self.failures, self.best_objective)
            == (other.nodes, other.solutions, other.failures, other.best_objective)
    }
}

fn rate(nodes: u64, seconds: f64) -> f64 {
    if seconds > 0.0 {
        nodes as f64 / seconds
    } else {
        0.0
    }
}

pub fn main_with(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let code = match cli.command {
        Command::Run(args) => cmd_run(&args, out, err),
        Command::Check { file } => cmd_check(&file, out, err),
        Command::Bench(args) => cmd_bench(&args, out, err),
    };
    code.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_DIAGNOSTICS
    })
}

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

fn load(file: &Path, err: &mut dyn Write) -> Result<Option<CheckedProgram>, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let name = file.display().to_string();
    let program = match stdlib::with_library(&name, &text) {
        Ok(p) => p,
        Err(stdlib::StdlibError::Parse { message, .. }) => {
            let parsed = crate::parser::parse_program(&crate::parser::SourceProgram::new(name.clone(), text));
            match parsed {
                Err(errs) => {
                    for e in &errs {
                        writeln!(err, "{}", crate::analysis::Diagnostic::from(e).render(&name))?;
                    }
                }
                Ok(_) => writeln!(err, "{name}: {message}")?,
            }
            return Ok(None);
        }
        Err(e) => return Err(e.into()),
    };
    match check_program(&program, "main") {
        Ok(c) => Ok(Some(c)),
        Err(diags) => {
            for d in &diags {
                writeln!(err, "{}", d.render(&name))?;
            }
            Ok(None)
        }
    }
}

fn load_model(arg: &str) -> Result<Model, Box<dyn std::error::Error>> {
    if let Some((problem, size)) = arg.split_once(':') {
        if !Path::new(arg).exists() {
            let problem: Problem = problem.parse()?;
            let size: usize = size.parse().map_err(|_| format!("bad model size `{size}`"))?;
            check_size(problem, size, true)?;
            return Ok(problem.model(size));
        }
    }
    let text = std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
    Ok(Model::parse(&text)?)
}

fn format_values(values: &[(String, String)]) -> String {
    values.iter().map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(" ")
}

fn trace_line(r: &InstantRecord) -> String {
    let mut line = format!("instant {} node {} depth {}: {}", r.instant, r.node, r.depth, r.code);
    if let Some(s) = &r.status {
        line += &format!(" status={s}");
    }
    line += &format!(" children={} pruned={}", r.branches, r.pruned);
    if !r.watched.is_empty() {
        line += &format!(" | {}", format_values(&r.watched));
    }
    for (i, c) in r.children.iter().enumerate() {
        if !c.is_empty() {
            line += &format!(" | child {}: {}", i + 1, format_values(c));
        }
    }
    line
}

#[derive(Serialize)]
struct RunReport<'a> {
    code: CompletionCode,
    stats: &'a RunStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a [InstantRecord]>,
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let Some(checked) = load(&args.file, err)? else { return Ok(EXIT_DIAGNOSTICS) };
    let config = MachineConfig {
        queue: args.queue,
        max_instants: args.max_instants,
        watch: args.watch.clone(),
        ..Default::default()
    };
    let mut machine = Machine::new(&checked, config);
    if let Some(arg) = &args.model {
        machine = machine.with_model(load_model(arg)?);
    }
    let start = Instant::now();
    let mut printed = 0;
    while machine.can_continue() {
        if let Err(e) = machine.step() {
            writeln!(err, "{}: runtime error: {e}", args.file.display())?;
            return Ok(EXIT_DIAGNOSTICS);
        }
        if !args.json && (args.trace || !args.watch.is_empty()) {
            for r in &machine.trace()[printed..] {
                writeln!(out, "{}", trace_line(r))?;
            }
            printed = machine.trace().len();
        }
    }
    let stats = RunStats::from_trace(machine.trace(), start.elapsed().as_secs_f64());
    if args.json {
        let report = RunReport { code: machine.code(), stats: &stats, trace: args.trace.then(|| machine.trace()) };
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        writeln!(
            out,
            "{}: nodes={} solutions={} failures={} pruned={}{}",
            machine.code(),
            stats.nodes,
            stats.solutions,
            stats.failures,
            stats.pruned,
            stats.best_objective.map(|b| format!(" best={b}")).unwrap_or_default()
        )?;
    }
    Ok(if machine.code() == CompletionCode::Stopped { EXIT_STOPPED } else { EXIT_OK })
}

pub fn cmd_check(file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match load(file, err)? {
        Some(c) => {
            writeln!(out, "{}: ok ({} variables)", file.display(), c.vars.len())?;
            Ok(EXIT_OK)
        }
        None => Ok(EXIT_DIAGNOSTICS),
    }
}

fn check_size(problem: Problem, size: usize, force: bool) -> Result<(), String> {
    let min = if problem == Problem::Golomb { 2 } else { 1 };
    if size < min {
        return Err(format!("{} needs size at least {min}", problem.name()));
    }
    if size > problem.desk_limit() && !force {
        return Err(format!(
            "{} {size} is above the desk-scale limit of {}; it may run for a very long time. Pass --force to run it anyway",
            problem.name(),
            problem.desk_limit()
        ));
    }
    Ok(())
}

pub fn default_strategy(problem: Problem) -> SearchStrategy {
    match problem {
        Problem::Queens => SearchStrategy::All,
        Problem::Latin => SearchStrategy::First,
        Problem::Golomb => SearchStrategy::Bab,
    }
}

/// The spacetime program solving a model under `strategy`.
pub fn solver_program(strategy: SearchStrategy) -> CheckedProgram {
    let name = if strategy == SearchStrategy::Bab { "minimize_bab" } else { "csp_search" };
    stdlib::asset(name).expect("shipped").check().expect("shipped strategies check")
}

/// Runs the spacetime solver on `model`; `First` stops at the first solution.
pub fn solve(model: &Model, strategy: SearchStrategy) -> Result<RunStats, crate::runtime::RuntimeError> {
    let program = solver_program(strategy);
    let start = Instant::now();
    let mut machine = Machine::new(&program, MachineConfig::default()).with_model(model.clone());
    while machine.can_continue() {
        let solved = machine.step()?.is_solution();
        if solved && strategy == SearchStrategy::First {
            break;
        }
    }
    Ok(RunStats::from_trace(machine.trace(), start.elapsed().as_secs_f64()))
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub problem: &'static str,
    pub size: usize,
    pub strategy: String,
    pub identical: bool,
    pub spacetime: RunStats,
    pub reference: RunStats,
    /// Spacetime time over reference time.
    pub overhead: f64,
}

pub fn bench(problem: Problem, size: usize, strategy: SearchStrategy) -> Result<BenchReport, crate::runtime::RuntimeError> {
    let model = problem.model(size);
    let spacetime = solve(&model, strategy)?;
    let start = Instant::now();
    let r = reference_search(&model, strategy);
    let reference = RunStats::from_reference(&r, start.elapsed().as_secs_f64());
    let overhead = if reference.wall_time > 0.0 { spacetime.wall_time / reference.wall_time } else { 0.0 };
    Ok(BenchReport {
        problem: problem.name(),
        size,
        strategy: strategy.to_string(),
        identical: spacetime.same_search(&reference),
        spacetime,
        reference,
        overhead,
    })
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if let Err(e) = check_size(args.problem, args.size, args.force) {
        writeln!(err, "error: {e}")?;
        return Ok(EXIT_DIAGNOSTICS);
    }
    let strategy = args.strategy.unwrap_or_else(|| default_strategy(args.problem));
    let report = bench(args.problem, args.size, strategy)?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        writeln!(out, "{} {} ({})", report.problem, report.size, report.strategy)?;
        writeln!(
            out,
            "{:<10} {:>10} {:>10} {:>10} {:>6} {:>10} {:>12}",
            "solver", "nodes", "solutions", "failures", "best", "time (s)", "nodes/s"
        )?;
        for (name, s) in [("spacetime", &report.spacetime), ("reference", &report.reference)] {
            writeln!(
                out,
                "{:<10} {:>10} {:>10} {:>10} {:>6} {:>10.4} {:>12.0}",
                name,
                s.nodes,
                s.solutions,
                s.failures,
                s.best_objective.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
                s.wall_time,
                s.nodes_per_second
            )?;
        }
        writeln!(
            out,
            "overhead {:.2}x, search trees {}",
            report.overhead,
            if report.identical { "identical" } else { "DIFFER" }
        )?;
    }
    Ok(if report.identical { EXIT_OK } else { EXIT_DIAGNOSTICS })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("stvm").chain(args.iter().copied())).unwrap()
    }

    fn exec(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with(parse(args), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn flags_parse() {
        let Command::Run(a) = parse(&["run", "f.st", "--queue", "bfs", "--watch", "x", "--watch", "y", "--max-instants", "9"]).command
        else {
            panic!()
        };
        assert_eq!((a.queue, a.watch.len(), a.max_instants), (QueueStrategy::Fifo, 2, Some(9)));
        assert!(Cli::try_parse_from(["stvm", "bench", "sudoku", "3"]).is_err());
    }

    #[test]
    fn oversized_bench_is_refused() {
        let (code, _, err) = exec(&["bench", "queens", "30"]);
        assert_eq!(code, EXIT_DIAGNOSTICS);
        assert!(err.contains("--force"), "{err}");
    }

    #[test]
    fn bench_reports_identical_trees() {
        let (code, out, _) = exec(&["bench", "queens", "5", "--json"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["identical"], true);
        assert_eq!(v["spacetime"]["solutions"], 10);
        let keys = ["\"nodes\"", "\"solutions\"", "\"failures\"", "\"pruned\"", "\"best_objective\"", "\"wall_time\""];
        let at: Vec<_> = keys.iter().map(|k| out.find(k).unwrap()).collect();
        assert!(at.windows(2).all(|w| w[0] < w[1]), "{out}");
    }

    #[test]
    fn first_solution_stops_early() {
        let s = solve(&crate::solver::latin(5), SearchStrategy::First).unwrap();
        assert_eq!(s.solutions, 1);
    }
}
