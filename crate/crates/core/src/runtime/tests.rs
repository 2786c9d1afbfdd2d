use super::*;
use crate::analysis::check_program;
use crate::ast::VarRef;
use crate::lattice::LatticeValue;
use crate::parser::{parse_statement, parse_str};

fn machine(src: &str, config: MachineConfig) -> Machine {
    let program = parse_str(src).unwrap();
    let checked = check_program(&program, "main").unwrap_or_else(|e| panic!("{e:?}"));
    Machine::new(&checked, config)
}

fn run(src: &str) -> Machine {
    let mut m = machine(src, MachineConfig::default());
    m.execute().unwrap();
    m
}

fn counts_of(src: &str) -> Vec<(String, String)> {
    let s = parse_statement(src).unwrap();
    let mut out: Vec<_> = can_analysis(&s)
        .into_iter()
        .map(|(v, c)| (v.as_name().unwrap_or_default().to_string(), c.to_string()))
        .collect();
    out.sort();
    out
}

#[test]
fn guarded_space_sees_concurrent_increment() {
    let src = "proc main = world_line LMax x = 0; par when x |= 1 then space inc(x^rw) end end <> inc(x^rw) end";
    let config = MachineConfig { max_instants: Some(1), watch: vec!["x".into()], ..Default::default() };
    let mut m = machine(src, config);
    m.execute().unwrap();
    assert_eq!(m.instants(), 1);
    let rec = &m.trace()[0];
    assert_eq!(rec.watched, vec![("x".to_string(), "1".to_string())]);
    assert_eq!(rec.branches, 1);
    assert_eq!(rec.children, vec![vec![("x".to_string(), "2".to_string())]]);
    let pending = m.queue().pending();
    assert_eq!(pending.len(), 1);
    let values: Vec<_> = pending[0].store.iter().map(|(_, v)| v.clone()).collect();
    assert_eq!(values, vec![LatticeValue::LMax(2)]);
}

#[test]
fn completion_codes() {
    assert_eq!(run("proc main = nothing").code(), CompletionCode::Terminated);
    let m = run("proc main = stop");
    assert_eq!((m.instants(), m.code()), (1, CompletionCode::Stopped));
    // no branch was created, so nothing is left to explore
    let m = run("proc main = pause; nothing");
    assert_eq!((m.instants(), m.code()), (1, CompletionCode::Paused));
}

#[test]
fn paused_program_resumes_on_child() {
    let m = run("proc main = space nothing end; pause; nothing");
    assert_eq!((m.instants(), m.code()), (2, CompletionCode::Terminated));
}

#[test]
fn parallel_residuals() {
    let mut m = machine("proc main = par nothing || pause end; space nothing end; pause", MachineConfig::default());
    m.step().unwrap();
    assert!(matches!(m.residual(), crate::ast::Statement::Seq(..)));

    // the conjunction exits as soon as one side terminates
    let mut m = machine("proc main = space nothing end; par pause <> nothing end", MachineConfig::default());
    m.step().unwrap();
    assert_eq!(m.code(), CompletionCode::Paused);
    assert_eq!(m.residual(), &crate::ast::Statement::Nothing);
    m.step().unwrap();
    assert_eq!(m.code(), CompletionCode::Terminated);
}

#[test]
fn prune_is_absorbed_by_disjunction() {
    let m = run("proc main = par prune || space nothing end end; pause");
    assert_eq!(m.trace()[0].branches, 1);
    assert_eq!(m.trace()[0].pruned, 0);
    let m = run("proc main = par prune <> space nothing end end; pause");
    assert_eq!(m.trace()[0].branches, 0);
    assert_eq!(m.trace()[0].pruned, 1);
}

#[test]
fn can_analysis_counts_both_branches() {
    let c = counts_of("when x |= y then f(write x, read y) else g(read x, write y) end");
    assert_eq!(c, vec![("x".into(), "(1,0,1)".into()), ("y".into(), "(1,0,1)".into())]);
    let c = counts_of("f(a^rw); g(a^r)");
    assert_eq!(c, vec![("a".into(), "(0,1,1)".into())]);
}

#[test]
fn can_analysis_stops_at_pause() {
    let c = counts_of("f(a^rw); pause; g(a^r)");
    assert_eq!(c, vec![("a".into(), "(0,1,0)".into())]);
    assert!(can_analysis(&parse_statement("nothing").unwrap()).get(&VarRef::name("a")).is_none());
}

#[test]
fn reads_wait_for_writes() {
    // the read is textually first but must observe the write
    let src = "proc main = world_line LMax x = 0; single_space LMax y = 0; \
               par y <- x <> x <- 5 end";
    let config = MachineConfig { watch: vec!["y".into()], ..Default::default() };
    let mut m = machine(src, config);
    m.execute().unwrap();
    assert_eq!(m.trace()[0].watched, vec![("y".to_string(), "5".to_string())]);
}

#[test]
fn single_time_variables_reset_each_instant() {
    let src = "proc main = single_space LMax n = 0; \
               loop single_time LMax t = 0; inc(t^rw); join_into(n^w, t); space nothing end; pause end";
    let config = MachineConfig { max_instants: Some(3), watch: vec!["n".into()], ..Default::default() };
    let mut m = machine(src, config);
    m.execute().unwrap();
    let ns: Vec<_> = m.trace().iter().map(|r| r.watched[0].1.clone()).collect();
    assert_eq!(ns, vec!["1", "1", "1"]);
}

#[test]
fn world_line_values_follow_the_node() {
    let src = "proc main = world_line LMax d = 0; \
               flow space inc(d^rw) end; space nothing end end";
    let config = MachineConfig { max_instants: Some(4), watch: vec!["d".into()], ..Default::default() };
    let mut m = machine(src, config);
    m.execute().unwrap();
    let ds: Vec<_> = m.trace().iter().map(|r| r.watched[0].1.clone()).collect();
    // root, left child, its left child, its left child
    assert_eq!(ds, vec!["0", "1", "2", "3"]);
}

#[test]
fn bfs_visits_levels_in_order() {
    let src = "proc main = world_line LMax d = 0; \
               flow space inc(d^rw) end; space inc(d^rw) end end";
    let config = MachineConfig {
        queue: QueueStrategy::Fifo,
        max_instants: Some(7),
        watch: vec!["d".into()],
        ..Default::default()
    };
    let mut m = machine(src, config);
    m.execute().unwrap();
    let depths: Vec<u32> = m.trace().iter().map(|r| r.depth).collect();
    assert_eq!(depths, vec![0, 1, 1, 2, 2, 2, 2]);
}

#[test]
fn bounded_binary_tree_has_seven_nodes() {
    let src = "proc main = world_line LMax depth = -1; single_space LMax limit = 2; \
               par loop space nothing end; space nothing end; pause end \
               <> flow inc(depth^rw) end \
               <> flow when depth |= limit then prune end end end";
    let m = run(src);
    assert_eq!(m.instants(), 7);
    let pruned: usize = m.trace().iter().map(|r| r.pruned).sum();
    assert_eq!(pruned, 8);
}

#[test]
fn instantaneous_runtime_loop_is_reported() {
    // the checker rejects this, so build the statement directly
    let s = parse_statement("loop nothing end").unwrap();
    let checked = crate::analysis::CheckedProgram { body: s, vars: Default::default() };
    let mut m = Machine::new(&checked, MachineConfig::default());
    assert!(matches!(m.execute(), Err(RuntimeError::InstantaneousLoop(_))));
}

#[test]
fn guard_ignores_writes_in_its_own_branches() {
    // rejected statically, but the runtime must still decide the guard
    let s = parse_statement(
        "world_line LMax x = 1; world_line LMax y = 0; \
         when x |= y then join_into(x^w, y) else join_into(y^w, x) end; space nothing end",
    )
    .unwrap();
    let checked = crate::analysis::CheckedProgram { body: s, vars: Default::default() };
    let config = MachineConfig { max_instants: Some(1), watch: vec!["y".into()], ..Default::default() };
    let mut m = Machine::new(&checked, config);
    m.execute().unwrap();
    assert_eq!(m.trace()[0].watched, vec![("y".to_string(), "0".to_string())]);
    assert_eq!(m.trace()[0].branches, 1);
}

#[test]
fn guard_waits_for_an_earlier_write() {
    let src = "proc main = world_line LMax a = 0; single_space LMax b = 0; \
               par when a |= 3 then inc(b^rw) end <> a <- 3 end";
    let config = MachineConfig { watch: vec!["b".into()], ..Default::default() };
    let mut m = machine(src, config);
    m.execute().unwrap();
    assert_eq!(m.trace()[0].watched, vec![("b".to_string(), "1".to_string())]);
}

#[test]
fn pruned_instants_push_nothing() {
    let m = run("proc main = prune; pause");
    assert_eq!(m.instants(), 1);
    assert_eq!((m.trace()[0].branches, m.trace()[0].pruned), (0, 1));
    // sequencing keeps both the branch and the prune
    let m = run("proc main = space nothing end; prune; pause");
    assert_eq!(m.instants(), 2);
    assert_eq!((m.trace()[0].branches, m.trace()[0].pruned), (1, 1));
    assert!(m.queue().pending().is_empty());
}
