//! The decomposition driver: select an open node; at the depth bound solve
//! it by depth-first labelling, otherwise choose a variable, rank and
//! partition its domain and open one child per cell.
//!
//! The frontier holds, for every expanded node, its next unopened child.
//! A child is materialized (and propagated) when it is selected, and its
//! next sibling takes its place in the frontier. Sibling keys only grow, so
//! this visits nodes in the same order as opening all children at once.
//! Node states are not stored: the driver keeps the decision path of the
//! current state and moves between nodes by restoring to the common
//! ancestor and replaying the remaining decisions.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::csp::{Level, Problem, VarId};
use crate::ranking::ValueEvaluator;

use super::context::{choose, Context, Flow};
use super::dfs::solve_subproblem_dfs;
use super::{SearchConfig, SearchMonitor, SearchOutcome, Selector};

/// A node that was branched on.
struct Expansion {
    /// Expansion and cell leading to this node, `None` for the root.
    node: Option<(u32, u8)>,
    var: VarId,
    values: Box<[i32]>,
    /// Cell `r` is `values[bounds[r]..bounds[r + 1]]`.
    bounds: Box<[u32]>,
}

impl Expansion {
    fn cells(&self) -> usize {
        self.bounds.len() - 1
    }

    fn cell(&self, r: u8) -> &[i32] {
        let r = r as usize;
        &self.values[self.bounds[r] as usize..self.bounds[r + 1] as usize]
    }
}

#[derive(PartialEq, Eq)]
struct Entry {
    discrepancy: u32,
    max_label: u8,
    labels: Box<[u8]>,
    exp: u32,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.discrepancy, self.max_label, &self.labels).cmp(&(
            other.discrepancy,
            other.max_label,
            &other.labels,
        ))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Applied {
    exp: u32,
    cell: u8,
    level: Level,
}

struct Driver<'a, 'm> {
    problem: &'a mut Problem,
    evaluator: &'a mut dyn ValueEvaluator,
    config: &'a SearchConfig,
    ctx: Context<'m>,
    exps: Vec<Expansion>,
    frontier: BinaryHeap<Reverse<Entry>>,
    path: Vec<Applied>,
    branched: Vec<bool>,
    chain: Vec<(u32, u8)>,
}

impl Driver<'_, '_> {
    fn key(&self, labels: Box<[u8]>, exp: u32) -> Entry {
        let (discrepancy, max_label) = match self.config.selector {
            Selector::Dfs => (0, 0),
            Selector::Lds => (labels.iter().map(|&l| l as u32).sum(), 0),
            Selector::LdsPreference => (
                labels.iter().map(|&l| l as u32).sum(),
                labels.iter().copied().max().unwrap_or(0),
            ),
        };
        Entry {
            discrepancy,
            max_label,
            labels,
            exp,
        }
    }

    /// Handles the node the current state stands for.
    fn visit(&mut self, labels: &[u8]) -> Flow {
        self.ctx.check_limits()?;
        let at_bound = self.config.depth_bound.is_some_and(|d| labels.len() >= d);
        let var = if at_bound {
            None
        } else {
            choose(self.problem, self.ctx.var_order, Some(&self.branched))
        };
        let Some(var) = var else {
            let discrepancy = labels.iter().map(|&l| l as u32).sum();
            self.ctx.monitor.on_subproblem(labels, discrepancy);
            return solve_subproblem_dfs(self.problem, self.evaluator, &mut self.ctx, discrepancy);
        };
        self.ctx.stats.nodes_expanded += 1;
        let ranked = self.evaluator.rank(self.problem.store(), var);
        let partition = self.config.partitioner.partition(&ranked);
        assert!(partition.len() <= 256, "at most 256 cells per partition");
        let mut values = Vec::with_capacity(ranked.len());
        let mut bounds = vec![0u32];
        for cell in partition.cells() {
            values.extend_from_slice(cell);
            bounds.push(values.len() as u32);
        }
        let node = self.path.last().map(|a| (a.exp, a.cell));
        let exp = self.exps.len() as u32;
        self.exps.push(Expansion {
            node,
            var,
            values: values.into_boxed_slice(),
            bounds: bounds.into_boxed_slice(),
        });
        let mut child = Vec::with_capacity(labels.len() + 1);
        child.extend_from_slice(labels);
        child.push(0);
        let entry = self.key(child.into_boxed_slice(), exp);
        self.frontier.push(Reverse(entry));
        Flow::Continue(())
    }

    fn unwind_to(&mut self, len: usize) {
        if len < self.path.len() {
            let level = self.path[len].level;
            for a in self.path.drain(len..) {
                let var = self.exps[a.exp as usize].var;
                self.branched[var.index()] = false;
            }
            self.problem.restore_state(level);
        }
    }

    /// Moves the current state to the node reached by taking `cell` of
    /// expansion `exp`. Fails when some decision on the way is refuted.
    fn goto(&mut self, exp: u32, cell: u8) -> bool {
        let mut chain = std::mem::take(&mut self.chain);
        chain.clear();
        chain.push((exp, cell));
        let mut node = self.exps[exp as usize].node;
        while let Some((e, c)) = node {
            chain.push((e, c));
            node = self.exps[e as usize].node;
        }
        chain.reverse();
        let common = self
            .path
            .iter()
            .zip(&chain)
            .take_while(|(a, &(e, c))| a.exp == e && a.cell == c)
            .count();
        let common = common.min(chain.len() - 1);
        self.unwind_to(common);
        let mut ok = true;
        for &(e, c) in &chain[common..] {
            let level = self.problem.save_state();
            let x = &self.exps[e as usize];
            let var = x.var;
            let result = self
                .problem
                .restrict(var, x.cell(c))
                .and_then(|_| self.problem.propagate());
            if result.is_err() {
                self.problem.restore_state(level);
                ok = false;
                break;
            }
            self.branched[var.index()] = true;
            self.path.push(Applied {
                exp: e,
                cell: c,
                level,
            });
        }
        self.chain = chain;
        ok
    }

    fn run(&mut self) -> Flow {
        if self.problem.propagate_all().is_err() {
            self.ctx.stats.fails += 1;
            return Flow::Continue(());
        }
        self.visit(&[])?;
        while let Some(Reverse(entry)) = self.frontier.pop() {
            let cell = *entry.labels.last().unwrap();
            if (cell as usize) + 1 < self.exps[entry.exp as usize].cells() {
                let mut sibling = entry.labels.clone();
                *sibling.last_mut().unwrap() += 1;
                let next = self.key(sibling, entry.exp);
                self.frontier.push(Reverse(next));
            }
            if !self.goto(entry.exp, cell) {
                self.ctx.stats.fails += 1;
                continue;
            }
            self.visit(&entry.labels)?;
        }
        Flow::Continue(())
    }
}

/// Runs the decomposition search of `config` on `problem`.
///
/// The problem is returned to its initial state afterwards. A solution's
/// objective value is published through the problem's incumbent.
pub fn dbs_solve(
    problem: &mut Problem,
    evaluator: &mut dyn ValueEvaluator,
    config: &SearchConfig,
) -> SearchOutcome {
    dbs_solve_with(problem, evaluator, config, &mut ())
}

pub fn dbs_solve_with(
    problem: &mut Problem,
    evaluator: &mut dyn ValueEvaluator,
    config: &SearchConfig,
    monitor: &mut dyn SearchMonitor,
) -> SearchOutcome {
    if let Some(d) = config.depth_bound {
        assert!(d <= problem.num_vars(), "depth bound {d} exceeds the number of variables");
    }
    let root = problem.save_state();
    let n = problem.num_vars();
    let mut driver = Driver {
        problem,
        evaluator,
        config,
        ctx: Context::new(config, monitor),
        exps: Vec::new(),
        frontier: BinaryHeap::new(),
        path: Vec::new(),
        branched: vec![false; n],
        chain: Vec::new(),
    };
    let flow = driver.run();
    driver.path.clear();
    let Driver { problem, ctx, .. } = driver;
    problem.restore_state(root);
    ctx.finish(flow)
}
