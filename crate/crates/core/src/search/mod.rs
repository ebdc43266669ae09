//! Tree search strategies: the decomposition driver with its frontier
//! selectors, plain depth-first labelling, limited discrepancy search and
//! iterative broadening.

mod context;
mod dfs;
mod driver;
mod ib;
mod lds;

pub use dfs::dfs_solve;
pub use driver::{dbs_solve, dbs_solve_with};
pub use ib::{ib_solve, ib_solve_with};
pub use lds::{lds_solve, lds_solve_with};

use std::time::Duration;

use crate::ranking::{Partitioner, Tolerance};

/// Rule of the `choose` step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarOrder {
    /// Smallest current domain, lowest index on ties.
    #[default]
    FirstFail,
    /// Lowest index.
    Input,
}

/// Order in which open nodes of the subproblem generation tree are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selector {
    /// Leftmost path first.
    Dfs,
    /// Smallest discrepancy first, depth-first within a discrepancy.
    #[default]
    Lds,
    /// Smallest discrepancy, then smallest maximum branch label, then
    /// depth-first.
    LdsPreference,
}

/// When a search may end before the tree is exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stop {
    #[default]
    FirstSolution,
    /// Ends as soon as a solution of at most this objective value is found.
    OptimumFound(i64),
    /// Explores everything; with an objective the best solution is kept.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub var_order: VarOrder,
    pub partitioner: Partitioner,
    pub selector: Selector,
    /// Number of partitioning decisions after which a node is handed to the
    /// subproblem solver. `None` partitions until every variable has been
    /// branched on or fixed.
    pub depth_bound: Option<usize>,
    pub stop: Stop,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            var_order: VarOrder::FirstFail,
            partitioner: Partitioner::Plateau(Tolerance::Absolute(0.0)),
            selector: Selector::Lds,
            depth_bound: None,
            stop: Stop::FirstSolution,
            node_limit: None,
            time_limit: None,
        }
    }
}

impl SearchConfig {
    /// Decomposition with the given partitioner, explored by discrepancy.
    pub fn dbs(partitioner: Partitioner) -> Self {
        SearchConfig {
            partitioner,
            ..SearchConfig::default()
        }
    }

    /// Single-valued partitions explored by discrepancy.
    pub fn lds() -> Self {
        SearchConfig::dbs(Partitioner::Singletons)
    }

    pub fn with_selector(mut self, selector: Selector) -> Self {
        self.selector = selector;
        self
    }

    pub fn with_stop(mut self, stop: Stop) -> Self {
        self.stop = stop;
        self
    }

    pub fn with_depth_bound(mut self, d: usize) -> Self {
        self.depth_bound = Some(d);
        self
    }

    pub fn with_var_order(mut self, order: VarOrder) -> Self {
        self.var_order = order;
        self
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchStats {
    /// Propagation failures (dead ends).
    pub fails: u64,
    /// Nodes that were branched on.
    pub nodes_expanded: u64,
    /// Complete consistent assignments reached.
    pub leaves_visited: u64,
    /// Improving solutions found.
    pub solutions: u64,
    /// Discrepancy of the returned solution: of its subproblem for the
    /// decomposition driver, of its leaf otherwise.
    pub solution_discrepancy: Option<u32>,
    pub wall_time: Duration,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.fails += other.fails;
        self.nodes_expanded += other.nodes_expanded;
        self.leaves_visited += other.leaves_visited;
        self.solutions += other.solutions;
        self.wall_time += other.wall_time;
        if other.solution_discrepancy.is_some() {
            self.solution_discrepancy = other.solution_discrepancy;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    /// The stop criterion was met.
    StopMet,
    /// Every node was explored.
    Exhausted,
    NodeLimit,
    TimeLimit,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub solution: Option<Vec<i32>>,
    pub objective: Option<i64>,
    pub status: SearchStatus,
    pub stats: SearchStats,
}

/// Observation hooks, all optional.
pub trait SearchMonitor {
    /// A node of the decomposition tree handed to the subproblem solver.
    fn on_subproblem(&mut self, _labels: &[u8], _discrepancy: u32) {}
    /// A complete consistent assignment.
    fn on_leaf(&mut self, _solution: &[i32], _discrepancy: u32) {}
    /// Start of an iterative broadening pass with the given cutoff.
    fn on_iteration(&mut self, _cutoff: usize) {}
}

impl SearchMonitor for () {}

/// Records every leaf and subproblem in visiting order.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub leaves: Vec<Vec<i32>>,
    pub leaf_discrepancies: Vec<u32>,
    /// Labels of each subproblem and the index of its first leaf.
    pub subproblems: Vec<(Vec<u8>, usize)>,
    /// Index of the first leaf of each broadening pass.
    pub iterations: Vec<(usize, usize)>,
}

impl Trace {
    /// Leaves of subproblem `i`.
    pub fn subproblem_leaves(&self, i: usize) -> &[Vec<i32>] {
        let start = self.subproblems[i].1;
        let end = self.subproblems.get(i + 1).map_or(self.leaves.len(), |s| s.1);
        &self.leaves[start..end]
    }

    /// Leaves of broadening pass `i`.
    pub fn iteration_leaves(&self, i: usize) -> &[Vec<i32>] {
        let start = self.iterations[i].1;
        let end = self.iterations.get(i + 1).map_or(self.leaves.len(), |s| s.1);
        &self.leaves[start..end]
    }
}

impl SearchMonitor for Trace {
    fn on_subproblem(&mut self, labels: &[u8], _discrepancy: u32) {
        self.subproblems.push((labels.to_vec(), self.leaves.len()));
    }

    fn on_leaf(&mut self, solution: &[i32], discrepancy: u32) {
        self.leaves.push(solution.to_vec());
        self.leaf_discrepancies.push(discrepancy);
    }

    fn on_iteration(&mut self, cutoff: usize) {
        self.iterations.push((cutoff, self.leaves.len()));
    }
}

/// Unconstrained problem with `depth` variables over `0..width`. Under
/// [`crate::ranking::AscendingValue`] every value equals its branch label,
/// so a leaf's assignment is its path.
pub fn synthetic_tree(width: usize, depth: usize) -> crate::csp::Problem {
    assert!(width >= 1 && depth >= 1);
    let mut p = crate::csp::Problem::new();
    for _ in 0..depth {
        p.add_var_range(0, width as i32 - 1);
    }
    p
}
