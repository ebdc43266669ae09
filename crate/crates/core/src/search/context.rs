use std::ops::ControlFlow;
use std::time::Instant;

use crate::csp::{Problem, VarId};

use super::{SearchConfig, SearchMonitor, SearchOutcome, SearchStats, SearchStatus, Stop, VarOrder};

pub(super) type Flow = ControlFlow<SearchStatus>;

/// Bookkeeping shared by every strategy during one run.
pub(super) struct Context<'m> {
    stop: Stop,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    start: Instant,
    pub var_order: VarOrder,
    pub stats: SearchStats,
    pub monitor: &'m mut dyn SearchMonitor,
    best: Option<Vec<i32>>,
    best_value: Option<i64>,
}

impl<'m> Context<'m> {
    pub fn new(config: &SearchConfig, monitor: &'m mut dyn SearchMonitor) -> Self {
        let start = Instant::now();
        Context {
            stop: config.stop,
            node_limit: config.node_limit,
            deadline: config.time_limit.map(|t| start + t),
            start,
            var_order: config.var_order,
            stats: SearchStats::default(),
            monitor,
            best: None,
            best_value: None,
        }
    }

    pub fn check_limits(&self) -> Flow {
        if self.node_limit.is_some_and(|l| self.stats.nodes_expanded >= l) {
            return Flow::Break(SearchStatus::NodeLimit);
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Flow::Break(SearchStatus::TimeLimit);
        }
        Flow::Continue(())
    }

    /// Records the complete assignment of `problem`.
    pub fn leaf(&mut self, problem: &Problem, discrepancy: u32) -> Flow {
        let solution = problem.solution().expect("leaf with unfixed variables");
        self.stats.leaves_visited += 1;
        self.monitor.on_leaf(&solution, discrepancy);
        let value = problem.objective().map(|o| o.evaluate(&solution));
        let improving = match (value, self.best_value) {
            (Some(v), Some(b)) => v < b,
            (Some(_), None) => true,
            (None, _) => self.best.is_none(),
        };
        if improving {
            self.stats.solutions += 1;
            self.stats.solution_discrepancy = Some(discrepancy);
            if let Some(v) = value {
                problem.incumbent().set(v);
            }
            self.best = Some(solution);
            self.best_value = value;
        }
        match (self.stop, self.best_value) {
            (Stop::FirstSolution, _) => Flow::Break(SearchStatus::StopMet),
            (Stop::OptimumFound(target), Some(b)) if b <= target => Flow::Break(SearchStatus::StopMet),
            (Stop::OptimumFound(_), None) => Flow::Break(SearchStatus::StopMet),
            _ => Flow::Continue(()),
        }
    }

    pub fn finish(mut self, flow: Flow) -> SearchOutcome {
        self.stats.wall_time = self.start.elapsed();
        let status = match flow {
            Flow::Break(s) => s,
            Flow::Continue(()) => SearchStatus::Exhausted,
        };
        SearchOutcome {
            solution: self.best,
            objective: self.best_value,
            status,
            stats: self.stats,
        }
    }
}

/// The `choose` step over unfixed variables not excluded by `skip`.
pub(super) fn choose(problem: &Problem, order: VarOrder, skip: Option<&[bool]>) -> Option<VarId> {
    let store = problem.store();
    let candidates = problem
        .vars()
        .filter(|v| !store.is_fixed(*v) && !skip.is_some_and(|s| s[v.index()]));
    match order {
        VarOrder::FirstFail => candidates.min_by_key(|&v| (store.size(v), v.index())),
        VarOrder::Input => candidates.min_by_key(|v| v.index()),
    }
}
