use crate::csp::Problem;
use crate::ranking::ValueEvaluator;

use super::context::{choose, Context, Flow};
use super::{SearchConfig, SearchMonitor, SearchOutcome};

/// Depth-first labelling below the current state of `problem`: one value per
/// branch, best ranked first. Every leaf is reported with `discrepancy`.
/// Returns with the state of `problem` unchanged.
pub(super) fn solve_subproblem_dfs(
    problem: &mut Problem,
    evaluator: &mut dyn ValueEvaluator,
    ctx: &mut Context<'_>,
    discrepancy: u32,
) -> Flow {
    ctx.check_limits()?;
    let Some(var) = choose(problem, ctx.var_order, None) else {
        return ctx.leaf(problem, discrepancy);
    };
    ctx.stats.nodes_expanded += 1;
    let ranked = evaluator.rank(problem.store(), var);
    for value in ranked.values() {
        let level = problem.save_state();
        let flow = match problem.assign(var, value).and_then(|_| problem.propagate()) {
            Ok(()) => solve_subproblem_dfs(problem, evaluator, ctx, discrepancy),
            Err(_) => {
                ctx.stats.fails += 1;
                Flow::Continue(())
            }
        };
        problem.restore_state(level);
        flow?;
    }
    Flow::Continue(())
}

/// Plain depth-first search from the root.
pub fn dfs_solve(
    problem: &mut Problem,
    evaluator: &mut dyn ValueEvaluator,
    config: &SearchConfig,
    monitor: &mut dyn SearchMonitor,
) -> SearchOutcome {
    let mut ctx = Context::new(config, monitor);
    let root = problem.save_state();
    let flow = match problem.propagate_all() {
        Ok(()) => solve_subproblem_dfs(problem, evaluator, &mut ctx, 0),
        Err(_) => {
            ctx.stats.fails += 1;
            Flow::Continue(())
        }
    };
    problem.restore_state(root);
    ctx.finish(flow)
}
