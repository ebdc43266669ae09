//! Iterative broadening: depth-first passes restricted to the best `c_t`
//! ranked values of every variable, restarting from the root for each
//! cutoff. Statistics include the revisits of earlier passes.

use crate::csp::Problem;
use crate::ranking::ValueEvaluator;

use super::context::{choose, Context, Flow};
use super::{SearchConfig, SearchMonitor, SearchOutcome};

fn pass(
    problem: &mut Problem,
    evaluator: &mut dyn ValueEvaluator,
    ctx: &mut Context<'_>,
    cutoff: usize,
    discrepancy: u32,
) -> Flow {
    ctx.check_limits()?;
    let Some(var) = choose(problem, ctx.var_order, None) else {
        return ctx.leaf(problem, discrepancy);
    };
    ctx.stats.nodes_expanded += 1;
    let ranked = evaluator.rank(problem.store(), var);
    for (label, value) in ranked.values().take(cutoff).enumerate() {
        let level = problem.save_state();
        let flow = match problem.assign(var, value).and_then(|_| problem.propagate()) {
            Ok(()) => pass(problem, evaluator, ctx, cutoff, discrepancy + label as u32),
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

/// Runs one pass per cutoff, in the given order; the partitioner, selector
/// and depth bound of `config` are ignored.
pub fn ib_solve(
    problem: &mut Problem,
    evaluator: &mut dyn ValueEvaluator,
    cutoffs: &[usize],
    config: &SearchConfig,
) -> SearchOutcome {
    ib_solve_with(problem, evaluator, cutoffs, config, &mut ())
}

pub fn ib_solve_with(
    problem: &mut Problem,
    evaluator: &mut dyn ValueEvaluator,
    cutoffs: &[usize],
    config: &SearchConfig,
    monitor: &mut dyn SearchMonitor,
) -> SearchOutcome {
    assert!(
        !cutoffs.is_empty() && cutoffs[0] > 0 && cutoffs.windows(2).all(|w| w[0] < w[1]),
        "cutoffs must be positive and strictly increasing"
    );
    let mut ctx = Context::new(config, monitor);
    let root = problem.save_state();
    let flow = (|| {
        if problem.propagate_all().is_err() {
            ctx.stats.fails += 1;
            return Flow::Continue(());
        }
        for &c in cutoffs {
            ctx.monitor.on_iteration(c);
            pass(problem, evaluator, &mut ctx, c, 0)?;
        }
        Flow::Continue(())
    })();
    problem.restore_state(root);
    ctx.finish(flow)
}
