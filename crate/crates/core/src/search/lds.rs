//! Limited discrepancy search on b-ary trees, one iteration per
//! discrepancy: iteration `k` visits exactly the leaves whose branch labels
//! sum to `k`, in depth-first order.

use crate::csp::Problem;
use crate::ranking::ValueEvaluator;

use super::context::{choose, Context, Flow};
use super::{SearchConfig, SearchMonitor, SearchOutcome};

struct Wave {
    /// Set when some branch was skipped for exceeding the budget.
    truncated: bool,
}

fn probe(
    problem: &mut Problem,
    evaluator: &mut dyn ValueEvaluator,
    ctx: &mut Context<'_>,
    wave: &mut Wave,
    spent: u32,
    budget: u32,
) -> Flow {
    ctx.check_limits()?;
    let Some(var) = choose(problem, ctx.var_order, None) else {
        if spent == budget {
            return ctx.leaf(problem, spent);
        }
        return Flow::Continue(());
    };
    ctx.stats.nodes_expanded += 1;
    let ranked = evaluator.rank(problem.store(), var);
    for (label, value) in ranked.values().enumerate() {
        let cost = spent + label as u32;
        if cost > budget {
            wave.truncated = true;
            break;
        }
        let level = problem.save_state();
        let flow = match problem.assign(var, value).and_then(|_| problem.propagate()) {
            Ok(()) => probe(problem, evaluator, ctx, wave, cost, budget),
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

/// Standalone limited discrepancy search; the partitioner, selector and
/// depth bound of `config` are ignored.
pub fn lds_solve(
    problem: &mut Problem,
    evaluator: &mut dyn ValueEvaluator,
    config: &SearchConfig,
) -> SearchOutcome {
    lds_solve_with(problem, evaluator, config, &mut ())
}

pub fn lds_solve_with(
    problem: &mut Problem,
    evaluator: &mut dyn ValueEvaluator,
    config: &SearchConfig,
    monitor: &mut dyn SearchMonitor,
) -> SearchOutcome {
    let mut ctx = Context::new(config, monitor);
    let root = problem.save_state();
    let flow = (|| {
        if problem.propagate_all().is_err() {
            ctx.stats.fails += 1;
            return Flow::Continue(());
        }
        for budget in 0.. {
            let mut wave = Wave { truncated: false };
            probe(problem, evaluator, &mut ctx, &mut wave, 0, budget)?;
            if !wave.truncated {
                break;
            }
        }
        Flow::Continue(())
    })();
    problem.restore_state(root);
    ctx.finish(flow)
}
