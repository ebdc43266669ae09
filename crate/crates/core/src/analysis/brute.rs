use crate::ranking::AscendingValue;
use crate::search::{dbs_solve_with, ib_solve_with, synthetic_tree, SearchConfig, Stop, Trace};

use super::{AnalysisError, KahanSum, ProbabilityModel};

/// Largest tree the enumeration oracles accept.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

fn guard(b: usize, n: usize) -> Result<(), AnalysisError> {
    match (b as u64).checked_pow(n as u32) {
        Some(leaves) if leaves <= BRUTE_FORCE_LIMIT => Ok(()),
        _ => Err(AnalysisError::TooLarge { b, n }),
    }
}

/// Cumulative success after each leaf of `order`, a sequence of label paths.
pub fn brute_force_success(order: &[Vec<i32>], model: &ProbabilityModel) -> Result<Vec<f64>, AnalysisError> {
    let (b, n) = (model.width(), model.depth());
    guard(b, n)?;
    let mut sum = KahanSum::default();
    order
        .iter()
        .map(|leaf| {
            if leaf.len() != n || leaf.iter().any(|&l| l < 0 || l as usize >= b) {
                return Err(AnalysisError::BadLeaf(leaf.clone()));
            }
            sum.add(model.leaf_mass(leaf));
            Ok(sum.value())
        })
        .collect()
}

/// Runs the decomposition search exhaustively on the unconstrained tree of
/// width `b` and depth `n` and records its visiting order.
pub fn trace_synthetic(b: usize, n: usize, config: &SearchConfig) -> Result<Trace, AnalysisError> {
    guard(b, n)?;
    let mut problem = synthetic_tree(b, n);
    let mut trace = Trace::default();
    let config = config.clone().with_stop(Stop::Exhausted);
    dbs_solve_with(&mut problem, &mut AscendingValue, &config, &mut trace);
    Ok(trace)
}

/// Same for iterative broadening with the given cutoffs.
pub fn trace_synthetic_ib(b: usize, n: usize, cutoffs: &[usize]) -> Result<Trace, AnalysisError> {
    guard(b, n)?;
    let mut problem = synthetic_tree(b, n);
    let mut trace = Trace::default();
    let config = SearchConfig::default().with_stop(Stop::Exhausted);
    ib_solve_with(&mut problem, &mut AscendingValue, cutoffs, &config, &mut trace);
    Ok(trace)
}
