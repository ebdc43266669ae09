use crate::csp::{DomainStore, VarId};

use super::RankedValues;

/// The `rank` step of the search: scores the current values of a variable.
pub trait ValueEvaluator: Send {
    fn rank(&mut self, store: &DomainStore, var: VarId) -> RankedValues;
}

/// Prefers smaller values. On a tree whose values are `0..b` this makes the
/// value equal to the branch label.
#[derive(Debug, Clone, Copy, Default)]
pub struct AscendingValue;

impl ValueEvaluator for AscendingValue {
    fn rank(&mut self, store: &DomainStore, var: VarId) -> RankedValues {
        RankedValues::new(store.domain(var).iter().map(|v| (v, -(v as f64))).collect())
    }
}

/// Lowest reduced cost first: `rank(v) = -reduced_cost(v)`.
pub fn rank_reduced_cost(row: &[(i32, i64)]) -> RankedValues {
    RankedValues::new(row.iter().map(|&(v, rc)| (v, -(rc as f64))).collect())
}

/// Number of filled cells holding each symbol; index 0 counts holes and is
/// ignored. Symbols outside `1..=n` are not counted.
pub fn occurrence_counts(grid: &[Vec<i32>]) -> Vec<usize> {
    let n = grid.len();
    let mut counts = vec![0usize; n + 1];
    for &v in grid.iter().flatten() {
        if v >= 1 && (v as usize) <= n {
            counts[v as usize] += 1;
        }
    }
    counts
}

/// Ranks each candidate by how often it occurs in `grid` (0 marks a hole).
pub fn rank_occurrence(grid: &[Vec<i32>], candidates: impl IntoIterator<Item = i32>) -> RankedValues {
    rank_by_counts(&occurrence_counts(grid), candidates)
}

pub fn rank_by_counts(counts: &[usize], candidates: impl IntoIterator<Item = i32>) -> RankedValues {
    RankedValues::new(
        candidates
            .into_iter()
            .map(|v| {
                let c = usize::try_from(v).ok().and_then(|i| counts.get(i)).copied().unwrap_or(0);
                (v, c as f64)
            })
            .collect(),
    )
}
