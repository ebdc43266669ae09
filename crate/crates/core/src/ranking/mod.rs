//! Value evaluators and domain partitioners.

mod evaluators;
mod partition;

pub use evaluators::{
    occurrence_counts, rank_by_counts, rank_occurrence, rank_reduced_cost, AscendingValue,
    ValueEvaluator,
};
pub use partition::{
    partition_best_plateau, partition_chunks, partition_percentile, partition_plateau,
    partition_singletons, partition_star, DomainPartition, Partitioner, RankingError, Tolerance,
};

use std::cmp::Ordering;

/// Domain values with their heuristic rank, best (highest rank) first.
/// Equal ranks are ordered by increasing value.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedValues {
    entries: Vec<(i32, f64)>,
}

impl RankedValues {
    pub fn new(mut entries: Vec<(i32, f64)>) -> Self {
        assert!(
            entries.iter().all(|e| !e.1.is_nan()),
            "ranks must not be NaN"
        );
        entries.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(Ordering::Equal)
                .then(a.0.cmp(&b.0))
        });
        RankedValues { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(i32, f64)] {
        &self.entries
    }

    pub fn values(&self) -> impl Iterator<Item = i32> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn rank_of(&self, value: i32) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == value).map(|e| e.1)
    }
}
