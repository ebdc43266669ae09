//! Success probabilities of ordered search trees under independent branch
//! success rates, with exact formulas, an enumeration oracle, cumulative
//! curves and checks of the strategy comparisons.

mod brute;
mod curves;
mod model;
mod partitions;
mod theorems;

pub use brute::{brute_force_success, trace_synthetic, trace_synthetic_ib, BRUTE_FORCE_LIMIT};
pub use curves::{
    cumulative_success, curves_csv, for_each_leaf, log_budgets, standard_curves, success_at_budgets, CurvePoint,
    LeafOrder, Schedule,
};
pub use model::{
    make_distribution, random_model, random_model_seeded, DistributionSpec, Family, KahanSum, ProbabilityModel,
};
pub use partitions::{
    dbs_leaves, enumerate_partitions, lds_leaves, lds_leaves_upto, prob_dbs, prob_lds, prob_lds_upto, PartitionEntry,
    PartitionSet,
};
pub use theorems::{
    check_theorem1, check_theorem2, check_theorem3, theorem3_equality_pairs, verify_theorems, EqualityPair,
    Theorem1Check, TheoremCheck, VerificationReport, THEOREM_TOLERANCE,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("a model needs at least one branch and one level")]
    EmptyModel,
    #[error("branch probabilities must be finite and nonnegative")]
    NegativeProbability,
    #[error("branch probabilities must be non-increasing")]
    NotSorted,
    #[error("branch probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("distribution has no mass")]
    Degenerate,
    #[error("invalid {0} = {1}")]
    BadParameter(&'static str, f64),
    #[error("{count} plateaus of size {size} do not cover width {b}")]
    BadPlateaus { count: usize, size: usize, b: usize },
    #[error("discrepancy {k} outside 0..={max}")]
    DiscrepancyOutOfRange { k: usize, max: usize },
    #[error("subdomain size {c} outside 1..={b}")]
    WidthOutOfRange { c: usize, b: usize },
    #[error("tree of width {b} and depth {n} is too large to enumerate")]
    TooLarge { b: usize, n: usize },
    #[error("leaf {0:?} does not belong to the tree")]
    BadLeaf(Vec<i32>),
    #[error("precondition violated: {0}")]
    Precondition(String),
}
