//! Tour and latin square benchmarks: instance formats, generators, exact
//! oracles, solution checkers and experiment runs.

mod config;
mod experiment;
mod pls;
mod tsp;
mod tsplib;

pub use config::{generate_batch, BenchConfig, PlsBatch};
pub use experiment::{
    aggregate, comparison_table, format_table, run_experiment, run_pls, run_tsp, tour_target, Aggregate, Instance,
    Limits, OptimumSource, Outcome, RunRecord, Strategy,
};
pub use pls::{
    emit_pls, emit_pls_file, generate_pls, parse_pls, parse_pls_file, pls_model, random_latin_square, verify_latin,
    OccurrenceEvaluator, PlsInstance, PlsModel,
};
pub use tsp::{
    held_karp, tsp_model, tsp_model_with, verify_tour, ReducedCostEvaluator, TourLength, TspInstance, TspModel, HELD_KARP_MAX,
};
pub use tsplib::{emit_tsplib, parse_tsplib, parse_tsplib_file, WeightFormat};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("{0}: {1}")]
    Io(String, String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported {0}: {1}")]
    Unsupported(&'static str, String),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("{0}")]
    Duplicate(String),
    #[error("{n} cities exceed the exact solver limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("solution rejected: {0}")]
    BadSolution(String),
}
