//! Runs strategies over instances and summarizes the results.

use std::fmt::{self, Write as _};
use std::time::Duration;

use rayon::prelude::*;

use crate::ranking::{Partitioner, Tolerance};
use crate::search::{
    dbs_solve, dfs_solve, ib_solve, lds_solve, SearchConfig, SearchOutcome, SearchStats, SearchStatus, Stop,
};

use super::pls::{pls_model, verify_latin, OccurrenceEvaluator, PlsInstance};
use super::tsp::{held_karp, tsp_model, verify_tour, ReducedCostEvaluator, TspInstance, HELD_KARP_MAX};
use super::BenchError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Strategy {
    Lds,
    /// Decomposition search: lowest reduced-cost plateau then the rest for
    /// tours, one cell per occurrence count for latin squares.
    Dbs,
    Ib(Vec<usize>),
    Dfs,
}

impl Strategy {
    /// `lds`, `dbs`, `dfs` or `ib:1/2/4`.
    pub fn parse(s: &str) -> Result<Self, BenchError> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "lds" => return Ok(Strategy::Lds),
            "dbs" => return Ok(Strategy::Dbs),
            "dfs" => return Ok(Strategy::Dfs),
            _ => {}
        }
        let bad = || BenchError::Invalid(format!("unknown strategy {s:?}"));
        let rest = s.strip_prefix("ib:").ok_or_else(bad)?;
        let cutoffs = rest
            .split('/')
            .map(|t| t.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        if cutoffs.is_empty() || cutoffs[0] == 0 || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad());
        }
        Ok(Strategy::Ib(cutoffs))
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Lds => f.write_str("lds"),
            Strategy::Dbs => f.write_str("dbs"),
            Strategy::Dfs => f.write_str("dfs"),
            Strategy::Ib(c) => {
                let parts: Vec<String> = c.iter().map(usize::to_string).collect();
                write!(f, "ib:{}", parts.join("/"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OptimumSource {
    /// Held-Karp when small enough, otherwise none.
    #[default]
    Auto,
    Known(i64),
    None,
}

#[derive(Debug, Clone)]
pub enum Instance {
    Tsp { instance: TspInstance, optimum: OptimumSource },
    Pls { name: String, instance: PlsInstance },
}

impl Instance {
    pub fn id(&self) -> String {
        match self {
            Instance::Tsp { instance, .. } => instance.name.clone(),
            Instance::Pls { name, .. } => name.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub time: Duration,
    pub nodes: Option<u64>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            time: Duration::from_secs(900),
            nodes: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Solved,
    /// A tour of the target length, or the best tour of an exhausted search.
    Optimal,
    Infeasible,
    Limit,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Solved => "solved",
            Outcome::Optimal => "optimal",
            Outcome::Infeasible => "infeasible",
            Outcome::Limit => "limit",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub instance: String,
    pub strategy: Strategy,
    pub outcome: Outcome,
    pub objective: Option<i64>,
    /// Target tour length used as the stop criterion.
    pub target: Option<i64>,
    pub solution: Option<Vec<i32>>,
    pub stats: SearchStats,
}

fn base_config(limits: &Limits, stop: Stop) -> SearchConfig {
    let mut c = SearchConfig::default().with_stop(stop).with_time_limit(limits.time);
    if let Some(n) = limits.nodes {
        c = c.with_node_limit(n);
    }
    c
}

fn dispatch(
    strategy: &Strategy,
    problem: &mut crate::csp::Problem,
    eval: &mut dyn crate::ranking::ValueEvaluator,
    config: SearchConfig,
    dbs_partitioner: Partitioner,
) -> SearchOutcome {
    match strategy {
        Strategy::Lds => lds_solve(problem, eval, &config),
        Strategy::Dbs => {
            let mut c = config;
            c.partitioner = dbs_partitioner;
            dbs_solve(problem, eval, &c)
        }
        Strategy::Ib(cutoffs) => ib_solve(problem, eval, cutoffs, &config),
        Strategy::Dfs => dfs_solve(problem, eval, &config, &mut ()),
    }
}

/// Resolves the optimum a tour run should stop at.
pub fn tour_target(instance: &TspInstance, source: OptimumSource) -> Result<Option<i64>, BenchError> {
    Ok(match source {
        OptimumSource::Known(v) => Some(v),
        OptimumSource::None => None,
        OptimumSource::Auto if instance.n() <= HELD_KARP_MAX => Some(held_karp(instance)?),
        OptimumSource::Auto => None,
    })
}

pub fn run_tsp(
    instance: &TspInstance,
    target: Option<i64>,
    strategy: &Strategy,
    limits: &Limits,
) -> Result<RunRecord, BenchError> {
    let mut model = tsp_model(instance);
    let mut eval = ReducedCostEvaluator::new(&model);
    let stop = target.map_or(Stop::Exhausted, Stop::OptimumFound);
    let out = dispatch(
        strategy,
        &mut model.problem,
        &mut eval,
        base_config(limits, stop),
        Partitioner::BestPlateau(Tolerance::Relative(1e-9)),
    );
    if let Some(sol) = &out.solution {
        let len = verify_tour(instance, sol)?;
        if Some(len) != out.objective {
            return Err(BenchError::BadSolution(format!(
                "reported length {:?}, recomputed {len}",
                out.objective
            )));
        }
    }
    let outcome = match (&out.solution, out.status) {
        (Some(_), SearchStatus::StopMet) if target.is_some() => Outcome::Optimal,
        (Some(_), SearchStatus::Exhausted) => Outcome::Optimal,
        (Some(_), SearchStatus::StopMet) => Outcome::Solved,
        (Some(_), _) => Outcome::Limit,
        (None, SearchStatus::Exhausted) => Outcome::Infeasible,
        (None, _) => Outcome::Limit,
    };
    Ok(RunRecord {
        instance: instance.name.clone(),
        strategy: strategy.clone(),
        outcome,
        objective: out.objective,
        target,
        solution: out.solution,
        stats: out.stats,
    })
}

pub fn run_pls(
    name: &str,
    instance: &PlsInstance,
    strategy: &Strategy,
    limits: &Limits,
) -> Result<RunRecord, BenchError> {
    let mut model = pls_model(instance);
    let mut eval = OccurrenceEvaluator::new(&model);
    let out = dispatch(
        strategy,
        &mut model.problem,
        &mut eval,
        base_config(limits, Stop::FirstSolution),
        Partitioner::Plateau(Tolerance::Absolute(0.0)),
    );
    if let Some(sol) = &out.solution {
        verify_latin(instance, sol)?;
    }
    let outcome = match (&out.solution, out.status) {
        (Some(_), _) => Outcome::Solved,
        (None, SearchStatus::Exhausted) => Outcome::Infeasible,
        (None, _) => Outcome::Limit,
    };
    Ok(RunRecord {
        instance: name.to_string(),
        strategy: strategy.clone(),
        outcome,
        objective: None,
        target: None,
        solution: out.solution,
        stats: out.stats,
    })
}

/// One run per (instance, strategy) cell, in instance-major input order.
/// Tour targets are resolved once per instance.
pub fn run_experiment(
    instances: &[Instance],
    strategies: &[Strategy],
    limits: &Limits,
    parallel: bool,
) -> Result<Vec<RunRecord>, BenchError> {
    let targets: Vec<Option<i64>> = instances
        .iter()
        .map(|inst| match inst {
            Instance::Tsp { instance, optimum } => tour_target(instance, *optimum),
            Instance::Pls { .. } => Ok(None),
        })
        .collect::<Result<_, _>>()?;
    let cells: Vec<(usize, &Strategy)> = (0..instances.len())
        .flat_map(|i| strategies.iter().map(move |s| (i, s)))
        .collect();
    let run = |&(i, s): &(usize, &Strategy)| match &instances[i] {
        Instance::Tsp { instance, .. } => run_tsp(instance, targets[i], s, limits),
        Instance::Pls { name, instance } => run_pls(name, instance, s, limits),
    };
    if parallel {
        cells.par_iter().map(run).collect()
    } else {
        cells.iter().map(run).collect()
    }
}

/// Sum and mean over the runs of one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub strategy: Strategy,
    pub runs: usize,
    pub solved: usize,
    pub time_sum: Duration,
    pub fails_sum: u64,
}

impl Aggregate {
    pub fn time_mean(&self) -> Duration {
        self.time_sum / self.runs.max(1) as u32
    }

    pub fn fails_mean(&self) -> f64 {
        self.fails_sum as f64 / self.runs.max(1) as f64
    }
}

/// Aggregates per strategy, in order of first appearance.
pub fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let mut out: Vec<Aggregate> = Vec::new();
    for r in records {
        let idx = match out.iter().position(|a| a.strategy == r.strategy) {
            Some(i) => i,
            None => {
                out.push(Aggregate {
                    strategy: r.strategy.clone(),
                    runs: 0,
                    solved: 0,
                    time_sum: Duration::ZERO,
                    fails_sum: 0,
                });
                out.len() - 1
            }
        };
        let a = &mut out[idx];
        a.runs += 1;
        a.solved += usize::from(matches!(r.outcome, Outcome::Solved | Outcome::Optimal));
        a.time_sum += r.stats.wall_time;
        a.fails_sum += r.stats.fails;
    }
    out
}

fn cell(r: &RunRecord) -> String {
    match r.outcome {
        Outcome::Limit => "N.A.".to_string(),
        _ => {
            let discr = r.stats.solution_discrepancy.map_or("-".to_string(), |d| d.to_string());
            format!("{:.3} {} {}", r.stats.wall_time.as_secs_f64(), r.stats.fails, discr)
        }
    }
}

/// Text table with one row per run (`time fails discr`), then sum and mean.
pub fn format_table(records: &[RunRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<28} {:<10} {:<10} {:>10} {:>10} {:>6} {:>10}",
        "instance", "strategy", "outcome", "time(s)", "fails", "discr", "objective"
    );
    for r in records {
        let _ = writeln!(
            s,
            "{:<28} {:<10} {:<10} {:>10.3} {:>10} {:>6} {:>10}",
            r.instance,
            r.strategy.to_string(),
            r.outcome.to_string(),
            r.stats.wall_time.as_secs_f64(),
            r.stats.fails,
            r.stats.solution_discrepancy.map_or("-".to_string(), |d| d.to_string()),
            r.objective.map_or("-".to_string(), |v| v.to_string()),
        );
    }
    for a in aggregate(records) {
        let _ = writeln!(
            s,
            "{:<28} {:<10} {:<10} {:>10.3} {:>10}",
            "sum",
            a.strategy.to_string(),
            format!("{}/{}", a.solved, a.runs),
            a.time_sum.as_secs_f64(),
            a.fails_sum
        );
        let _ = writeln!(
            s,
            "{:<28} {:<10} {:<10} {:>10.3} {:>10.1}",
            "mean",
            a.strategy.to_string(),
            "",
            a.time_mean().as_secs_f64(),
            a.fails_mean()
        );
    }
    s
}

/// Side-by-side `time fails discr` columns per instance, one column group
/// per strategy.
pub fn comparison_table(records: &[RunRecord], strategies: &[Strategy]) -> String {
    let mut s = String::new();
    let header: Vec<String> = strategies.iter().map(|st| format!("{st} (time fails discr)")).collect();
    let _ = writeln!(s, "instance | {}", header.join(" | "));
    let mut seen: Vec<&str> = Vec::new();
    for r in records {
        if seen.contains(&r.instance.as_str()) {
            continue;
        }
        seen.push(&r.instance);
        let cols: Vec<String> = strategies
            .iter()
            .map(|st| {
                records
                    .iter()
                    .find(|x| x.instance == r.instance && &x.strategy == st)
                    .map_or("-".to_string(), cell)
            })
            .collect();
        let _ = writeln!(s, "{} | {}", r.instance, cols.join(" | "));
    }
    s
}
