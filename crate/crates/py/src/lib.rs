//! Python bindings: probability analysis, the assignment solver, the exact
//! tour oracle and the tour / latin square runs.

use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dbsearch::analysis::{self, DistributionSpec, Family};
use dbsearch::assignment;
use dbsearch::bench::{self, Limits, PlsInstance, RunRecord, Strategy, TspInstance};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Branch success probabilities of an ordered tree of width `len(p)` and
/// depth `n`.
#[pyclass(name = "ProbabilityModel", frozen)]
struct PyModel(analysis::ProbabilityModel);

#[pymethods]
impl PyModel {
    #[new]
    fn new(n: usize, p: Vec<f64>) -> PyResult<Self> {
        analysis::ProbabilityModel::new(n, p).map(PyModel).map_err(value_err)
    }

    /// Normalized distribution of a named family, optionally averaged into
    /// `(count, size)` plateaus.
    #[staticmethod]
    #[pyo3(signature = (family, b, n, plateaus=None))]
    fn from_family(family: &str, b: usize, n: usize, plateaus: Option<(usize, usize)>) -> PyResult<Self> {
        let family = Family::parse(family).ok_or_else(|| value_err(format!("unknown family {family:?}")))?;
        let mut spec = DistributionSpec::new(family);
        if let Some((count, size)) = plateaus {
            spec = spec.with_plateaus(count, size);
        }
        analysis::make_distribution(&spec, b, n).map(PyModel).map_err(value_err)
    }

    #[getter]
    fn p(&self) -> Vec<f64> {
        self.0.p().to_vec()
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    /// Success probability of the first subproblem with `c` values per level.
    fn prob_dbs(&self, c: usize) -> PyResult<f64> {
        analysis::prob_dbs(c, &self.0).map_err(value_err)
    }

    /// Success probability of the leaves of discrepancy exactly `k`.
    fn prob_lds(&self, k: usize) -> PyResult<f64> {
        analysis::prob_lds(k, &self.0).map_err(value_err)
    }

    /// `(strategy, leaves, cum_prob)` rows of the standard curves.
    fn curves(&self) -> PyResult<Vec<(String, u64, f64)>> {
        Ok(analysis::standard_curves(&self.0)
            .map_err(value_err)?
            .into_iter()
            .map(|p| (p.strategy, p.leaves, p.cum_prob))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("ProbabilityModel(n={}, p={:?})", self.0.depth(), self.0.p())
    }
}

/// Number of depth-`n` paths of width `b` with label sum `k`.
#[pyfunction]
fn lds_leaves(k: usize, n: usize, b: usize) -> PyResult<u64> {
    analysis::lds_leaves(k, n, b).map_err(value_err)
}

/// Returns `(passed, failures, points_checked)`.
#[pyfunction]
fn verify_theorems(max_b: usize, max_n: usize) -> (bool, Vec<String>, usize) {
    let r = analysis::verify_theorems(max_b, max_n);
    let points = r.theorem1_points + r.theorem2_points + r.theorem3_points;
    (r.passed(), r.failures, points)
}

/// Returns `(value, matching, row_duals, col_duals)`.
#[pyfunction]
fn solve_assignment(cost: Vec<Vec<i64>>) -> PyResult<(i64, Vec<usize>, Vec<i64>, Vec<i64>)> {
    let r = assignment::solve_assignment(&cost, &[]).map_err(value_err)?;
    Ok((r.optimal_value, r.matching, r.row_duals, r.col_duals))
}

#[pyfunction]
fn held_karp(dist: Vec<Vec<i64>>) -> PyResult<i64> {
    let t = TspInstance::new("matrix", dist).map_err(value_err)?;
    bench::held_karp(&t).map_err(value_err)
}

/// Result of a tour or latin square run.
#[pyclass(name = "RunResult", frozen, get_all)]
struct PyRun {
    outcome: String,
    objective: Option<i64>,
    solution: Option<Vec<i32>>,
    fails: u64,
    nodes: u64,
    discrepancy: Option<u32>,
    seconds: f64,
}

impl From<RunRecord> for PyRun {
    fn from(r: RunRecord) -> Self {
        PyRun {
            outcome: r.outcome.to_string(),
            objective: r.objective,
            solution: r.solution,
            fails: r.stats.fails,
            nodes: r.stats.nodes_expanded,
            discrepancy: r.stats.solution_discrepancy,
            seconds: r.stats.wall_time.as_secs_f64(),
        }
    }
}

#[pymethods]
impl PyRun {
    fn __repr__(&self) -> String {
        format!(
            "RunResult(outcome={:?}, objective={:?}, fails={}, discrepancy={:?})",
            self.outcome, self.objective, self.fails, self.discrepancy
        )
    }
}

fn limits(time_limit: f64) -> PyResult<Limits> {
    if !(time_limit > 0.0 && time_limit.is_finite()) {
        return Err(value_err("time_limit must be positive"));
    }
    Ok(Limits {
        time: Duration::from_secs_f64(time_limit),
        nodes: None,
    })
}

/// Solves a TSPLIB file. `optimum` is the tour length to stop at; `None`
/// uses the exact oracle when the instance is small enough.
#[pyfunction]
#[pyo3(signature = (path, strategy="dbs", optimum=None, time_limit=900.0))]
fn solve_tsp(path: &str, strategy: &str, optimum: Option<i64>, time_limit: f64) -> PyResult<PyRun> {
    let t = bench::parse_tsplib_file(path).map_err(value_err)?;
    let strategy = Strategy::parse(strategy).map_err(value_err)?;
    let source = optimum.map_or(bench::OptimumSource::Auto, bench::OptimumSource::Known);
    let target = bench::tour_target(&t, source).map_err(value_err)?;
    Ok(bench::run_tsp(&t, target, &strategy, &limits(time_limit)?)
        .map_err(value_err)?
        .into())
}

/// Grid of a generated partial latin square, 0 for holes.
#[pyfunction]
#[pyo3(signature = (order, holes, balanced=true, seed=0))]
fn generate_pls(order: usize, holes: usize, balanced: bool, seed: u64) -> PyResult<Vec<Vec<i32>>> {
    Ok(bench::generate_pls(order, holes, balanced, seed).map_err(value_err)?.grid)
}

/// Completes a grid (0 for holes); the solution is row-major.
#[pyfunction]
#[pyo3(signature = (grid, strategy="dbs", time_limit=900.0))]
fn solve_pls(grid: Vec<Vec<i32>>, strategy: &str, time_limit: f64) -> PyResult<PyRun> {
    let p = PlsInstance::new(grid).map_err(value_err)?;
    let strategy = Strategy::parse(strategy).map_err(value_err)?;
    Ok(bench::run_pls(&p.name(), &p, &strategy, &limits(time_limit)?)
        .map_err(value_err)?
        .into())
}

#[pymodule]
fn pydbs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(lds_leaves, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorems, m)?)?;
    m.add_function(wrap_pyfunction!(solve_assignment, m)?)?;
    m.add_function(wrap_pyfunction!(held_karp, m)?)?;
    m.add_function(wrap_pyfunction!(solve_tsp, m)?)?;
    m.add_function(wrap_pyfunction!(generate_pls, m)?)?;
    m.add_function(wrap_pyfunction!(solve_pls, m)?)?;
    Ok(())
}
