//! Symmetric TSP in the successor model, its reduced-cost value evaluator,
//! an exact dynamic-programming optimum and an independent tour checker.

use std::sync::Arc;

use crate::csp::{Domain, DomainStore, Objective, Problem, VarId};
use crate::propagators::{AllDifferent, NoSubtour, ObjectiveBound, TourRelaxation};
use crate::ranking::{rank_reduced_cost, RankedValues, ValueEvaluator};

use super::BenchError;

/// Largest instance [`held_karp`] accepts.
pub const HELD_KARP_MAX: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TspInstance {
    pub name: String,
    pub dist: Vec<Vec<i64>>,
}

impl TspInstance {
    /// Checks that `dist` is square, symmetric and nonnegative off the
    /// diagonal. The diagonal is ignored.
    pub fn new(name: impl Into<String>, dist: Vec<Vec<i64>>) -> Result<Self, BenchError> {
        let n = dist.len();
        if n < 3 {
            return Err(BenchError::Invalid(format!("a tour needs at least 3 cities, got {n}")));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(BenchError::Invalid(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for j in 0..n {
                if i != j && (row[j] < 0 || row[j] != dist[j][i]) {
                    return Err(BenchError::Invalid(format!("distance ({i},{j}) is negative or asymmetric")));
                }
            }
        }
        Ok(TspInstance { name: name.into(), dist })
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }
}

/// Length of a tour given by successors, after checking it is one
/// Hamiltonian cycle.
pub fn verify_tour(instance: &TspInstance, next: &[i32]) -> Result<i64, BenchError> {
    let n = instance.n();
    if next.len() != n {
        return Err(BenchError::BadSolution(format!("{} successors for {n} cities", next.len())));
    }
    let mut seen = vec![false; n];
    let mut city = 0usize;
    let mut length = 0i64;
    for _ in 0..n {
        if seen[city] {
            return Err(BenchError::BadSolution(format!("city {city} visited twice")));
        }
        seen[city] = true;
        let succ = next[city];
        if succ < 0 || succ as usize >= n || succ as usize == city {
            return Err(BenchError::BadSolution(format!("bad successor {succ} of city {city}")));
        }
        length += instance.dist[city][succ as usize];
        city = succ as usize;
    }
    if city != 0 {
        return Err(BenchError::BadSolution("successors do not close a single tour".into()));
    }
    Ok(length)
}

/// Exact optimum by dynamic programming over subsets, for at most
/// [`HELD_KARP_MAX`] cities.
pub fn held_karp(instance: &TspInstance) -> Result<i64, BenchError> {
    let n = instance.n();
    if n > HELD_KARP_MAX {
        return Err(BenchError::TooLarge { n, max: HELD_KARP_MAX });
    }
    let d = &instance.dist;
    // city 0 is the start; bit j-1 stands for city j
    let m = n - 1;
    let full = 1usize << m;
    let inf = i64::MAX / 2;
    let mut dp = vec![inf; full * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = d[0][j + 1];
    }
    for mask in 1..full {
        for j in 0..m {
            let cur = dp[mask * m + j];
            if cur == inf || mask & (1 << j) == 0 {
                continue;
            }
            let mut rest = !mask & (full - 1);
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let slot = &mut dp[(mask | 1 << k) * m + k];
                *slot = (*slot).min(cur + d[j + 1][k + 1]);
            }
        }
    }
    Ok((0..m).map(|j| dp[(full - 1) * m + j] + d[j + 1][0]).min().unwrap())
}

/// Tour length of a successor assignment.
#[derive(Debug, Clone)]
pub struct TourLength(pub Arc<Vec<Vec<i64>>>);

impl Objective for TourLength {
    fn evaluate(&self, solution: &[i32]) -> i64 {
        solution.iter().enumerate().map(|(i, &j)| self.0[i][j as usize]).sum()
    }
}

pub struct TspModel {
    pub problem: Problem,
    /// `next[i]` is the city visited after city `i`; variable `i` is city `i`.
    pub next: Vec<VarId>,
    pub cost: Arc<Vec<Vec<i64>>>,
}

/// Successor variables with `alldifferent`, subtour elimination and the
/// assignment lower bound against the incumbent, including reduced-cost
/// arc filtering.
pub fn tsp_model(instance: &TspInstance) -> TspModel {
    tsp_model_with(instance, true)
}

pub fn tsp_model_with(instance: &TspInstance, arc_filtering: bool) -> TspModel {
    let n = instance.n();
    let cost = Arc::new(instance.dist.clone());
    let mut problem = Problem::new();
    let next: Vec<VarId> = (0..n)
        .map(|i| {
            let others: Vec<i32> = (0..n as i32).filter(|&j| j as usize != i).collect();
            problem.add_var(Domain::from_values(&others))
        })
        .collect();
    let incumbent = problem.incumbent().clone();
    problem
        .post(Box::new(AllDifferent::new(next.clone())))
        .expect("variables exist");
    problem.post(Box::new(NoSubtour::new(next.clone()))).expect("variables exist");
    let mut bound = ObjectiveBound::new(next.clone(), cost.clone(), incumbent);
    if arc_filtering {
        bound = bound.with_arc_filtering();
    }
    problem.post(Box::new(bound)).expect("variables exist");
    problem.set_objective(Box::new(TourLength(cost.clone())));
    TspModel { problem, next, cost }
}

/// Ranks successors by reduced cost in the assignment relaxation of the
/// current node, re-solved whenever the domains changed.
pub struct ReducedCostEvaluator {
    next: Vec<VarId>,
    cost: Arc<Vec<Vec<i64>>>,
    cache: Option<(u64, Option<TourRelaxation>)>,
}

impl ReducedCostEvaluator {
    pub fn new(model: &TspModel) -> Self {
        ReducedCostEvaluator {
            next: model.next.clone(),
            cost: model.cost.clone(),
            cache: None,
        }
    }
}

impl ValueEvaluator for ReducedCostEvaluator {
    fn rank(&mut self, store: &DomainStore, var: VarId) -> RankedValues {
        let city = var.index();
        debug_assert_eq!(self.next[city], var);
        if self.cache.as_ref().is_none_or(|c| c.0 != store.stamp()) {
            let relax = TourRelaxation::compute(store, &self.next, &self.cost).ok();
            self.cache = Some((store.stamp(), relax));
        }
        let relax = self.cache.as_ref().and_then(|c| c.1.as_ref());
        match relax.and_then(|r| r.reduced_costs(store, &self.next, city)) {
            Some(row) => rank_reduced_cost(&row),
            // no relaxation: fall back to plain arc cost
            None => RankedValues::new(
                store
                    .domain(var)
                    .iter()
                    .map(|j| (j, -(self.cost[city][j as usize] as f64)))
                    .collect(),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(n: usize, seed: u64) -> TspInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let w = rng.gen_range(1..100);
                d[i][j] = w;
                d[j][i] = w;
            }
        }
        TspInstance::new("random", d).unwrap()
    }

    /// Minimum over all tours through city 0, by permutation.
    fn brute_force(t: &TspInstance) -> i64 {
        fn rec(t: &TspInstance, path: &mut Vec<usize>, used: &mut [bool], best: &mut i64) {
            let n = t.n();
            if path.len() == n {
                let len: i64 = path.windows(2).map(|w| t.dist[w[0]][w[1]]).sum::<i64>() + t.dist[path[n - 1]][0];
                *best = (*best).min(len);
                return;
            }
            for c in 1..n {
                if !used[c] {
                    used[c] = true;
                    path.push(c);
                    rec(t, path, used, best);
                    path.pop();
                    used[c] = false;
                }
            }
        }
        let mut best = i64::MAX;
        rec(t, &mut vec![0], &mut vec![false; t.n()], &mut best);
        best
    }

    #[test]
    fn unit_square() {
        let d = (0..4).map(|i| (0..4).map(|j| i64::from(i != j)).collect()).collect();
        assert_eq!(held_karp(&TspInstance::new("unit", d).unwrap()).unwrap(), 4);
    }

    #[test]
    fn triangle_is_its_perimeter() {
        let d = vec![vec![0, 3, 4], vec![3, 0, 5], vec![4, 5, 0]];
        assert_eq!(held_karp(&TspInstance::new("tri", d).unwrap()).unwrap(), 12);
    }

    #[test]
    fn matches_enumeration() {
        for seed in 0..10 {
            for n in [5, 6, 7] {
                let t = random_instance(n, seed);
                assert_eq!(held_karp(&t).unwrap(), brute_force(&t));
            }
        }
    }

    #[test]
    fn size_guard() {
        let t = random_instance(21, 0);
        assert!(matches!(held_karp(&t), Err(BenchError::TooLarge { .. })));
    }

    #[test]
    fn tour_checker() {
        let t = random_instance(4, 1);
        assert!(verify_tour(&t, &[1, 2, 3, 0]).is_ok());
        assert!(verify_tour(&t, &[1, 0, 3, 2]).is_err());
        assert!(verify_tour(&t, &[0, 2, 3, 1]).is_err());
        assert!(verify_tour(&t, &[1, 2, 3]).is_err());
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(TspInstance::new("x", vec![vec![0, 1, 2], vec![2, 0, 1], vec![2, 1, 0]]).is_err());
    }

    #[test]
    fn first_cell_is_the_zero_reduced_cost_set() {
        use crate::ranking::{Partitioner, Tolerance};
        let t = random_instance(8, 3);
        let model = tsp_model(&t);
        let mut ev = ReducedCostEvaluator::new(&model);
        let relax = TourRelaxation::compute(model.problem.store(), &model.next, &model.cost).unwrap();
        for city in 0..8 {
            let ranked = ev.rank(model.problem.store(), model.next[city]);
            let first = Partitioner::BestPlateau(Tolerance::Relative(1e-9)).partition(&ranked);
            let row = relax.reduced_costs(model.problem.store(), &model.next, city).unwrap();
            let mut zeros: Vec<i32> = row.iter().filter(|r| r.1 == 0).map(|r| r.0).collect();
            let mut cell = first.cells()[0].clone();
            zeros.sort();
            cell.sort();
            assert_eq!(cell, zeros);
        }
    }
}
