use std::sync::Arc;

use crate::assignment::{solve_assignment_with, AssignmentResult};
use crate::csp::{DomainStore, Incumbent, Inconsistency, Propagation, Propagator, VarId};

/// Assignment relaxation of a partial tour in the successor model.
///
/// Arcs already fixed contribute their cost directly; the remaining
/// successor variables (rows) are matched to the cities nobody points to yet
/// (columns), with pairs outside the current domains forbidden.
#[derive(Debug, Clone)]
pub struct TourRelaxation {
    pub fixed_cost: i64,
    /// City index of each residual row.
    pub rows: Vec<usize>,
    /// City index of each residual column.
    pub cols: Vec<usize>,
    pub assignment: AssignmentResult,
}

impl TourRelaxation {
    /// Fails when the residual has no perfect matching or two fixed arcs
    /// enter the same city.
    pub fn compute(
        store: &DomainStore,
        next: &[VarId],
        cost: &[Vec<i64>],
    ) -> Result<Self, Inconsistency> {
        let n = next.len();
        let mut fixed_cost = 0i64;
        let mut entered = vec![false; n];
        let mut rows = Vec::new();
        for (i, &x) in next.iter().enumerate() {
            match store.value(x) {
                Some(j) => {
                    let j = j as usize;
                    if j >= n || entered[j] {
                        return Err(Inconsistency);
                    }
                    entered[j] = true;
                    fixed_cost += cost[i][j];
                }
                None => rows.push(i),
            }
        }
        let cols: Vec<usize> = (0..n).filter(|&j| !entered[j]).collect();
        if rows.len() != cols.len() {
            return Err(Inconsistency);
        }
        let assignment = solve_assignment_with(rows.len(), |r, c| {
            let (i, j) = (rows[r], cols[c]);
            store.contains(next[i], j as i32).then(|| cost[i][j])
        })
        .map_err(|_| Inconsistency)?;
        Ok(TourRelaxation {
            fixed_cost,
            rows,
            cols,
            assignment,
        })
    }

    pub fn lower_bound(&self) -> i64 {
        self.fixed_cost + self.assignment.optimal_value
    }

    /// Reduced costs of the residual row for `city`, as `(successor, cost)`
    /// pairs over the allowed successors. `None` when the city's successor
    /// is already fixed.
    pub fn reduced_costs(&self, store: &DomainStore, next: &[VarId], city: usize) -> Option<Vec<(i32, i64)>> {
        let r = self.rows.iter().position(|&i| i == city)?;
        let row = &self.assignment.reduced_costs[r];
        Some(
            self.cols
                .iter()
                .enumerate()
                .filter(|&(_, &j)| store.contains(next[city], j as i32))
                .map(|(c, &j)| (j as i32, row[c]))
                .collect(),
        )
    }
}

/// Fails a node whose relaxation bound cannot beat the incumbent tour.
///
/// With arc filtering enabled it also removes every successor `j` of `i`
/// whose reduced cost lifts the bound to the incumbent.
pub struct ObjectiveBound {
    next: Vec<VarId>,
    cost: Arc<Vec<Vec<i64>>>,
    incumbent: Incumbent,
    filter_arcs: bool,
}

impl ObjectiveBound {
    pub fn new(next: Vec<VarId>, cost: Arc<Vec<Vec<i64>>>, incumbent: Incumbent) -> Self {
        ObjectiveBound {
            next,
            cost,
            incumbent,
            filter_arcs: false,
        }
    }

    pub fn with_arc_filtering(mut self) -> Self {
        self.filter_arcs = true;
        self
    }
}

impl Propagator for ObjectiveBound {
    fn scope(&self) -> &[VarId] {
        &self.next
    }

    fn name(&self) -> &str {
        "objective_bound"
    }

    fn idempotent(&self) -> bool {
        !self.filter_arcs
    }

    fn propagate(&mut self, store: &mut DomainStore) -> Propagation {
        let Some(best) = self.incumbent.get() else {
            return Ok(());
        };
        let relax = TourRelaxation::compute(store, &self.next, &self.cost)?;
        let bound = relax.lower_bound();
        if bound >= best {
            return Err(Inconsistency);
        }
        if self.filter_arcs {
            let mut removals = Vec::new();
            for (r, &i) in relax.rows.iter().enumerate() {
                for (c, &j) in relax.cols.iter().enumerate() {
                    if store.contains(self.next[i], j as i32) && bound + relax.assignment.reduced_costs[r][c] >= best {
                        removals.push((self.next[i], j as i32));
                    }
                }
            }
            for (x, v) in removals {
                store.remove(x, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{Domain, Problem};

    fn tour_problem(cost: Vec<Vec<i64>>) -> (Problem, Vec<VarId>) {
        let n = cost.len();
        let mut p = Problem::new();
        let next: Vec<VarId> = (0..n)
            .map(|i| {
                let vals: Vec<i32> = (0..n as i32).filter(|&v| v != i as i32).collect();
                p.add_var(Domain::from_values(&vals))
            })
            .collect();
        let inc = p.incumbent().clone();
        p.post(Box::new(ObjectiveBound::new(next.clone(), Arc::new(cost), inc)))
            .unwrap();
        (p, next)
    }

    #[test]
    fn no_incumbent_never_fails() {
        let (mut p, _) = tour_problem(vec![vec![0, 50], vec![50, 0]]);
        assert_eq!(p.propagate(), Ok(()));
    }

    #[test]
    fn bound_equal_to_incumbent_fails() {
        let (mut p, _) = tour_problem(vec![vec![0, 50], vec![50, 0]]);
        p.incumbent().set(100);
        assert_eq!(p.propagate_all(), Err(Inconsistency));
    }

    #[test]
    fn bound_below_incumbent_passes() {
        let (mut p, _) = tour_problem(vec![vec![0, 50], vec![50, 0]]);
        p.incumbent().set(101);
        assert_eq!(p.propagate_all(), Ok(()));
    }

    #[test]
    fn fixed_arcs_are_counted_and_residual_reduced_costs_exposed() {
        let cost = vec![
            vec![0, 1, 9, 9],
            vec![1, 0, 1, 9],
            vec![9, 1, 0, 1],
            vec![9, 9, 1, 0],
        ];
        let (mut p, next) = tour_problem(cost.clone());
        p.assign(next[0], 1).unwrap();
        let relax = TourRelaxation::compute(p.store(), &next, &cost).unwrap();
        assert_eq!(relax.fixed_cost, 1);
        assert_eq!(relax.rows, vec![1, 2, 3]);
        assert_eq!(relax.cols, vec![0, 2, 3]);
        let rc = relax.reduced_costs(p.store(), &next, 1).unwrap();
        assert!(rc.iter().any(|&(_, r)| r == 0));
        assert!(rc.iter().all(|&(_, r)| r >= 0));
        assert!(relax.reduced_costs(p.store(), &next, 0).is_none());
    }
}
