//! Exact linear assignment by the shortest augmenting path form of the
//! Hungarian method, in integer arithmetic.
//!
//! Besides the optimal permutation the solver returns the dual prices, so
//! reduced costs `c[i][j] - u[i] - v[j]` are exact: nonnegative everywhere
//! and zero on the matched pairs.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssignmentError {
    #[error("cost matrix is not square (row {row} has {len} entries, expected {n})")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("negative cost {cost} at ({row}, {col})")]
    NegativeCost { row: usize, col: usize, cost: i64 },
    #[error("no perfect matching avoids the forbidden pairs")]
    Infeasible,
    #[error("cost magnitudes overflow the forbidden-pair sentinel")]
    Overflow,
}

/// Optimal primal and dual solution of an assignment problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentResult {
    pub optimal_value: i64,
    /// `matching[row] = column`.
    pub matching: Vec<usize>,
    pub row_duals: Vec<i64>,
    pub col_duals: Vec<i64>,
    /// `reduced_costs[i][j] = cost[i][j] - row_duals[i] - col_duals[j]`, with
    /// forbidden pairs priced at the sentinel.
    pub reduced_costs: Vec<Vec<i64>>,
}

impl AssignmentResult {
    pub fn size(&self) -> usize {
        self.matching.len()
    }
}

/// Solves `min sum cost[i][matching[i]]` over permutations avoiding
/// `forbidden` pairs. Costs must be nonnegative.
pub fn solve_assignment(
    cost: &[Vec<i64>],
    forbidden: &[(usize, usize)],
) -> Result<AssignmentResult, AssignmentError> {
    let n = cost.len();
    for (row, r) in cost.iter().enumerate() {
        if r.len() != n {
            return Err(AssignmentError::NotSquare {
                row,
                len: r.len(),
                n,
            });
        }
    }
    let mut allowed = vec![vec![true; n]; n];
    for &(i, j) in forbidden {
        if i < n && j < n {
            allowed[i][j] = false;
        }
    }
    solve_assignment_with(n, |i, j| allowed[i][j].then(|| cost[i][j]))
}

/// Same as [`solve_assignment`] with costs supplied by a closure; `None`
/// marks a forbidden pair.
///
/// Forbidden pairs are priced at `1 + n * max_cost`, more than any matching
/// made of allowed pairs, so an optimum that uses one proves infeasibility.
pub fn solve_assignment_with(
    n: usize,
    cost: impl Fn(usize, usize) -> Option<i64>,
) -> Result<AssignmentResult, AssignmentError> {
    if n == 0 {
        return Ok(AssignmentResult {
            optimal_value: 0,
            matching: Vec::new(),
            row_duals: Vec::new(),
            col_duals: Vec::new(),
            reduced_costs: Vec::new(),
        });
    }
    let mut max_cost = 0i64;
    let mut matrix = vec![vec![None; n]; n];
    for (i, row) in matrix.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if let Some(c) = cost(i, j) {
                if c < 0 {
                    return Err(AssignmentError::NegativeCost {
                        row: i,
                        col: j,
                        cost: c,
                    });
                }
                max_cost = max_cost.max(c);
                *cell = Some(c);
            }
        }
    }
    let sentinel = (n as i64)
        .checked_mul(max_cost)
        .and_then(|x| x.checked_add(1))
        .ok_or(AssignmentError::Overflow)?;
    // the dual updates never exceed n * sentinel in magnitude
    (n as i64)
        .checked_mul(sentinel)
        .and_then(|x| x.checked_mul(2))
        .ok_or(AssignmentError::Overflow)?;
    let a: Vec<Vec<i64>> = matrix
        .iter()
        .map(|row| row.iter().map(|c| c.unwrap_or(sentinel)).collect())
        .collect();

    // 1-based potentials; column 0 is the virtual root of each augmentation
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![inf; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = inf);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut matching = vec![0usize; n];
    for j in 1..=n {
        matching[owner[j] - 1] = j - 1;
    }
    if matching
        .iter()
        .enumerate()
        .any(|(i, &j)| matrix[i][j].is_none())
    {
        return Err(AssignmentError::Infeasible);
    }
    let row_duals: Vec<i64> = u[1..].to_vec();
    let col_duals: Vec<i64> = v[1..].to_vec();
    let reduced_costs = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &c)| c - row_duals[i] - col_duals[j])
                .collect()
        })
        .collect();
    let optimal_value = matching.iter().enumerate().map(|(i, &j)| a[i][j]).sum();
    Ok(AssignmentResult {
        optimal_value,
        matching,
        row_duals,
        col_duals,
        reduced_costs,
    })
}
