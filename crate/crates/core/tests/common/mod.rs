//! Exhaustive oracles shared by the property and acceptance tests.
#![allow(dead_code)]

use dbsearch::csp::{Domain, Problem, VarId};
use dbsearch::propagators::AllDifferent;

/// Values of each variable that appear in at least one all-different
/// assignment, or `None` when there is no such assignment.
pub fn alldiff_support(domains: &[Vec<i32>]) -> Option<Vec<Vec<i32>>> {
    fn rec(i: usize, domains: &[Vec<i32>], chosen: &mut Vec<i32>, support: &mut [Vec<i32>]) {
        if i == domains.len() {
            for (s, &v) in support.iter_mut().zip(chosen.iter()) {
                if !s.contains(&v) {
                    s.push(v);
                }
            }
            return;
        }
        for &v in &domains[i] {
            if !chosen.contains(&v) {
                chosen.push(v);
                rec(i + 1, domains, chosen, support);
                chosen.pop();
            }
        }
    }
    let mut support = vec![Vec::new(); domains.len()];
    rec(0, domains, &mut Vec::new(), &mut support);
    if support.iter().any(Vec::is_empty) {
        return None;
    }
    for s in &mut support {
        s.sort();
    }
    Some(support)
}

/// Domains after posting one `alldifferent` over all variables and
/// propagating, or `None` on failure.
pub fn alldiff_pruned(domains: &[Vec<i32>]) -> Option<Vec<Vec<i32>>> {
    let mut p = Problem::new();
    let vars: Vec<VarId> = domains.iter().map(|d| p.add_var(Domain::from_values(d))).collect();
    p.post(Box::new(AllDifferent::new(vars.clone()))).unwrap();
    p.propagate().ok()?;
    Some(vars.iter().map(|&x| p.domain(x).to_vec()).collect())
}

/// Minimum assignment cost over all permutations.
pub fn assignment_brute_force(cost: &[Vec<i64>]) -> i64 {
    fn rec(row: usize, used: &mut [bool], cost: &[Vec<i64>], acc: i64, best: &mut i64) {
        if row == cost.len() {
            *best = (*best).min(acc);
            return;
        }
        for j in 0..cost.len() {
            if !used[j] {
                used[j] = true;
                rec(row + 1, used, cost, acc + cost[row][j], best);
                used[j] = false;
            }
        }
    }
    let mut best = i64::MAX;
    rec(0, &mut vec![false; cost.len()], cost, 0, &mut best);
    best
}
