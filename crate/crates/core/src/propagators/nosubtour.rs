use crate::csp::{DomainStore, Inconsistency, Propagation, Propagator, VarId};

/// Forbids cycles shorter than `n` among successor variables
/// `next[0..n]`, where `next[i] = j` means the tour goes from city `i` to
/// city `j`.
///
/// Every chain of fixed arcs `s -> ... -> e` with fewer than `n - 1` arcs
/// loses the closing arc: `s` is removed from `next[e]`.
#[derive(Debug, Clone)]
pub struct NoSubtour {
    next: Vec<VarId>,
    succ: Vec<Option<usize>>,
    has_pred: Vec<bool>,
    visited: Vec<bool>,
}

impl NoSubtour {
    pub fn new(next: Vec<VarId>) -> Self {
        let n = next.len();
        NoSubtour {
            next,
            succ: vec![None; n],
            has_pred: vec![false; n],
            visited: vec![false; n],
        }
    }
}

impl Propagator for NoSubtour {
    fn scope(&self) -> &[VarId] {
        &self.next
    }

    fn name(&self) -> &str {
        "nosubtour"
    }

    fn propagate(&mut self, store: &mut DomainStore) -> Propagation {
        let n = self.next.len();
        self.has_pred.iter_mut().for_each(|p| *p = false);
        self.visited.iter_mut().for_each(|p| *p = false);
        for i in 0..n {
            self.succ[i] = store.value(self.next[i]).map(|v| v as usize);
            if let Some(j) = self.succ[i] {
                if j >= n {
                    return Err(Inconsistency);
                }
                self.has_pred[j] = true;
            }
        }
        let mut closings: Vec<(usize, usize)> = Vec::new();
        for start in 0..n {
            if self.has_pred[start] || self.succ[start].is_none() {
                continue;
            }
            let mut end = start;
            let mut len = 0;
            self.visited[start] = true;
            while let Some(j) = self.succ[end] {
                end = j;
                self.visited[end] = true;
                len += 1;
            }
            if len < n - 1 {
                closings.push((end, start));
            }
        }
        // whatever is left with a fixed successor lies on a cycle
        for i in 0..n {
            if self.visited[i] || self.succ[i].is_none() {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !self.visited[j] {
                self.visited[j] = true;
                len += 1;
                j = self.succ[j].ok_or(Inconsistency)?;
            }
            if len < n {
                return Err(Inconsistency);
            }
        }
        for (end, start) in closings {
            store.remove(self.next[end], start as i32)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{Domain, Problem};

    fn successors(n: usize) -> (Problem, Vec<VarId>) {
        let mut p = Problem::new();
        let next: Vec<VarId> = (0..n)
            .map(|i| {
                let vals: Vec<i32> = (0..n as i32).filter(|&v| v != i as i32).collect();
                p.add_var(Domain::from_values(&vals))
            })
            .collect();
        p.post(Box::new(NoSubtour::new(next.clone()))).unwrap();
        (p, next)
    }

    #[test]
    fn three_cycle_is_cut() {
        let (mut p, next) = successors(4);
        p.assign(next[0], 1).unwrap();
        p.assign(next[1], 2).unwrap();
        p.propagate().unwrap();
        assert!(!p.domain(next[2]).contains(0));
    }

    #[test]
    fn full_tour_is_allowed() {
        let (mut p, next) = successors(3);
        p.assign(next[0], 1).unwrap();
        p.assign(next[1], 2).unwrap();
        p.propagate().unwrap();
        assert!(p.domain(next[2]).contains(0));
    }

    #[test]
    fn two_cycle_is_cut() {
        let (mut p, next) = successors(4);
        p.assign(next[0], 1).unwrap();
        p.propagate().unwrap();
        assert!(!p.domain(next[1]).contains(0));
    }

    #[test]
    fn closed_short_cycle_fails() {
        let (mut p, next) = successors(4);
        p.assign(next[0], 1).unwrap();
        p.assign(next[1], 0).unwrap();
        assert_eq!(p.propagate(), Err(Inconsistency));
    }
}
