//! Domain-consistent `alldifferent`.
//!
//! Filtering follows the classic value-graph argument: find a maximum
//! matching between variables and values, orient matched edges from variable
//! to value and the other edges from value to variable. A non-matching edge
//! belongs to some maximum matching iff it lies on a cycle (both ends in the
//! same strongly connected component) or on a path that starts at a free
//! value. Every other edge is removed.

use crate::csp::{DomainStore, Inconsistency, Propagation, Propagator, VarId};

#[derive(Debug, Clone)]
pub struct AllDifferent {
    scope: Vec<VarId>,
    /// Matching kept between calls and repaired on entry.
    matched: Vec<Option<i32>>,
    ws: Workspace,
}

#[derive(Debug, Clone, Default)]
struct Workspace {
    offset: i32,
    owner: Vec<Option<usize>>,
    seen: Vec<u32>,
    stamp: u32,
    val_vars: Vec<Vec<usize>>,
    index: Vec<u32>,
    low: Vec<u32>,
    comp: Vec<u32>,
    on_stack: Vec<bool>,
    reach: Vec<bool>,
}

const UNVISITED: u32 = u32::MAX;

impl AllDifferent {
    pub fn new(scope: Vec<VarId>) -> Self {
        assert!(!scope.is_empty(), "alldifferent needs a nonempty scope");
        let n = scope.len();
        AllDifferent {
            scope,
            matched: vec![None; n],
            ws: Workspace::default(),
        }
    }

    /// Current matching, `None` for variables not yet matched.
    pub fn matching(&self) -> &[Option<i32>] {
        &self.matched
    }

    fn augment(&mut self, store: &DomainStore, x: usize) -> bool {
        // iterative Kuhn search for an augmenting path from variable x
        let ws = &mut self.ws;
        ws.stamp += 1;
        let stamp = ws.stamp;
        let mut stack: Vec<(usize, Vec<i32>, usize)> = Vec::new();
        let mut trail: Vec<(usize, i32)> = Vec::new();
        stack.push((x, store.domain(self.scope[x]).to_vec(), 0));
        while let Some((var, vals, pos)) = stack.last_mut() {
            if *pos == vals.len() {
                stack.pop();
                trail.pop();
                continue;
            }
            let v = vals[*pos];
            *pos += 1;
            let vi = (v - ws.offset) as usize;
            if ws.seen[vi] == stamp {
                continue;
            }
            ws.seen[vi] = stamp;
            let var = *var;
            trail.push((var, v));
            match ws.owner[vi] {
                None => {
                    for &(xv, val) in &trail {
                        let idx = (val - ws.offset) as usize;
                        ws.owner[idx] = Some(xv);
                        self.matched[xv] = Some(val);
                    }
                    return true;
                }
                Some(y) => {
                    let next = store.domain(self.scope[y]).to_vec();
                    stack.push((y, next, 0));
                }
            }
        }
        false
    }

    fn prepare(&mut self, store: &DomainStore) {
        let lo = self
            .scope
            .iter()
            .filter_map(|&x| store.domain(x).min())
            .min()
            .unwrap();
        let hi = self
            .scope
            .iter()
            .filter_map(|&x| store.domain(x).max())
            .max()
            .unwrap();
        let k = (hi - lo + 1) as usize;
        let ws = &mut self.ws;
        ws.offset = lo;
        ws.owner.clear();
        ws.owner.resize(k, None);
        if ws.seen.len() < k {
            ws.seen.resize(k, 0);
        }
        for (i, &x) in self.scope.iter().enumerate() {
            match self.matched[i] {
                Some(v) if store.contains(x, v) && ws.owner[(v - lo) as usize].is_none() => {
                    ws.owner[(v - lo) as usize] = Some(i);
                }
                _ => self.matched[i] = None,
            }
        }
    }

    /// Tarjan's SCC over the oriented value graph. Nodes `0..m` are
    /// variables, `m..m+k` values.
    fn components(&mut self, store: &DomainStore) {
        let m = self.scope.len();
        let k = self.ws.owner.len();
        let total = m + k;
        let ws = &mut self.ws;
        ws.index.clear();
        ws.index.resize(total, UNVISITED);
        ws.low.clear();
        ws.low.resize(total, 0);
        ws.comp.clear();
        ws.comp.resize(total, UNVISITED);
        ws.on_stack.clear();
        ws.on_stack.resize(total, false);
        ws.val_vars.iter_mut().for_each(Vec::clear);
        ws.val_vars.resize(k, Vec::new());
        for (i, &x) in self.scope.iter().enumerate() {
            for v in store.domain(x).iter() {
                if self.matched[i] != Some(v) {
                    ws.val_vars[(v - ws.offset) as usize].push(i);
                }
            }
        }
        let succ = |node: usize, idx: usize, ws: &Workspace, matched: &[Option<i32>]| -> Option<usize> {
            if node < m {
                (idx == 0).then(|| m + (matched[node].unwrap() - ws.offset) as usize)
            } else {
                ws.val_vars[node - m].get(idx).copied()
            }
        };
        let mut counter = 0u32;
        let mut ncomp = 0u32;
        let mut stack: Vec<usize> = Vec::new();
        let mut call: Vec<(usize, usize)> = Vec::new();
        for root in 0..total {
            if ws.index[root] != UNVISITED {
                continue;
            }
            call.push((root, 0));
            ws.index[root] = counter;
            ws.low[root] = counter;
            counter += 1;
            stack.push(root);
            ws.on_stack[root] = true;
            while let Some(&(node, idx)) = call.last() {
                if let Some(next) = succ(node, idx, ws, &self.matched) {
                    call.last_mut().unwrap().1 += 1;
                    if ws.index[next] == UNVISITED {
                        ws.index[next] = counter;
                        ws.low[next] = counter;
                        counter += 1;
                        stack.push(next);
                        ws.on_stack[next] = true;
                        call.push((next, 0));
                    } else if ws.on_stack[next] {
                        ws.low[node] = ws.low[node].min(ws.index[next]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        ws.low[parent] = ws.low[parent].min(ws.low[node]);
                    }
                    if ws.low[node] == ws.index[node] {
                        loop {
                            let w = stack.pop().unwrap();
                            ws.on_stack[w] = false;
                            ws.comp[w] = ncomp;
                            if w == node {
                                break;
                            }
                        }
                        ncomp += 1;
                    }
                }
            }
        }
    }

    /// Marks values reachable from a free value along oriented edges.
    fn reachable_from_free(&mut self, store: &DomainStore) {
        let ws = &mut self.ws;
        let k = ws.owner.len();
        ws.reach.clear();
        ws.reach.resize(k, false);
        let mut queue: Vec<usize> = Vec::new();
        let mut present = vec![false; k];
        for &x in &self.scope {
            for v in store.domain(x).iter() {
                present[(v - ws.offset) as usize] = true;
            }
        }
        for vi in 0..k {
            if present[vi] && ws.owner[vi].is_none() {
                ws.reach[vi] = true;
                queue.push(vi);
            }
        }
        while let Some(vi) = queue.pop() {
            for &x in &ws.val_vars[vi] {
                let mv = (self.matched[x].unwrap() - ws.offset) as usize;
                if !ws.reach[mv] {
                    ws.reach[mv] = true;
                    queue.push(mv);
                }
            }
        }
    }
}

impl Propagator for AllDifferent {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }

    fn name(&self) -> &str {
        "alldifferent"
    }

    fn idempotent(&self) -> bool {
        true
    }

    fn propagate(&mut self, store: &mut DomainStore) -> Propagation {
        self.prepare(store);
        for i in 0..self.scope.len() {
            if self.matched[i].is_none() && !self.augment(store, i) {
                return Err(Inconsistency);
            }
        }
        self.components(store);
        self.reachable_from_free(store);
        let m = self.scope.len();
        let mut removals: Vec<(VarId, i32)> = Vec::new();
        for (i, &x) in self.scope.iter().enumerate() {
            for v in store.domain(x).iter() {
                if self.matched[i] == Some(v) {
                    continue;
                }
                let vi = (v - self.ws.offset) as usize;
                if !self.ws.reach[vi] && self.ws.comp[i] != self.ws.comp[m + vi] {
                    removals.push((x, v));
                }
            }
        }
        for (x, v) in removals {
            store.remove(x, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{Domain, Problem};

    fn problem(domains: &[&[i32]]) -> (Problem, Vec<VarId>) {
        let mut p = Problem::new();
        let vars: Vec<VarId> = domains
            .iter()
            .map(|d| p.add_var(Domain::from_values(d)))
            .collect();
        p.post(Box::new(AllDifferent::new(vars.clone()))).unwrap();
        (p, vars)
    }

    #[test]
    fn hall_set_prunes_third_variable() {
        let (mut p, v) = problem(&[&[1, 2], &[1, 2], &[1, 2, 3]]);
        p.propagate().unwrap();
        assert_eq!(p.domain(v[2]).to_vec(), vec![3]);
        assert_eq!(p.domain(v[0]).to_vec(), vec![1, 2]);
    }

    #[test]
    fn pigeonhole_fails() {
        let (mut p, _) = problem(&[&[1], &[1]]);
        assert_eq!(p.propagate(), Err(Inconsistency));
    }

    #[test]
    fn symmetric_domains_are_untouched() {
        let full: Vec<i32> = (1..=6).collect();
        let doms: Vec<&[i32]> = (0..6).map(|_| full.as_slice()).collect();
        let (mut p, v) = problem(&doms);
        p.propagate().unwrap();
        assert!(v.iter().all(|&x| p.domain(x).size() == 6));
    }

    #[test]
    fn repairs_matching_after_restore() {
        let (mut p, v) = problem(&[&[1, 2, 3], &[1, 2, 3], &[1, 2, 3]]);
        p.propagate().unwrap();
        let l = p.save_state();
        p.assign(v[0], 1).unwrap();
        p.propagate().unwrap();
        assert_eq!(p.domain(v[1]).to_vec(), vec![2, 3]);
        p.restore_state(l);
        p.assign(v[0], 3).unwrap();
        p.propagate().unwrap();
        assert_eq!(p.domain(v[1]).to_vec(), vec![1, 2]);
        assert_eq!(p.domain(v[2]).to_vec(), vec![1, 2]);
    }
}
