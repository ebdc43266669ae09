use std::collections::VecDeque;
use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::Domain;

/// Index of a decision variable inside a [`Problem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// Raised when some domain becomes empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("inconsistency: a domain was wiped out")]
pub struct Inconsistency;

/// Outcome of any domain-narrowing step.
pub type Propagation = Result<(), Inconsistency>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("constraint {name} refers to variable {var} but the problem has {count} variables")]
    BadScope {
        name: String,
        var: usize,
        count: usize,
    },
}

/// A saved state of the domain store, see [`Problem::save_state`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Level(usize);

impl Level {
    pub fn depth(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy)]
struct TrailEntry {
    var: u32,
    value: i32,
}

/// Domains plus the undo log. Propagators only ever see this half of a problem.
#[derive(Debug, Clone)]
pub struct DomainStore {
    domains: Vec<Domain>,
    trail: Vec<TrailEntry>,
    marks: Vec<usize>,
    touched: Vec<usize>,
    is_touched: Vec<bool>,
    stamp: u64,
}

impl DomainStore {
    fn new() -> Self {
        DomainStore {
            domains: Vec::new(),
            trail: Vec::new(),
            marks: Vec::new(),
            touched: Vec::new(),
            is_touched: Vec::new(),
            stamp: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn domain(&self, var: VarId) -> &Domain {
        &self.domains[var.0]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn contains(&self, var: VarId, value: i32) -> bool {
        self.domains[var.0].contains(value)
    }

    pub fn size(&self, var: VarId) -> usize {
        self.domains[var.0].size()
    }

    pub fn is_fixed(&self, var: VarId) -> bool {
        self.domains[var.0].is_fixed()
    }

    pub fn value(&self, var: VarId) -> Option<i32> {
        self.domains[var.0].value()
    }

    /// Changes every time any domain changes or a state is restored, so two
    /// equal stamps always denote the same domains.
    pub fn stamp(&self) -> u64 {
        self.stamp
    }

    fn touch(&mut self, var: usize) {
        self.stamp += 1;
        if !self.is_touched[var] {
            self.is_touched[var] = true;
            self.touched.push(var);
        }
    }

    /// Removes `value` from `var`. Removing an absent value does nothing.
    pub fn remove(&mut self, var: VarId, value: i32) -> Propagation {
        let dom = &mut self.domains[var.0];
        if dom.remove(value) {
            if !self.marks.is_empty() {
                self.trail.push(TrailEntry {
                    var: var.0 as u32,
                    value,
                });
            }
            let empty = dom.is_empty();
            self.touch(var.0);
            if empty {
                return Err(Inconsistency);
            }
        }
        Ok(())
    }

    /// Reduces `var` to `{value}`; fails when `value` is not in the domain.
    pub fn assign(&mut self, var: VarId, value: i32) -> Propagation {
        if !self.contains(var, value) {
            return Err(Inconsistency);
        }
        let others: Vec<i32> = self.domains[var.0].iter().filter(|&v| v != value).collect();
        for v in others {
            self.remove(var, v)?;
        }
        Ok(())
    }

    /// Keeps only the values of `var` that appear in `keep`.
    pub fn restrict(&mut self, var: VarId, keep: &[i32]) -> Propagation {
        let drop: Vec<i32> = self.domains[var.0]
            .iter()
            .filter(|v| !keep.contains(v))
            .collect();
        for v in drop {
            self.remove(var, v)?;
        }
        Ok(())
    }

    fn save(&mut self) -> Level {
        self.marks.push(self.trail.len());
        Level(self.marks.len() - 1)
    }

    fn restore(&mut self, level: Level) {
        assert!(
            level.0 < self.marks.len(),
            "restore to level {} but only {} levels are saved",
            level.0,
            self.marks.len()
        );
        let mark = self.marks[level.0];
        while self.trail.len() > mark {
            let e = self.trail.pop().unwrap();
            self.domains[e.var as usize].reinsert(e.value);
        }
        self.marks.truncate(level.0);
        self.stamp += 1;
    }

    fn take_touched(&mut self, out: &mut Vec<usize>) {
        out.clear();
        for &v in &self.touched {
            self.is_touched[v] = false;
        }
        std::mem::swap(out, &mut self.touched);
    }

    fn clear_touched(&mut self) {
        for &v in &self.touched {
            self.is_touched[v] = false;
        }
        self.touched.clear();
    }
}

/// A constraint filtering algorithm.
///
/// Implementations only remove values and must reach their own fixpoint or
/// report [`Propagator::idempotent`] as `false` so the engine re-runs them.
pub trait Propagator: Send {
    fn scope(&self) -> &[VarId];

    fn propagate(&mut self, store: &mut DomainStore) -> Propagation;

    fn name(&self) -> &str {
        "propagator"
    }

    /// Whether a single call always leaves the propagator at its fixpoint.
    fn idempotent(&self) -> bool {
        false
    }
}

/// Cost of a complete assignment, minimized.
pub trait Objective: Send + Sync {
    fn evaluate(&self, solution: &[i32]) -> i64;
}

/// Best objective value found so far, shared with bound propagators.
#[derive(Debug, Clone, Default)]
pub struct Incumbent(Arc<AtomicI64>);

impl Incumbent {
    pub fn new() -> Self {
        Incumbent(Arc::new(AtomicI64::new(i64::MAX)))
    }

    pub fn get(&self) -> Option<i64> {
        match self.0.load(Ordering::Relaxed) {
            i64::MAX => None,
            v => Some(v),
        }
    }

    pub fn set(&self, value: i64) {
        self.0.store(value, Ordering::Relaxed);
    }

    pub fn clear(&self) {
        self.0.store(i64::MAX, Ordering::Relaxed);
    }
}

/// How the fixpoint engine picks the next scheduled propagator.
#[derive(Debug, Clone)]
pub enum QueueOrder {
    Fifo,
    /// Random pick among the scheduled propagators; used to check that the
    /// fixpoint does not depend on scheduling.
    Shuffled(u64),
}

/// A finite-domain CSP with optional minimization objective.
pub struct Problem {
    store: DomainStore,
    propagators: Vec<Box<dyn Propagator>>,
    watchers: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    scratch: Vec<usize>,
    shuffle: Option<ChaCha8Rng>,
    objective: Option<Box<dyn Objective>>,
    incumbent: Incumbent,
}

impl Default for Problem {
    fn default() -> Self {
        Problem::new()
    }
}

impl Problem {
    pub fn new() -> Self {
        Problem {
            store: DomainStore::new(),
            propagators: Vec::new(),
            watchers: Vec::new(),
            queue: VecDeque::new(),
            queued: Vec::new(),
            scratch: Vec::new(),
            shuffle: None,
            objective: None,
            incumbent: Incumbent::new(),
        }
    }

    pub fn add_var(&mut self, domain: Domain) -> VarId {
        assert!(!domain.is_empty());
        self.store.domains.push(domain);
        self.store.is_touched.push(false);
        self.watchers.push(Vec::new());
        VarId(self.store.domains.len() - 1)
    }

    pub fn add_var_range(&mut self, lo: i32, hi: i32) -> VarId {
        self.add_var(Domain::range(lo, hi))
    }

    /// Registers a constraint. It is scheduled for the next propagation.
    pub fn post(&mut self, propagator: Box<dyn Propagator>) -> Result<(), ModelError> {
        let count = self.store.len();
        if let Some(bad) = propagator.scope().iter().find(|v| v.0 >= count) {
            return Err(ModelError::BadScope {
                name: propagator.name().to_string(),
                var: bad.0,
                count,
            });
        }
        let id = self.propagators.len();
        for v in propagator.scope() {
            if !self.watchers[v.0].contains(&id) {
                self.watchers[v.0].push(id);
            }
        }
        self.propagators.push(propagator);
        self.queued.push(false);
        self.schedule(id);
        Ok(())
    }

    pub fn set_objective(&mut self, objective: Box<dyn Objective>) {
        self.objective = Some(objective);
    }

    pub fn objective(&self) -> Option<&dyn Objective> {
        self.objective.as_deref()
    }

    pub fn incumbent(&self) -> &Incumbent {
        &self.incumbent
    }

    pub fn set_queue_order(&mut self, order: QueueOrder) {
        self.shuffle = match order {
            QueueOrder::Fifo => None,
            QueueOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
    }

    pub fn num_vars(&self) -> usize {
        self.store.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.store.len()).map(VarId)
    }

    pub fn store(&self) -> &DomainStore {
        &self.store
    }

    pub fn domain(&self, var: VarId) -> &Domain {
        self.store.domain(var)
    }

    pub fn all_fixed(&self) -> bool {
        self.store.domains.iter().all(Domain::is_fixed)
    }

    /// The assignment if every variable is fixed.
    pub fn solution(&self) -> Option<Vec<i32>> {
        self.store.domains.iter().map(Domain::value).collect()
    }

    pub fn save_state(&mut self) -> Level {
        self.store.save()
    }

    /// Returns every domain to its contents when `level` was saved and
    /// discards `level` and all levels saved after it.
    ///
    /// Panics when `level` is not currently saved.
    pub fn restore_state(&mut self, level: Level) {
        self.store.restore(level);
        self.store.clear_touched();
        self.clear_queue();
    }

    /// Number of currently saved levels.
    pub fn level_count(&self) -> usize {
        self.store.marks.len()
    }

    pub fn assign(&mut self, var: VarId, value: i32) -> Propagation {
        self.store.assign(var, value)
    }

    pub fn remove(&mut self, var: VarId, value: i32) -> Propagation {
        self.store.remove(var, value)
    }

    pub fn restrict(&mut self, var: VarId, keep: &[i32]) -> Propagation {
        self.store.restrict(var, keep)
    }

    fn schedule(&mut self, id: usize) {
        if !self.queued[id] {
            self.queued[id] = true;
            self.queue.push_back(id);
        }
    }

    fn clear_queue(&mut self) {
        for id in self.queue.drain(..) {
            self.queued[id] = false;
        }
    }

    fn schedule_watchers(&mut self, except: Option<usize>) {
        let mut touched = std::mem::take(&mut self.scratch);
        self.store.take_touched(&mut touched);
        for &v in &touched {
            for i in 0..self.watchers[v].len() {
                let id = self.watchers[v][i];
                if Some(id) != except {
                    self.schedule(id);
                }
            }
        }
        self.scratch = touched;
    }

    fn next_scheduled(&mut self) -> Option<usize> {
        let id = match &mut self.shuffle {
            None => self.queue.pop_front(),
            Some(rng) if !self.queue.is_empty() => {
                let i = rng.gen_range(0..self.queue.len());
                self.queue.swap_remove_back(i)
            }
            Some(_) => None,
        }?;
        self.queued[id] = false;
        Some(id)
    }

    /// Runs scheduled propagators until none has anything left to remove.
    ///
    /// On failure the domains are left as they were at the wipeout; callers
    /// restore a saved level.
    pub fn propagate(&mut self) -> Propagation {
        self.schedule_watchers(None);
        while let Some(id) = self.next_scheduled() {
            let result = self.propagators[id].propagate(&mut self.store);
            if result.is_err() {
                self.store.clear_touched();
                self.clear_queue();
                return result;
            }
            let except = self.propagators[id].idempotent().then_some(id);
            self.schedule_watchers(except);
        }
        Ok(())
    }

    /// Schedules every constraint, then propagates.
    pub fn propagate_all(&mut self) -> Propagation {
        for id in 0..self.propagators.len() {
            self.schedule(id);
        }
        self.propagate()
    }
}
