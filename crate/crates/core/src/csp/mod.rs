//! Finite-domain constraint store: bitset domains, an undo trail with
//! nested save/restore, and a FIFO propagation fixpoint.

mod domain;
mod store;

pub use domain::{Domain, DomainIter};
pub use store::{
    DomainStore, Inconsistency, Incumbent, Level, ModelError, Objective, Problem, Propagation,
    Propagator, QueueOrder, VarId,
};
