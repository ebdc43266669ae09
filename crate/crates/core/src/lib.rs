//! Decomposition based search over finite-domain constraint problems.
//!
//! The crate bundles a small constraint engine ([`csp`], [`propagators`]),
//! value ranking and domain partitioning ([`ranking`]), the tree search
//! strategies ([`search`]), an exact assignment solver ([`assignment`]), the
//! probability model of ordered search trees ([`analysis`]) and the
//! tour / latin square benchmark harness ([`bench`]).

pub mod analysis;
pub mod assignment;
pub mod bench;
pub mod csp;
pub mod propagators;
pub mod ranking;
pub mod search;
