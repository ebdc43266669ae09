//! Constraints used by the tour and latin square models.

mod alldifferent;
mod nosubtour;
mod not_equal;
mod objective;

pub use alldifferent::AllDifferent;
pub use nosubtour::NoSubtour;
pub use not_equal::NotEqual;
pub use objective::{ObjectiveBound, TourRelaxation};
