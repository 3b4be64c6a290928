//! Placement policies. Both produce a [`crate::placement::PlacementState`]
//! from a scenario, deterministically.

pub mod edgewards;
pub mod pop;

pub use edgewards::run as run_edgewards;
pub use pop::run as run_pop;
