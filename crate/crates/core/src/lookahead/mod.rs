//! Decisions with `k` visible items: the items may be placed virtually in any
//! order, as long as no item ends up resting on one that arrives after it.

mod brute;
mod mcts;
mod simulate;

pub use brute::{brute_force_search, BruteForceOutcome, BRUTE_FORCE_LIMIT};
pub use mcts::{mcts_search, SearchBudget, SearchOutcome};
pub use simulate::{constrained_mask, VirtualPlacement, VirtualState};
