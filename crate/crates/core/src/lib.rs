//! Online 3D bin packing on a height-map grid.
//!
//! The crate covers the environment ([`state`]), dataset generation
//! ([`datagen`]), single-step policies and value estimators ([`policies`]),
//! permutation search over lookahead items ([`lookahead`]) and multi-bin
//! dispatch ([`multibin`]).

pub mod datagen;
pub mod error;
pub mod lookahead;
pub mod multibin;
pub mod policies;
pub mod rng;
pub mod runner;
pub mod state;

/// Exact reward/value scalar. Rewards live on a `0..=10` scale per bin.
pub type Value = num_rational::Ratio<i64>;

/// Converts a value to `f64` for display and UCB arithmetic.
pub fn value_to_f64(v: &Value) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}
