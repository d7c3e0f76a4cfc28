//! Exhaustive search over every placement order of the lookahead items.

use std::rc::Rc;

use super::simulate::{Simulator, VirtualPlacement, VirtualState};
use crate::error::SearchError;
use crate::policies::{Policy, ValueEstimator};
use crate::state::{compute_mask, Action, HeightMap, Item};
use crate::Value;

/// Largest window the exhaustive search accepts (`8! = 40320` orders).
pub const BRUTE_FORCE_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceOutcome {
    pub action: Action,
    /// Best path value over all orders.
    pub value: Value,
    /// Value of the best path that places `window[0]`, which yields `action`.
    pub path_value: Value,
    /// Placement order of that path, truncated where it stopped.
    pub order: Vec<usize>,
    /// Placements along `order`.
    pub placements: Vec<VirtualPlacement>,
    pub policy_calls: usize,
    pub order_violations: usize,
}

/// Tries every order of `window`, scoring a path by its rewards plus the
/// estimate for `last` when all items were placed.
///
/// A path stops at the first item without a feasible spot, so every order
/// sharing that prefix has the same value; ties go to the lexicographically
/// first order. `value` is the maximum over all paths, while the returned
/// action comes from the best path that places `window[0]`.
pub fn brute_force_search<P, V>(
    map: &HeightMap,
    window: &[Item],
    last: Option<&Item>,
    rotation: bool,
    policy: &mut P,
    estimator: &V,
) -> Result<BruteForceOutcome, SearchError>
where
    P: Policy + ?Sized,
    V: ValueEstimator + ?Sized,
{
    let first = *window.first().ok_or(SearchError::EmptyWindow)?;
    if window.len() > BRUTE_FORCE_LIMIT {
        return Err(SearchError::TooManyItems { k: window.len(), limit: BRUTE_FORCE_LIMIT });
    }
    if !compute_mask(map, &first, rotation).any() {
        return Err(SearchError::NoFeasibleAction);
    }
    let mut sim = Simulator::new(&mut *policy, estimator, window, last, rotation);
    let mut best: Option<(Value, Rc<VirtualState>)> = None;
    let mut best_with_first: Option<(Value, Rc<VirtualState>)> = None;
    let root = Rc::new(VirtualState::root(map));
    explore(&mut sim, &root, &mut best, &mut best_with_first)?;

    let (value, _) = best.expect("at least one path is explored");
    let (path_value, path) = best_with_first.ok_or(SearchError::NoFeasibleAction)?;
    Ok(BruteForceOutcome {
        action: path.action_of(0).expect("path contains the current item"),
        value,
        path_value,
        order: path.placed.iter().map(|vp| vp.index).collect(),
        placements: path.placed.clone(),
        policy_calls: sim.policy_calls,
        order_violations: sim.order_violations,
    })
}

type Best = Option<(Value, Rc<VirtualState>)>;

fn explore<P: Policy + ?Sized, V: ValueEstimator + ?Sized>(
    sim: &mut Simulator<'_, P, V>,
    state: &Rc<VirtualState>,
    best: &mut Best,
    best_with_first: &mut Best,
) -> Result<(), SearchError> {
    let mut leaf = true;
    for index in 0..sim.k() {
        if state.is_placed(index) {
            continue;
        }
        match sim.step(state, index)? {
            Some(next) => {
                leaf = false;
                explore(sim, &next, best, best_with_first)?;
            }
            None => {
                // this order stops here; record it once, where it first occurs
                record(sim.leaf_value(state), state, best, best_with_first);
                leaf = false;
            }
        }
    }
    if leaf {
        record(sim.leaf_value(state), state, best, best_with_first);
    }
    Ok(())
}

fn record(value: Value, state: &Rc<VirtualState>, best: &mut Best, best_with_first: &mut Best) {
    if best.as_ref().is_none_or(|(v, _)| value > *v) {
        *best = Some((value, state.clone()));
    }
    if state.is_placed(0) && best_with_first.as_ref().is_none_or(|(v, _)| value > *v) {
        *best_with_first = Some((value, state.clone()));
    }
}
