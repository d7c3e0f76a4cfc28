//! Virtual placement of lookahead items in an arbitrary order.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::SearchError;
use crate::policies::{checked_decide, Observation, Policy, ValueEstimator};
use crate::state::{compute_mask, reward, Action, FeasibilityMask, HeightMap, Item, PackedItem};
use crate::Value;

/// Marker for grid cells not raised by any lookahead item.
const NO_OWNER: u8 = u8::MAX;

/// One virtually placed lookahead item; `index` is its position in the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VirtualPlacement {
    pub index: usize,
    pub packed: PackedItem,
}

/// Mask for window item `index`, treating the footprints of every virtually
/// placed item that arrives after it as solid up to the bin top.
pub fn constrained_mask(
    map: &HeightMap,
    placed: &[VirtualPlacement],
    index: usize,
    item: &Item,
    rotation: bool,
) -> FeasibilityMask {
    compute_mask(&blocked_map(map, placed, index), item, rotation)
}

fn blocked_map(map: &HeightMap, placed: &[VirtualPlacement], index: usize) -> HeightMap {
    let mut blocked = map.clone();
    for vp in placed.iter().filter(|vp| vp.index > index) {
        let (l, w, _) = vp.packed.extents();
        blocked
            .block_in_place(vp.packed.x, vp.packed.y, l, w)
            .expect("virtual placements stay inside the bin");
    }
    blocked
}

/// Height map after some window items were placed, in placement order.
#[derive(Clone, Debug)]
pub struct VirtualState {
    pub map: HeightMap,
    pub placed: Vec<VirtualPlacement>,
    pub reward: Value,
    /// Window index of the item that last raised each cell.
    owner: Vec<u8>,
}

impl VirtualState {
    pub fn root(map: &HeightMap) -> Self {
        Self {
            map: map.clone(),
            placed: Vec::new(),
            reward: Value::from_integer(0),
            owner: vec![NO_OWNER; map.cells().len()],
        }
    }

    pub fn is_placed(&self, index: usize) -> bool {
        self.placed.iter().any(|vp| vp.index == index)
    }

    pub fn action_of(&self, index: usize) -> Option<Action> {
        self.placed.iter().find(|vp| vp.index == index).map(|vp| vp.packed.action())
    }
}

/// Shared machinery of the tree search and the exhaustive search: places
/// window items with the policy under the order constraint, and memoizes
/// results when the policy is deterministic.
pub(crate) struct Simulator<'a, P: ?Sized, V: ?Sized> {
    policy: &'a mut P,
    estimator: &'a V,
    window: &'a [Item],
    last: Option<&'a Item>,
    rotation: bool,
    cache: Option<HashMap<Vec<u8>, Option<Rc<VirtualState>>>>,
    pub policy_calls: usize,
    /// Placements that rested on a cell raised by a later-arriving item.
    pub order_violations: usize,
}

impl<'a, P: Policy + ?Sized, V: ValueEstimator + ?Sized> Simulator<'a, P, V> {
    pub fn new(policy: &'a mut P, estimator: &'a V, window: &'a [Item], last: Option<&'a Item>, rotation: bool) -> Self {
        assert!(window.len() < NO_OWNER as usize, "lookahead window too long");
        let cache = policy.is_deterministic().then(HashMap::new);
        Self { policy, estimator, window, last, rotation, cache, policy_calls: 0, order_violations: 0 }
    }

    pub fn k(&self) -> usize {
        self.window.len()
    }

    /// Places window item `index` next, or `None` if it has no feasible spot.
    pub fn step(&mut self, state: &VirtualState, index: usize) -> Result<Option<Rc<VirtualState>>, SearchError> {
        let key = self.cache.as_ref().map(|_| {
            let mut key: Vec<u8> = state.placed.iter().map(|vp| vp.index as u8).collect();
            key.push(index as u8);
            key
        });
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Some(hit) = cache.get(key) {
                return Ok(hit.clone());
            }
        }
        let next = self.place(state, index)?.map(Rc::new);
        if let (Some(cache), Some(key)) = (&mut self.cache, key) {
            cache.insert(key, next.clone());
        }
        Ok(next)
    }

    fn place(&mut self, state: &VirtualState, index: usize) -> Result<Option<VirtualState>, SearchError> {
        let item = self.window[index];
        let blocked = blocked_map(&state.map, &state.placed, index);
        let mask = compute_mask(&blocked, &item, self.rotation);
        if !mask.any() {
            return Ok(None);
        }
        self.policy_calls += 1;
        let decision = checked_decide(self.policy, &Observation::new(&blocked, std::slice::from_ref(&item)), &mask)?;
        let action = decision.action;
        let (l, w) = item.footprint(action.orientation);

        let mut next = state.clone();
        let len = state.map.bin().length as usize;
        let mut rested_on_later = false;
        for y in action.y..action.y + w {
            for x in action.x..action.x + l {
                let cell = x as usize + len * y as usize;
                let owner = next.owner[cell];
                if owner != NO_OWNER && owner as usize > index {
                    rested_on_later = true;
                }
                next.owner[cell] = index as u8;
            }
        }
        self.order_violations += rested_on_later as usize;
        let z = next.map.apply(&item, action.orientation, action.x, action.y).expect("mask-true placement applies");
        next.placed.push(VirtualPlacement {
            index,
            packed: PackedItem { item, orientation: action.orientation, x: action.x, y: action.y, z },
        });
        next.reward += reward(&item, state.map.bin());
        Ok(Some(next))
    }

    /// Value of a finished path: the collected rewards, plus the estimate for
    /// the item after the window when every window item was placed.
    pub fn leaf_value(&self, state: &VirtualState) -> Value {
        if state.placed.len() == self.window.len() {
            state.reward + self.estimator.value(&state.map, self.last)
        } else {
            state.reward
        }
    }

    /// Plays the unplaced items in arrival order and stops at the first one
    /// that cannot be placed. Also reports whether `window[0]` ended up placed.
    pub fn rollout(&mut self, state: &Rc<VirtualState>) -> Result<(Value, bool), SearchError> {
        let mut current = state.clone();
        for index in 0..self.window.len() {
            if current.is_placed(index) {
                continue;
            }
            match self.step(&current, index)? {
                Some(next) => current = next,
                None => break,
            }
        }
        Ok((self.leaf_value(&current), current.is_placed(0)))
    }
}
