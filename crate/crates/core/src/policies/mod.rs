//! Placement policies and value estimators.
//!
//! A policy sees the height map, the visible items and the exact feasibility
//! mask of the current item, and must answer with a mask-true action.

mod baseline;
mod boundary;
pub mod bridge;
mod spare;
mod value;

pub use baseline::{DeepestBottomLeft, RandomFeasible};
pub use boundary::{spare_cuboid_score, Aggregate, BoundaryConfig, BoundaryRule, FitTable, ALL_TYPES_BONUS};
pub use bridge::ExternalPolicy;
pub use spare::{for_each_maximal_cuboid, maximal_spare_cuboids, CuboidScratch, SpareCuboid};
pub use value::{Estimator, ValueEstimator};

use crate::error::PolicyError;
use crate::state::{Action, FeasibilityMask, HeightMap, Item};
use crate::Value;

/// What a policy is allowed to look at.
#[derive(Clone, Copy, Debug)]
pub struct Observation<'a> {
    pub height_map: &'a HeightMap,
    /// Visible items in arrival order; the first is the one being placed.
    pub items: &'a [Item],
}

impl<'a> Observation<'a> {
    pub fn new(height_map: &'a HeightMap, items: &'a [Item]) -> Self {
        Self { height_map, items }
    }

    pub fn current(&self) -> Option<&'a Item> {
        self.items.first()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyDecision {
    pub action: Action,
    /// Per-action scores indexed by [`Action::flat_index`], `None` where not scored.
    pub score_map: Option<Vec<Option<Value>>>,
}

pub trait Policy {
    fn name(&self) -> String;

    fn decide(&mut self, obs: &Observation<'_>, mask: &FeasibilityMask) -> Result<PolicyDecision, PolicyError>;

    /// Whether equal inputs always give equal decisions. Search code may
    /// memoize the decisions of deterministic policies.
    fn is_deterministic(&self) -> bool {
        true
    }
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn decide(&mut self, obs: &Observation<'_>, mask: &FeasibilityMask) -> Result<PolicyDecision, PolicyError> {
        (**self).decide(obs, mask)
    }

    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }
}

/// Decides and rejects any answer the mask forbids.
pub fn checked_decide<P: Policy + ?Sized>(
    policy: &mut P,
    obs: &Observation<'_>,
    mask: &FeasibilityMask,
) -> Result<PolicyDecision, PolicyError> {
    let decision = policy.decide(obs, mask)?;
    if !mask.get(&decision.action) {
        return Err(PolicyError::MaskRejected(decision.action.flat_index(mask.bin())));
    }
    Ok(decision)
}
