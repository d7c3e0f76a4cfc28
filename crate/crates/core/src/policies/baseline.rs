//! Simple reference policies.

use rand::Rng;

use super::{Observation, Policy, PolicyDecision};
use crate::error::PolicyError;
use crate::rng::{seeded, Rng as SeededRng};
use crate::state::FeasibilityMask;

/// Deepest-bottom-left: lowest resting height, then smallest y, x, orientation.
#[derive(Clone, Copy, Debug, Default)]
pub struct DeepestBottomLeft;

impl Policy for DeepestBottomLeft {
    fn name(&self) -> String {
        "dbl".into()
    }

    fn decide(&mut self, obs: &Observation<'_>, mask: &FeasibilityMask) -> Result<PolicyDecision, PolicyError> {
        let item = obs.current().ok_or(PolicyError::NoFeasibleAction)?;
        let map = obs.height_map;
        mask.feasible_actions()
            .min_by_key(|a| {
                let (l, w) = item.footprint(a.orientation);
                (map.max_over(a.x, a.y, l, w), a.y, a.x, a.orientation.index())
            })
            .map(|action| PolicyDecision { action, score_map: None })
            .ok_or(PolicyError::NoFeasibleAction)
    }
}

/// Uniform choice among feasible actions.
#[derive(Clone, Debug)]
pub struct RandomFeasible {
    rng: SeededRng,
}

impl RandomFeasible {
    pub fn new(seed: u64) -> Self {
        Self { rng: seeded(seed) }
    }
}

impl Policy for RandomFeasible {
    fn name(&self) -> String {
        "random".into()
    }

    fn decide(&mut self, _obs: &Observation<'_>, mask: &FeasibilityMask) -> Result<PolicyDecision, PolicyError> {
        let count = mask.count();
        if count == 0 {
            return Err(PolicyError::NoFeasibleAction);
        }
        let pick = self.rng.gen_range(0..count);
        let action = mask.feasible_actions().nth(pick).expect("pick below count");
        Ok(PolicyDecision { action, score_map: None })
    }

    fn is_deterministic(&self) -> bool {
        false
    }
}
