//! Plays whole single-bin episodes with a policy and an optional search.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::SearchError;
use crate::lookahead::{brute_force_search, mcts_search, SearchBudget};
use crate::policies::{checked_decide, Observation, Policy, ValueEstimator};
use crate::rng::derive_seed;
use crate::state::{Action, EpisodeConfig, EpisodeState, Item, RewardMode};
use crate::Value;

/// How the current item's action is chosen when several items are visible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub enum Search {
    /// Ask the policy about the current item only.
    #[default]
    Greedy,
    Mcts(SearchBudget),
    BruteForce,
}

impl fmt::Display for Search {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Search::Greedy => f.write_str("greedy"),
            Search::Mcts(_) => f.write_str("mcts"),
            Search::BruteForce => f.write_str("brute-force"),
        }
    }
}

impl FromStr for Search {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(Search::Greedy),
            "mcts" => Ok(Search::Mcts(SearchBudget::default())),
            "brute-force" => Ok(Search::BruteForce),
            other => Err(format!("unknown search `{other}` (greedy, mcts, brute-force)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub utilization: Value,
    pub items_packed: usize,
    pub actions: Vec<Action>,
    pub decisions: usize,
    /// Wall time spent inside the policy or search, summed over decisions.
    pub decision_time: Duration,
    /// Searches whose chosen action came from a rollout below the tree.
    pub rollout_choices: usize,
    pub order_violations: usize,
    pub final_state: EpisodeState,
}

impl EpisodeRecord {
    pub fn mean_decision_time(&self) -> Duration {
        if self.decisions == 0 {
            Duration::ZERO
        } else {
            self.decision_time / self.decisions as u32
        }
    }
}

/// Chooses the action for the current item of a live episode.
pub fn decide<P, V>(
    state: &EpisodeState,
    policy: &mut P,
    estimator: &V,
    search: &Search,
    seed: u64,
) -> Result<(Action, usize, bool), SearchError>
where
    P: Policy + ?Sized,
    V: ValueEstimator + ?Sized,
{
    let map = state.height_map();
    let window = state.buffer();
    let last = state.next_after_window();
    let rotation = state.config().rotation;
    match search {
        Search::Greedy => {
            let mask = state.mask().ok_or(SearchError::EmptyWindow)?;
            if !mask.any() {
                return Err(SearchError::NoFeasibleAction);
            }
            let d = checked_decide(policy, &Observation::new(map, window), &mask)?;
            Ok((d.action, 0, false))
        }
        Search::Mcts(budget) => {
            let budget = SearchBudget { seed: derive_seed(budget.seed ^ seed, state.cursor() as u64), ..*budget };
            let out = mcts_search(map, window, last, rotation, policy, estimator, &budget)?;
            Ok((out.action, out.order_violations, out.from_rollout))
        }
        Search::BruteForce => {
            let out = brute_force_search(map, window, last, rotation, policy, estimator)?;
            Ok((out.action, out.order_violations, false))
        }
    }
}

/// Plays `items` in one bin until the current item has no feasible spot or
/// the sequence runs out.
pub fn run_episode<P, V>(
    items: &[Item],
    config: EpisodeConfig,
    policy: &mut P,
    estimator: &V,
    search: &Search,
    seed: u64,
) -> Result<EpisodeRecord, SearchError>
where
    P: Policy + ?Sized,
    V: ValueEstimator + ?Sized,
{
    let mut state = EpisodeState::new(config, items.to_vec());
    let mut record = EpisodeRecord {
        utilization: Value::from_integer(0),
        items_packed: 0,
        actions: Vec::new(),
        decisions: 0,
        decision_time: Duration::ZERO,
        rollout_choices: 0,
        order_violations: 0,
        final_state: state.clone(),
    };
    while !state.is_done() {
        let start = Instant::now();
        let (action, violations, from_rollout) = decide(&state, policy, estimator, search, seed)?;
        record.decision_time += start.elapsed();
        record.decisions += 1;
        record.order_violations += violations;
        record.rollout_choices += from_rollout as usize;
        record.actions.push(action);
        state = state
            .step(action, RewardMode::StepWise)
            .expect("decisions are checked against the mask")
            .state;
    }
    record.utilization = state.utilization();
    record.items_packed = state.packed().len();
    record.final_state = state;
    Ok(record)
}
