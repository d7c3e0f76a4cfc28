//! Monte Carlo tree search over the order in which lookahead items are placed.

use std::rc::Rc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::simulate::{Simulator, VirtualState};
use crate::error::SearchError;
use crate::policies::{Policy, ValueEstimator};
use crate::rng::seeded;
use crate::state::{compute_mask, Action, HeightMap, Item};
use crate::{value_to_f64, Value};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Number of simulations, at least one.
    pub simulations: usize,
    /// Exploration constant of the selection rule.
    pub exploration: f64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { simulations: 600, exploration: 1.0, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub action: Action,
    /// Best backed-up value at the root, `None` if no simulation produced one.
    pub root_value: Option<Value>,
    /// Root value after each simulation.
    pub root_history: Vec<Value>,
    pub nodes: usize,
    pub policy_calls: usize,
    pub order_violations: usize,
    /// Whether the chosen action came from a rollout below the tree rather
    /// than from a tree node placing the current item.
    pub from_rollout: bool,
}

struct Node {
    state: Rc<VirtualState>,
    /// Window index placed on the edge into this node.
    item: Option<usize>,
    parent: Option<usize>,
    children: Vec<usize>,
    untried: Vec<usize>,
    visits: u32,
    q: Option<Value>,
    /// Best backed-up value among paths that placed `window[0]`.
    q_first: Option<Value>,
    /// Best value of rollouts started at this node that placed `window[0]`.
    own_first: Option<Value>,
}

/// Chooses an action for `window[0]` on `map`.
///
/// `last` is the first item after the window, handed to the estimator at the
/// end of every complete path.
pub fn mcts_search<P, V>(
    map: &HeightMap,
    window: &[Item],
    last: Option<&Item>,
    rotation: bool,
    policy: &mut P,
    estimator: &V,
    budget: &SearchBudget,
) -> Result<SearchOutcome, SearchError>
where
    P: Policy + ?Sized,
    V: ValueEstimator + ?Sized,
{
    let first = *window.first().ok_or(SearchError::EmptyWindow)?;
    let root_mask = compute_mask(map, &first, rotation);
    if !root_mask.any() {
        return Err(SearchError::NoFeasibleAction);
    }
    let mut rng = seeded(budget.seed);
    let mut sim = Simulator::new(&mut *policy, estimator, window, last, rotation);

    let root_state = Rc::new(VirtualState::root(map));
    let mut nodes = vec![Node {
        state: root_state,
        item: None,
        parent: None,
        children: Vec::new(),
        untried: (0..window.len()).collect(),
        visits: 0,
        q: None,
        q_first: None,
        own_first: None,
    }];
    let mut history = Vec::with_capacity(budget.simulations);

    for _ in 0..budget.simulations.max(1) {
        let leaf = tree_policy(&mut nodes, &mut sim, &mut rng, budget.exploration)?;
        let state = nodes[leaf].state.clone();
        let (delta, placed_first) = sim.rollout(&state)?;
        if placed_first && nodes[leaf].own_first.is_none_or(|q| delta > q) {
            nodes[leaf].own_first = Some(delta);
        }
        let mut cursor = Some(leaf);
        while let Some(i) = cursor {
            let node = &mut nodes[i];
            node.visits += 1;
            if node.q.is_none_or(|q| delta > q) {
                node.q = Some(delta);
            }
            if placed_first && node.q_first.is_none_or(|q| delta > q) {
                node.q_first = Some(delta);
            }
            cursor = node.parent;
        }
        history.push(nodes[0].q.expect("root was just backed up"));
    }

    let (action, from_rollout) = greedy_descent(&nodes, &mut sim)?;
    Ok(SearchOutcome {
        action,
        root_value: nodes[0].q,
        root_history: history,
        nodes: nodes.len(),
        policy_calls: sim.policy_calls,
        order_violations: sim.order_violations,
        from_rollout,
    })
}

/// Descends from the root until some node is not fully expanded or has no
/// children, expanding one new child on the way.
fn tree_policy<P: Policy + ?Sized, V: ValueEstimator + ?Sized, R: Rng>(
    nodes: &mut Vec<Node>,
    sim: &mut Simulator<'_, P, V>,
    rng: &mut R,
    exploration: f64,
) -> Result<usize, SearchError> {
    let mut v = 0;
    loop {
        while !nodes[v].untried.is_empty() {
            let pick = rng.gen_range(0..nodes[v].untried.len());
            let index = nodes[v].untried.swap_remove(pick);
            let parent_state = nodes[v].state.clone();
            if let Some(state) = sim.step(&parent_state, index)? {
                let untried = (0..sim.k()).filter(|&i| !state.is_placed(i)).collect();
                nodes.push(Node {
                    state,
                    item: Some(index),
                    parent: Some(v),
                    children: Vec::new(),
                    untried,
                    visits: 0,
                    q: None,
                    q_first: None,
                    own_first: None,
                });
                let child = nodes.len() - 1;
                nodes[v].children.push(child);
                return Ok(child);
            }
        }
        if nodes[v].children.is_empty() {
            return Ok(v);
        }
        v = best_child(nodes, v, exploration);
    }
}

fn best_child(nodes: &[Node], v: usize, exploration: f64) -> usize {
    let parent_visits = nodes[v].visits as f64;
    let mut best = (f64::NEG_INFINITY, nodes[v].children[0]);
    for &c in &nodes[v].children {
        let child = &nodes[c];
        let score = match child.q {
            None => f64::INFINITY,
            Some(q) => value_to_f64(&q) + exploration * (parent_visits / (1.0 + child.visits as f64)).sqrt(),
        };
        if score > best.0 {
            best = (score, c);
        }
    }
    best.1
}

/// Follows the children with the best value among paths that placed
/// `window[0]`, with `c = 0`, until the node that placed it. When that path continues below
/// the tree, the rollout's placement of `window[0]` is used.
fn greedy_descent<P: Policy + ?Sized, V: ValueEstimator + ?Sized>(
    nodes: &[Node],
    sim: &mut Simulator<'_, P, V>,
) -> Result<(Action, bool), SearchError> {
    let mut v = 0;
    loop {
        let node = &nodes[v];
        if let Some(action) = node.state.action_of(0) {
            return Ok((action, false));
        }
        // ties go to the lower window index, as in the exhaustive search
        let mut best: Option<(Value, usize, usize)> = None;
        for &c in &node.children {
            let (Some(q), Some(item)) = (nodes[c].q_first, nodes[c].item) else {
                continue;
            };
            if best.is_none_or(|(bq, bi, _)| q > bq || (q == bq && item < bi)) {
                best = Some((q, item, c));
            }
        }
        // the rollout from this node places window[0] next, the lowest index
        match best {
            Some((q, _, c)) if node.own_first.is_none_or(|own| q > own) => v = c,
            _ => {
                let next = sim.step(&node.state, 0)?.ok_or(SearchError::NoFeasibleAction)?;
                return Ok((next.action_of(0).expect("just placed"), true));
            }
        }
    }
}
