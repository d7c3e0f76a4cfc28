//! Turns a solver spec into a policy and plays episodes with it.

use std::time::Duration;

use anyhow::{bail, Context, Result};
use pack3d_core::datagen::ItemSet;
use pack3d_core::multibin::{run_multibin_episode, BinPool};
use pack3d_core::policies::{
    BoundaryConfig, BoundaryRule, DeepestBottomLeft, ExternalPolicy, Policy, RandomFeasible,
};
use pack3d_core::rng::derive_seed;
use pack3d_core::runner::{run_episode, Search};
use pack3d_core::state::{BinConfig, EpisodeConfig, Item};
use pack3d_core::Value;

use crate::config::{PolicySpec, SolverSpec};

/// Outcome of one episode, single- or multi-bin.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeOutcome {
    pub items_offered: usize,
    pub items_packed: usize,
    /// Mean over bins of the packed volume fraction.
    pub utilization: Value,
    pub items_per_bin: Value,
    pub decisions: usize,
    pub decision_time: Duration,
}

impl SolverSpec {
    /// Rejects combinations the runner cannot play.
    pub fn check(&self) -> Result<()> {
        if self.lookahead == 0 {
            bail!("lookahead must be at least 1");
        }
        if self.bins == 0 {
            bail!("bin count must be at least 1");
        }
        if self.bins > 1 && (self.lookahead > 1 || self.search != Search::Greedy) {
            bail!("multi-bin runs see one item at a time; use lookahead 1 and greedy search");
        }
        if self.stream_factor == 0 {
            bail!("stream factor must be at least 1");
        }
        if let Search::Mcts(budget) = self.search {
            if budget.simulations == 0 {
                bail!("tree search needs at least one simulation");
            }
        }
        Ok(())
    }
}

/// Builds a fresh policy instance. `seed` only matters for the random policy.
pub fn build_policy(spec: &PolicySpec, item_set: &ItemSet, seed: u64) -> Result<Box<dyn Policy + Send>> {
    Ok(match spec {
        PolicySpec::BoundaryRule { volume_scale, aggregate } => Box::new(BoundaryRule::with_config(
            item_set.clone(),
            BoundaryConfig { volume_scale: Value::from_integer(*volume_scale), aggregate: *aggregate },
        )),
        PolicySpec::Dbl => Box::new(DeepestBottomLeft),
        PolicySpec::Random => Box::new(RandomFeasible::new(seed)),
        PolicySpec::External { program, args, timeout_ms } => Box::new(
            ExternalPolicy::spawn(program, args, Duration::from_millis(*timeout_ms))
                .with_context(|| format!("starting bridge policy `{program}`"))?,
        ),
    })
}

/// Plays one episode. `items` is the whole stream; multi-bin runs pass the
/// concatenation of several sequences.
pub fn play(
    solver: &SolverSpec,
    bin: &BinConfig,
    items: &[Item],
    policy: &mut dyn Policy,
    episode_seed: u64,
) -> Result<EpisodeOutcome> {
    if solver.bins == 1 {
        let config = EpisodeConfig::new(*bin).with_lookahead(solver.lookahead).with_rotation(solver.rotation);
        let rec = run_episode(items, config, policy, &solver.estimator, &solver.search, episode_seed)?;
        Ok(EpisodeOutcome {
            items_offered: items.len(),
            items_packed: rec.items_packed,
            utilization: rec.utilization,
            items_per_bin: Value::from_integer(rec.items_packed as i64),
            decisions: rec.decisions,
            decision_time: rec.decision_time,
        })
    } else {
        let mut pool = BinPool::new(*bin, solver.bins, solver.rotation);
        let rec = run_multibin_episode(&mut pool, items, policy, &solver.estimator, solver.closing)?;
        Ok(EpisodeOutcome {
            items_offered: items.len(),
            items_packed: rec.items_packed,
            utilization: rec.mean_utilization(),
            items_per_bin: rec.items_per_bin(),
            decisions: rec.items_seen,
            decision_time: rec.decision_time,
        })
    }
}

/// Seed handed to episode `index` of a run.
pub fn episode_seed(solver: &SolverSpec, index: usize) -> u64 {
    derive_seed(solver.seed, index as u64)
}
