//! Everything needed to reproduce a run.

use std::path::PathBuf;

use pack3d_core::datagen::{Origin, SequenceSpec};
use pack3d_core::lookahead::SearchBudget;
use pack3d_core::multibin::Closing;
use pack3d_core::policies::{Aggregate, Estimator};
use pack3d_core::runner::Search;
use pack3d_core::state::{BinConfig, RewardMode};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub origin: Origin,
    pub count: usize,
    pub seed: u64,
    pub dim_min: u32,
    pub dim_max: u32,
}

impl DatasetSpec {
    /// Standard item bounds `[2, min(L, W, H) / 2]`.
    pub fn standard(origin: Origin, bin: &BinConfig, count: usize, seed: u64) -> Self {
        let spec = SequenceSpec::standard(origin, *bin);
        Self { origin, count, seed, dim_min: spec.dim_min, dim_max: spec.dim_max }
    }

    pub fn sequence_spec(&self, bin: &BinConfig) -> SequenceSpec {
        SequenceSpec { origin: self.origin, bin: *bin, dim_min: self.dim_min, dim_max: self.dim_max }
    }
}

/// Where the sequences of a run come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    /// A dataset file, pinned by the SHA-256 of its bytes.
    File { path: PathBuf, sha256: String },
    /// Sequences generated in memory, exactly as `gen` would write them.
    Generated(DatasetSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PolicySpec {
    BoundaryRule { volume_scale: i64, aggregate: Aggregate },
    Dbl,
    Random,
    /// A policy answering over the line bridge from a child process.
    External { program: String, args: Vec<String>, timeout_ms: u64 },
}

impl PolicySpec {
    pub fn label(&self) -> String {
        match self {
            PolicySpec::BoundaryRule { .. } => "boundary-rule".into(),
            PolicySpec::Dbl => "dbl".into(),
            PolicySpec::Random => "random".into(),
            PolicySpec::External { program, .. } => format!("external:{program}"),
        }
    }
}

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec::BoundaryRule { volume_scale: 1, aggregate: Aggregate::Mean }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub policy: PolicySpec,
    /// Number of visible items, the current one included.
    pub lookahead: usize,
    pub search: Search,
    /// Estimator for the item after the window and for bin selection.
    pub estimator: Estimator,
    pub rotation: bool,
    pub reward_mode: RewardMode,
    pub bins: usize,
    pub closing: Closing,
    /// Sequences concatenated into one stream per multi-bin episode, per bin.
    pub stream_factor: usize,
    /// Seeds the random policy and the tree search.
    pub seed: u64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            policy: PolicySpec::default(),
            lookahead: 1,
            search: Search::Greedy,
            estimator: Estimator::FreeVolume,
            rotation: false,
            reward_mode: RewardMode::StepWise,
            bins: 1,
            closing: Closing::Reroute,
            stream_factor: 3,
            seed: 0,
        }
    }
}

impl SolverSpec {
    /// Short name used in reports and comparison tables.
    pub fn label(&self) -> String {
        let mut label = self.policy.label();
        match self.search {
            Search::Greedy => {}
            Search::Mcts(SearchBudget { simulations, .. }) => label += &format!("+mcts(k={},T={simulations})", self.lookahead),
            Search::BruteForce => label += &format!("+brute(k={})", self.lookahead),
        }
        if self.rotation {
            label += "+rot";
        }
        if self.bins > 1 {
            label += &format!("+bins={}", self.bins);
        }
        label
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub bin: BinConfig,
    pub dataset: DatasetSource,
    pub solver: SolverSpec,
    /// Report path; the wall-clock sidecar goes next to it.
    pub output: Option<PathBuf>,
}
