//! The bin environment: geometry, height map, feasibility masks and episodes.

mod episode;
mod geometry;
mod heightmap;
mod mask;

pub use episode::{reward, volume_reward, EpisodeConfig, EpisodeState, RewardMode, StepOutcome};
pub use geometry::{Action, BinConfig, Item, Orientation, PackedItem};
pub use heightmap::{HeightMap, Support, STABILITY_RULES};
pub use mask::{compute_mask, FeasibilityMask};
