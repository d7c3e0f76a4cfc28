//! Deterministic single-bin episodes with a k-item lookahead buffer.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::geometry::{Action, BinConfig, Item, Orientation, PackedItem};
use super::heightmap::HeightMap;
use super::mask::{compute_mask, FeasibilityMask};
use crate::error::StateError;
use crate::Value;

/// `10 * l * w * h / (L * W * H)`, exact.
pub fn reward(item: &Item, bin: &BinConfig) -> Value {
    volume_reward(item.volume(), bin)
}

/// Reward for an arbitrary packed volume on the same scale as [`reward`].
pub fn volume_reward(volume: u64, bin: &BinConfig) -> Value {
    Value::new(10 * volume as i64, bin.volume() as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum RewardMode {
    /// Every placement pays its own volume reward.
    #[default]
    StepWise,
    /// Only the terminal step pays, `10 x` final utilization.
    Termination,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub bin: BinConfig,
    /// Number of visible items, the current one included.
    pub lookahead: usize,
    pub rotation: bool,
}

impl EpisodeConfig {
    pub fn new(bin: BinConfig) -> Self {
        Self { bin, lookahead: 1, rotation: false }
    }

    pub fn with_lookahead(mut self, k: usize) -> Self {
        self.lookahead = k.max(1);
        self
    }

    pub fn with_rotation(mut self, rotation: bool) -> Self {
        self.rotation = rotation;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpisodeState {
    config: EpisodeConfig,
    height_map: HeightMap,
    items: Arc<[Item]>,
    cursor: usize,
    packed: Vec<PackedItem>,
    packed_volume: u64,
    done: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub state: EpisodeState,
    pub reward: Value,
    pub done: bool,
}

impl EpisodeState {
    pub fn new(config: EpisodeConfig, items: impl Into<Arc<[Item]>>) -> Self {
        let items = items.into();
        let height_map = HeightMap::new(config.bin);
        let mut state = Self {
            config,
            height_map,
            items,
            cursor: 0,
            packed: Vec::new(),
            packed_volume: 0,
            done: false,
        };
        state.done = !state.front_placeable();
        state
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn bin(&self) -> &BinConfig {
        &self.config.bin
    }

    pub fn height_map(&self) -> &HeightMap {
        &self.height_map
    }

    /// The visible lookahead window; the first entry is the item to place now.
    pub fn buffer(&self) -> &[Item] {
        let end = (self.cursor + self.config.lookahead).min(self.items.len());
        &self.items[self.cursor..end]
    }

    pub fn current_item(&self) -> Option<&Item> {
        self.items.get(self.cursor)
    }

    /// The first item after the lookahead window, if any.
    pub fn next_after_window(&self) -> Option<&Item> {
        self.items.get(self.cursor + self.config.lookahead)
    }

    pub fn arrivals(&self) -> &Arc<[Item]> {
        &self.items
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn packed(&self) -> &[PackedItem] {
        &self.packed
    }

    pub fn packed_volume(&self) -> u64 {
        self.packed_volume
    }

    pub fn cumulative_reward(&self) -> Value {
        volume_reward(self.packed_volume, &self.config.bin)
    }

    pub fn utilization(&self) -> Value {
        Value::new(self.packed_volume as i64, self.config.bin.volume() as i64)
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Mask of the current item over the allowed orientations.
    pub fn mask(&self) -> Option<FeasibilityMask> {
        self.current_item()
            .map(|item| compute_mask(&self.height_map, item, self.config.rotation))
    }

    fn front_placeable(&self) -> bool {
        self.mask().is_some_and(|m| m.any())
    }

    fn check_action(&self, item: &Item, action: &Action) -> Result<(), StateError> {
        if action.orientation == Orientation::SwapLW && !self.config.rotation {
            return Err(StateError::RotationDisabled(*action));
        }
        if !self.height_map.is_feasible(item, action.orientation, action.x, action.y) {
            return Err(StateError::ConstraintViolation(*action));
        }
        Ok(())
    }

    /// Places the current item. Infeasible actions are rejected, never clipped.
    pub fn step(&self, action: Action, mode: RewardMode) -> Result<StepOutcome, StateError> {
        if self.done {
            return Err(StateError::EpisodeDone);
        }
        let item = *self.current_item().ok_or(StateError::EpisodeDone)?;
        self.check_action(&item, &action)?;

        let mut next = self.clone();
        let z = next.height_map.apply(&item, action.orientation, action.x, action.y)?;
        next.packed.push(PackedItem {
            item,
            orientation: action.orientation,
            x: action.x,
            y: action.y,
            z,
        });
        next.packed_volume += item.volume();
        next.cursor += 1;
        next.done = !next.front_placeable();

        let reward = match mode {
            RewardMode::StepWise => reward(&item, &self.config.bin),
            RewardMode::Termination if next.done => next.cumulative_reward(),
            RewardMode::Termination => Value::from_integer(0),
        };
        let done = next.done;
        Ok(StepOutcome { state: next, reward, done })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(dims: &[(u32, u32, u32)]) -> Vec<Item> {
        dims.iter().map(|&(l, w, h)| Item::new(l, w, h).unwrap()).collect()
    }

    #[test]
    fn reward_values() {
        let bin = BinConfig::cube(10);
        assert_eq!(reward(&Item::new(2, 2, 2).unwrap(), &bin), Value::new(8, 100));
        assert_eq!(reward(&Item::new(5, 5, 5).unwrap(), &bin), Value::new(5, 4));
        assert_eq!(reward(&Item::new(10, 10, 10).unwrap(), &bin), Value::from_integer(10));
    }

    #[test]
    fn stepwise_first_step() {
        let cfg = EpisodeConfig::new(BinConfig::cube(10));
        let s = EpisodeState::new(cfg, items(&[(2, 2, 2), (3, 3, 3)]));
        let out = s.step(Action::new(0, 0, Orientation::Identity), RewardMode::StepWise).unwrap();
        assert_eq!(out.reward, Value::new(8, 100));
        assert!(!out.done);
        assert_eq!(out.state.packed().len(), 1);
        assert_eq!(out.state.cumulative_reward(), Value::new(8, 100));
        let out = out.state.step(Action::new(2, 0, Orientation::Identity), RewardMode::StepWise).unwrap();
        assert!(out.done, "buffer exhausted");
        assert_eq!(out.state.utilization(), Value::new(35, 1000));
        assert!(matches!(
            out.state.step(Action::new(5, 5, Orientation::Identity), RewardMode::StepWise),
            Err(StateError::EpisodeDone)
        ));
    }

    #[test]
    fn infeasible_step_errors() {
        let cfg = EpisodeConfig::new(BinConfig::cube(10));
        let s = EpisodeState::new(cfg, items(&[(2, 2, 2)]));
        let err = s.step(Action::new(9, 0, Orientation::Identity), RewardMode::StepWise);
        assert!(matches!(err, Err(StateError::ConstraintViolation(_))));
        let err = s.step(Action::new(0, 0, Orientation::SwapLW), RewardMode::StepWise);
        assert!(matches!(err, Err(StateError::RotationDisabled(_))));
    }

    #[test]
    fn termination_reward_on_last_step() {
        let cfg = EpisodeConfig::new(BinConfig::cube(10));
        let s = EpisodeState::new(cfg, items(&[(5, 5, 5), (5, 5, 5)]));
        let a = s.step(Action::new(0, 0, Orientation::Identity), RewardMode::Termination).unwrap();
        assert_eq!(a.reward, Value::from_integer(0));
        let b = a.state.step(Action::new(5, 5, Orientation::Identity), RewardMode::Termination).unwrap();
        assert!(b.done);
        assert_eq!(b.reward, Value::new(5, 2));
    }

    #[test]
    fn unplaceable_front_ends_episode() {
        let cfg = EpisodeConfig::new(BinConfig::cube(10));
        let s = EpisodeState::new(cfg, items(&[(10, 10, 9), (1, 1, 2)]));
        let out = s.step(Action::new(0, 0, Orientation::Identity), RewardMode::StepWise).unwrap();
        assert!(out.done);
        assert_eq!(out.state.buffer().len(), 1);
        let never = EpisodeState::new(cfg, items(&[(11, 1, 1)]));
        assert!(never.is_done());
    }

    #[test]
    fn buffer_window() {
        let cfg = EpisodeConfig::new(BinConfig::cube(10)).with_lookahead(2);
        let s = EpisodeState::new(cfg, items(&[(2, 2, 2), (3, 3, 3), (4, 4, 4)]));
        assert_eq!(s.buffer().len(), 2);
        assert_eq!(s.next_after_window(), Some(&Item::new(4, 4, 4).unwrap()));
    }
}
