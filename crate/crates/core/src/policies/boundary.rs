//! Boundary-rule heuristic: keep the remaining free space regular.
//!
//! Every feasible placement is tried virtually; the resulting free space is
//! split into maximal spare cuboids and each cuboid is rated by how many item
//! types still fit in it, plus its normalized volume as a tie breaker, plus a
//! bonus when every type fits. The placement with the best mean rating wins.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::spare::{for_each_maximal_cuboid, CuboidScratch, SpareCuboid};
use super::{Observation, Policy, PolicyDecision};
use crate::datagen::ItemSet;
use crate::error::PolicyError;
use crate::state::{Action, BinConfig, FeasibilityMask, HeightMap};
use crate::Value;

/// Bonus for a cuboid that accepts every item type.
pub const ALL_TYPES_BONUS: i64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Aggregate {
    /// Mean rating over the cuboids of the resulting bin.
    #[default]
    Mean,
    /// Sum of ratings.
    Sum,
}

/// `count + scale * volume / (L * W * H)`, plus [`ALL_TYPES_BONUS`] when every type fits.
pub fn spare_cuboid_score(c: &SpareCuboid, item_set: &ItemSet, bin: &BinConfig, volume_scale: Value) -> Value {
    let count = item_set.count_fitting(c.l, c.w, c.h) as i64;
    let bonus = if count as usize == item_set.len() { ALL_TYPES_BONUS } else { 0 };
    Value::from_integer(count + bonus) + volume_scale * Value::new(c.volume() as i64, bin.volume() as i64)
}

/// Number of item types fitting each box size, in either horizontal orientation.
#[derive(Clone, Debug)]
pub struct FitTable {
    bin: BinConfig,
    counts: Vec<u32>,
    all: u32,
}

impl FitTable {
    pub fn new(item_set: &ItemSet, bin: &BinConfig) -> Self {
        let (nl, nw, nh) = (bin.length as usize, bin.width as usize, bin.height as usize);
        let side = nl.max(nw);
        // dominance counts over a square footprint so lookups with swapped axes stay in range
        let idx = |l: usize, w: usize, h: usize| (l * (side + 1) + w) * (nh + 1) + h;
        let mut dom = vec![0u32; (side + 1) * (side + 1) * (nh + 1)];
        for it in &item_set.items {
            let (l, w, h) = (it.l as usize, it.w as usize, it.h as usize);
            if l <= side && w <= side && h <= nh {
                dom[idx(l, w, h)] += 1;
            }
        }
        for l in 0..=side {
            for w in 0..=side {
                for h in 0..=nh {
                    let mut v = dom[idx(l, w, h)];
                    if l > 0 {
                        v += dom[idx(l - 1, w, h)];
                    }
                    if w > 0 {
                        v += dom[idx(l, w - 1, h)];
                    }
                    if h > 0 {
                        v += dom[idx(l, w, h - 1)];
                    }
                    if l > 0 && w > 0 {
                        v -= dom[idx(l - 1, w - 1, h)];
                    }
                    if l > 0 && h > 0 {
                        v -= dom[idx(l - 1, w, h - 1)];
                    }
                    if w > 0 && h > 0 {
                        v -= dom[idx(l, w - 1, h - 1)];
                    }
                    if l > 0 && w > 0 && h > 0 {
                        v += dom[idx(l - 1, w - 1, h - 1)];
                    }
                    dom[idx(l, w, h)] = v;
                }
            }
        }
        let mut counts = vec![0u32; (nl + 1) * (nw + 1) * (nh + 1)];
        for l in 0..=nl {
            for w in 0..=nw {
                let m = l.min(w);
                for h in 0..=nh {
                    counts[(l * (nw + 1) + w) * (nh + 1) + h] =
                        dom[idx(l, w, h)] + dom[idx(w, l, h)] - dom[idx(m, m, h)];
                }
            }
        }
        Self { bin: *bin, counts, all: item_set.len() as u32 }
    }

    #[inline]
    pub fn count(&self, l: u32, w: u32, h: u32) -> u32 {
        let (nw, nh) = (self.bin.width as usize, self.bin.height as usize);
        self.counts[(l as usize * (nw + 1) + w as usize) * (nh + 1) + h as usize]
    }

    pub fn bin(&self) -> &BinConfig {
        &self.bin
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryConfig {
    /// Weight of the normalized cuboid volume in each rating.
    pub volume_scale: Value,
    pub aggregate: Aggregate,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self { volume_scale: Value::from_integer(1), aggregate: Aggregate::Mean }
    }
}

pub struct BoundaryRule {
    item_set: ItemSet,
    config: BoundaryConfig,
    table: Option<FitTable>,
    scratch: CuboidScratch,
    buffer: Option<HeightMap>,
}

impl BoundaryRule {
    pub fn new(item_set: ItemSet) -> Self {
        Self::with_config(item_set, BoundaryConfig::default())
    }

    pub fn with_config(item_set: ItemSet, config: BoundaryConfig) -> Self {
        Self { item_set, config, table: None, scratch: CuboidScratch::default(), buffer: None }
    }

    pub fn item_set(&self) -> &ItemSet {
        &self.item_set
    }

    fn table(&mut self, bin: &BinConfig) -> &FitTable {
        if self.table.as_ref().is_none_or(|t| t.bin() != bin) {
            self.table = Some(FitTable::new(&self.item_set, bin));
        }
        self.table.as_ref().expect("table built above")
    }

    /// Bin score after the placement, or `None` if it is infeasible.
    pub fn score_placement(&mut self, map: &HeightMap, item: &crate::state::Item, action: &Action) -> Option<Value> {
        if !map.is_feasible(item, action.orientation, action.x, action.y) {
            return None;
        }
        let bin = *map.bin();
        self.table(&bin);
        let buffer = match self.buffer.as_mut() {
            Some(b) if b.bin() == &bin => {
                b.clone_from(map);
                b
            }
            _ => self.buffer.insert(map.clone()),
        };
        buffer.apply(item, action.orientation, action.x, action.y).ok()?;

        let table = self.table.as_ref().expect("table built above");
        let (mut rated, mut volume, mut n) = (0i64, 0i64, 0i64);
        for_each_maximal_cuboid(buffer, &mut self.scratch, |c| {
            let count = table.count(c.l, c.w, c.h);
            rated += count as i64 + if count == table.all { ALL_TYPES_BONUS } else { 0 };
            volume += c.volume() as i64;
            n += 1;
        });
        if n == 0 {
            return Some(Value::from_integer(0));
        }
        let total = Value::from_integer(rated) + self.config.volume_scale * Value::new(volume, bin.volume() as i64);
        Some(match self.config.aggregate {
            Aggregate::Mean => total / Value::from_integer(n),
            Aggregate::Sum => total,
        })
    }
}

/// Total order used to break score ties: lower resting height, then y, x, orientation.
fn tie_key(map: &HeightMap, item: &crate::state::Item, a: &Action) -> (u32, u32, u32, usize) {
    let (l, w) = item.footprint(a.orientation);
    (map.max_over(a.x, a.y, l, w), a.y, a.x, a.orientation.index())
}

impl Policy for BoundaryRule {
    fn name(&self) -> String {
        "boundary-rule".into()
    }

    fn decide(&mut self, obs: &Observation<'_>, mask: &FeasibilityMask) -> Result<PolicyDecision, PolicyError> {
        let item = *obs.current().ok_or(PolicyError::NoFeasibleAction)?;
        let map = obs.height_map;
        let bin = *map.bin();
        let mut scores = vec![None; 2 * bin.cells()];
        let mut best: Option<(Value, (u32, u32, u32, usize), Action)> = None;
        for action in mask.feasible_actions() {
            let Some(score) = self.score_placement(map, &item, &action) else {
                continue;
            };
            scores[action.flat_index(&bin)] = Some(score);
            let key = tie_key(map, &item, &action);
            let better = match &best {
                None => true,
                Some((bs, bk, _)) => match score.cmp(bs) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => key < *bk,
                },
            };
            if better {
                best = Some((score, key, action));
            }
        }
        let (_, _, action) = best.ok_or(PolicyError::NoFeasibleAction)?;
        Ok(PolicyDecision { action, score_map: Some(scores) })
    }
}
