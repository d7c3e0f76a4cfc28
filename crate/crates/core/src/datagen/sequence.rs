//! RS, CUT-1 and CUT-2 item sequences.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cut::cut_bin;
use super::items::{predefined_item_set, ItemSet};
use crate::error::DatagenError;
use crate::rng::seeded;
use crate::state::{BinConfig, HeightMap, Item, PackedItem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    /// Uniform random draws from the item set.
    RS,
    /// Cut pieces ordered by the height of their bottom face.
    CUT1,
    /// Cut pieces ordered so every piece follows its supporters.
    CUT2,
}

impl Origin {
    pub const ALL: [Origin; 3] = [Origin::RS, Origin::CUT1, Origin::CUT2];
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::RS => "RS",
            Origin::CUT1 => "CUT1",
            Origin::CUT2 => "CUT2",
        })
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "").as_str() {
            "RS" => Ok(Origin::RS),
            "CUT1" => Ok(Origin::CUT1),
            "CUT2" => Ok(Origin::CUT2),
            other => Err(format!("unknown dataset origin `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemSequence {
    pub bin: BinConfig,
    pub items: Vec<Item>,
    /// Placements that tile the bin, aligned with `items` (CUT datasets only).
    pub ground_truth: Option<Vec<PackedItem>>,
    pub seed: u64,
    pub origin: Origin,
}

impl ItemSequence {
    pub fn total_volume(&self) -> u64 {
        self.items.iter().map(Item::volume).sum()
    }
}

/// Draws items uniformly until the cumulative volume reaches the bin volume.
pub fn rs_sequence<R: Rng + ?Sized>(rng: &mut R, item_set: &ItemSet, bin: &BinConfig) -> ItemSequence {
    assert!(!item_set.is_empty(), "cannot sample from an empty item set");
    let mut items = Vec::new();
    let mut volume = 0;
    while volume < bin.volume() {
        let item = *item_set.items.choose(rng).expect("non-empty set");
        volume += item.volume();
        items.push(item);
    }
    ItemSequence { bin: *bin, items, ground_truth: None, seed: 0, origin: Origin::RS }
}

fn from_pieces(bin: &BinConfig, pieces: Vec<PackedItem>, origin: Origin) -> ItemSequence {
    ItemSequence {
        bin: *bin,
        items: pieces.iter().map(|p| p.item).collect(),
        ground_truth: Some(pieces),
        seed: 0,
        origin,
    }
}

/// Sorts pieces by bottom height; pieces at equal height are shuffled.
pub fn cut1_sequence<R: Rng + ?Sized>(bin: &BinConfig, cut: &[PackedItem], rng: &mut R) -> ItemSequence {
    let mut layers: BTreeMap<u32, Vec<PackedItem>> = BTreeMap::new();
    for p in cut {
        layers.entry(p.z).or_default().push(*p);
    }
    let mut ordered = Vec::with_capacity(cut.len());
    for (_, mut layer) in layers {
        layer.shuffle(rng);
        ordered.extend(layer);
    }
    from_pieces(bin, ordered, Origin::CUT1)
}

/// Repeatedly picks, uniformly, a remaining piece whose whole footprint has
/// reached its bottom height, then raises that footprint.
///
/// Panics if no piece is ready, which cannot happen for an exact tiling.
pub fn cut2_sequence<R: Rng + ?Sized>(bin: &BinConfig, cut: &[PackedItem], rng: &mut R) -> ItemSequence {
    let mut remaining: Vec<PackedItem> = cut.to_vec();
    let mut map = HeightMap::new(*bin);
    let mut ordered = Vec::with_capacity(cut.len());
    while !remaining.is_empty() {
        let ready: Vec<usize> = remaining
            .iter()
            .enumerate()
            .filter(|(_, p)| rests_flush(&map, p))
            .map(|(i, _)| i)
            .collect();
        assert!(!ready.is_empty(), "cut pieces do not form a stackable tiling");
        let pick = remaining.remove(ready[rng.gen_range(0..ready.len())]);
        map.apply(&pick.item, pick.orientation, pick.x, pick.y)
            .expect("ready piece fits in the bin");
        ordered.push(pick);
    }
    from_pieces(bin, ordered, Origin::CUT2)
}

fn rests_flush(map: &HeightMap, p: &PackedItem) -> bool {
    let (l, w, _) = p.extents();
    (p.y..p.y + w).all(|y| (p.x..p.x + l).all(|x| map.get(x, y) == p.z))
}

/// Everything needed to regenerate a sequence from a seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub origin: Origin,
    pub bin: BinConfig,
    pub dim_min: u32,
    pub dim_max: u32,
}

impl SequenceSpec {
    /// The standard setup: `[2, L/2]` items in the given bin.
    pub fn standard(origin: Origin, bin: BinConfig) -> Self {
        let dim_max = bin.length.min(bin.width).min(bin.height) / 2;
        Self { origin, bin, dim_min: 2, dim_max }
    }

    pub fn item_set(&self) -> Result<ItemSet, DatagenError> {
        predefined_item_set(&self.bin, self.dim_min, self.dim_max)
    }

    pub fn generate(&self, seed: u64) -> Result<ItemSequence, DatagenError> {
        let mut rng = seeded(seed);
        let mut seq = match self.origin {
            Origin::RS => rs_sequence(&mut rng, &self.item_set()?, &self.bin),
            Origin::CUT1 => {
                let cut = cut_bin(&mut rng, &self.bin, self.dim_min, self.dim_max)?;
                cut1_sequence(&self.bin, &cut.pieces, &mut rng)
            }
            Origin::CUT2 => {
                let cut = cut_bin(&mut rng, &self.bin, self.dim_min, self.dim_max)?;
                cut2_sequence(&self.bin, &cut.pieces, &mut rng)
            }
        };
        seq.seed = seed;
        Ok(seq)
    }
}
