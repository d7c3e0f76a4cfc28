//! Recursive guillotine cutting of the bin into valid item types.

use rand::Rng;

use super::items::check_thresholds;
use crate::error::DatagenError;
use crate::state::{BinConfig, Item, Orientation, PackedItem};

/// Fresh split planes tried on one cuboid before the whole cut restarts.
pub const SPLIT_RETRIES: u32 = 32;
/// Whole-cut restarts before giving up.
pub const MAX_RESTARTS: u32 = 64;

/// A tiling of the bin together with the number of restarts it needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub pieces: Vec<PackedItem>,
    pub restarts: u32,
}

#[derive(Clone, Copy, Debug)]
struct Block {
    origin: [u32; 3],
    size: [u32; 3],
}

impl Block {
    fn is_valid(&self, dim_min: u32, dim_max: u32) -> bool {
        self.size.iter().all(|&d| (dim_min..=dim_max).contains(&d))
    }

    fn split(&self, axis: usize, offset: u32) -> (Block, Block) {
        let mut lo = *self;
        let mut hi = *self;
        lo.size[axis] = offset;
        hi.origin[axis] += offset;
        hi.size[axis] -= offset;
        (lo, hi)
    }

    fn into_packed(self) -> PackedItem {
        PackedItem {
            item: Item { l: self.size[0], w: self.size[1], h: self.size[2] },
            orientation: Orientation::Identity,
            x: self.origin[0],
            y: self.origin[1],
            z: self.origin[2],
        }
    }
}

/// Cuts the bin until every piece has all axes in `[dim_min, dim_max]`.
///
/// Pieces are popped uniformly from the pending list; an axis longer than
/// `dim_max` is picked uniformly and split at a uniform plane. A plane that
/// would leave a side shorter than `dim_min` is redrawn, and after
/// [`SPLIT_RETRIES`] failed draws the cut starts over from the full bin.
pub fn cut_bin<R: Rng + ?Sized>(
    rng: &mut R,
    bin: &BinConfig,
    dim_min: u32,
    dim_max: u32,
) -> Result<Cut, DatagenError> {
    check_thresholds(bin, dim_min, dim_max)?;
    for restarts in 0..=MAX_RESTARTS {
        if let Some(pieces) = try_cut(rng, bin, dim_min, dim_max) {
            return Ok(Cut { pieces, restarts });
        }
    }
    Err(DatagenError::CutExhausted { restarts: MAX_RESTARTS })
}

fn try_cut<R: Rng + ?Sized>(rng: &mut R, bin: &BinConfig, dim_min: u32, dim_max: u32) -> Option<Vec<PackedItem>> {
    let mut invalid = vec![Block { origin: [0; 3], size: [bin.length, bin.width, bin.height] }];
    let mut valid = Vec::new();
    while !invalid.is_empty() {
        let block = invalid.swap_remove(rng.gen_range(0..invalid.len()));
        let axes: Vec<usize> = (0..3).filter(|&a| block.size[a] > dim_max).collect();
        if axes.is_empty() {
            // too small on some axis and nothing left to cut
            return None;
        }
        let axis = axes[rng.gen_range(0..axes.len())];
        let extent = block.size[axis];
        let offset = (0..SPLIT_RETRIES)
            .map(|_| rng.gen_range(1..extent))
            .find(|&o| o >= dim_min && extent - o >= dim_min)?;
        let (lo, hi) = block.split(axis, offset);
        for part in [lo, hi] {
            if part.is_valid(dim_min, dim_max) {
                valid.push(part.into_packed());
            } else {
                invalid.push(part);
            }
        }
    }
    Some(valid)
}
