use serde::{Deserialize, Serialize};

use crate::error::DatagenError;
use crate::state::{BinConfig, Item};

/// A pre-defined catalogue of item types: every `(l, w, h)` with each axis in
/// `[dim_min, dim_max]`, in lexicographic order. The position of an item in
/// `items` is its type id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemSet {
    pub items: Vec<Item>,
    pub dim_min: u32,
    pub dim_max: u32,
}

pub fn check_thresholds(bin: &BinConfig, dim_min: u32, dim_max: u32) -> Result<(), DatagenError> {
    let smallest = bin.length.min(bin.width).min(bin.height);
    if dim_min == 0 || dim_min > dim_max || dim_max > smallest / 2 {
        return Err(DatagenError::InvalidThresholds {
            min: dim_min,
            max: dim_max,
            bin: bin.to_string(),
        });
    }
    Ok(())
}

/// All item types with axes in `[dim_min, dim_max]`, e.g. 64 types for `(2, 5)`.
pub fn predefined_item_set(bin: &BinConfig, dim_min: u32, dim_max: u32) -> Result<ItemSet, DatagenError> {
    check_thresholds(bin, dim_min, dim_max)?;
    let mut items = Vec::new();
    for l in dim_min..=dim_max {
        for w in dim_min..=dim_max {
            for h in dim_min..=dim_max {
                items.push(Item { l, w, h });
            }
        }
    }
    Ok(ItemSet { items, dim_min, dim_max })
}

impl ItemSet {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn type_id(&self, item: &Item) -> Option<usize> {
        let range = self.dim_min..=self.dim_max;
        if !(range.contains(&item.l) && range.contains(&item.w) && range.contains(&item.h)) {
            return None;
        }
        let n = (self.dim_max - self.dim_min + 1) as usize;
        let off = |d: u32| (d - self.dim_min) as usize;
        let id = (off(item.l) * n + off(item.w)) * n + off(item.h);
        (self.items.get(id) == Some(item)).then_some(id)
    }

    /// Number of types that fit a `l x w x h` box in either horizontal orientation.
    pub fn count_fitting(&self, l: u32, w: u32, h: u32) -> usize {
        self.items
            .iter()
            .filter(|it| it.h <= h && ((it.l <= l && it.w <= w) || (it.w <= l && it.l <= w)))
            .count()
    }
}
