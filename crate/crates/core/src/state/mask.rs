use serde::{Deserialize, Serialize};

use super::geometry::{Action, BinConfig, Item, Orientation};
use super::heightmap::HeightMap;

/// Exact feasibility of every loading position, one `L x W` layer per orientation.
///
/// Cells are indexed by [`Action::flat_index`]; the swapped layer is always
/// allocated and stays all-false when rotation was not requested.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityMask {
    bin: BinConfig,
    rotation: bool,
    cells: Vec<bool>,
}

impl FeasibilityMask {
    pub fn empty(bin: BinConfig, rotation: bool) -> Self {
        Self { bin, rotation, cells: vec![false; 2 * bin.cells()] }
    }

    pub fn bin(&self) -> &BinConfig {
        &self.bin
    }

    pub fn rotation(&self) -> bool {
        self.rotation
    }

    pub fn orientations(&self) -> &'static [Orientation] {
        Orientation::allowed(self.rotation)
    }

    pub fn get(&self, action: &Action) -> bool {
        action.x < self.bin.length
            && action.y < self.bin.width
            && self.cells[action.flat_index(&self.bin)]
    }

    pub fn get_flat(&self, index: usize) -> bool {
        self.cells.get(index).copied().unwrap_or(false)
    }

    pub fn set(&mut self, action: &Action, value: bool) {
        let idx = action.flat_index(&self.bin);
        self.cells[idx] = value;
    }

    /// The `L x W` layer of one orientation, laid out as `x + L * y`.
    pub fn layer(&self, orientation: Orientation) -> &[bool] {
        let n = self.bin.cells();
        let start = orientation.index() * n;
        &self.cells[start..start + n]
    }

    pub fn any(&self) -> bool {
        self.cells.iter().any(|&c| c)
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Feasible actions in ascending flat-index order.
    pub fn feasible_actions(&self) -> impl Iterator<Item = Action> + '_ {
        let bin = self.bin;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(i, _)| Action::from_flat_index(i, &bin).expect("index within mask"))
    }
}

/// Evaluates [`HeightMap::is_feasible`] at every loading position.
pub fn compute_mask(map: &HeightMap, item: &Item, rotation: bool) -> FeasibilityMask {
    let bin = *map.bin();
    let mut mask = FeasibilityMask::empty(bin, rotation);
    for &orientation in Orientation::allowed(rotation) {
        let (l, w) = item.footprint(orientation);
        if l > bin.length || w > bin.width {
            continue;
        }
        for y in 0..=bin.width - w {
            for x in 0..=bin.length - l {
                if map.is_feasible(item, orientation, x, y) {
                    mask.set(&Action::new(x, y, orientation), true);
                }
            }
        }
    }
    mask
}
