//! Height-map bin state: the stacked height of every grid cell.
//!
//! Free space is modelled as everything at or above the recorded height of a
//! cell, so voids hidden under an overhang are not represented.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::geometry::{BinConfig, Item, Orientation};
use crate::error::StateError;

/// Supported-area thresholds, in percent, paired with the minimum number of
/// supported corners. A placement is stable if any pair holds (inclusive).
pub const STABILITY_RULES: [(u32, u8); 3] = [(60, 4), (80, 3), (95, 0)];

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeightMap {
    bin: BinConfig,
    grid: Vec<u32>,
}

/// Support statistics of a footprint: how much of it rests at the resting height.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Support {
    /// Resting height, the maximum height under the footprint.
    pub base: u32,
    /// Number of footprint cells whose height equals `base`.
    pub supported: u32,
    pub area: u32,
    /// Footprint corner cells at `base`, 0 to 4.
    pub corners: u8,
}

impl Support {
    pub fn ratio(&self) -> Ratio<u32> {
        Ratio::new(self.supported, self.area)
    }

    pub fn is_stable(&self) -> bool {
        STABILITY_RULES.iter().any(|&(percent, corners)| {
            self.supported * 100 >= percent * self.area && self.corners >= corners
        })
    }
}

impl HeightMap {
    pub fn new(bin: BinConfig) -> Self {
        Self { bin, grid: vec![0; bin.cells()] }
    }

    /// Builds a map from cells laid out as `x + L * y`.
    pub fn from_grid(bin: BinConfig, grid: Vec<u32>) -> Result<Self, String> {
        if grid.len() != bin.cells() {
            return Err(format!("expected {} cells, got {}", bin.cells(), grid.len()));
        }
        if let Some(h) = grid.iter().find(|&&h| h > bin.height) {
            return Err(format!("cell height {h} exceeds bin height {}", bin.height));
        }
        Ok(Self { bin, grid })
    }

    pub fn bin(&self) -> &BinConfig {
        &self.bin
    }

    pub fn cells(&self) -> &[u32] {
        &self.grid
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.grid[self.bin.cell(x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, value: u32) {
        assert!(value <= self.bin.height, "height {value} above bin top");
        let idx = self.bin.cell(x, y);
        self.grid[idx] = value;
    }

    pub fn occupied_volume(&self) -> u64 {
        self.grid.iter().map(|&h| h as u64).sum()
    }

    /// Volume of free space above the map.
    pub fn free_volume(&self) -> u64 {
        self.bin.volume() - self.occupied_volume()
    }

    pub fn in_bounds(&self, x: u32, y: u32, l: u32, w: u32) -> bool {
        x as u64 + l as u64 <= self.bin.length as u64 && y as u64 + w as u64 <= self.bin.width as u64
    }

    fn check_bounds(&self, x: u32, y: u32, l: u32, w: u32) -> Result<(), StateError> {
        if self.in_bounds(x, y, l, w) {
            Ok(())
        } else {
            Err(StateError::OutOfBounds {
                x,
                y,
                l,
                w,
                length: self.bin.length,
                width: self.bin.width,
            })
        }
    }

    /// Maximum height over an in-bounds rectangle.
    pub fn max_over(&self, x: u32, y: u32, l: u32, w: u32) -> u32 {
        let length = self.bin.length as usize;
        let mut best = 0;
        for row in y as usize..(y + w) as usize {
            let start = row * length + x as usize;
            for &h in &self.grid[start..start + l as usize] {
                best = best.max(h);
            }
        }
        best
    }

    fn support_unchecked(&self, x: u32, y: u32, l: u32, w: u32) -> Support {
        let base = self.max_over(x, y, l, w);
        let length = self.bin.length as usize;
        let mut supported = 0;
        for row in y as usize..(y + w) as usize {
            let start = row * length + x as usize;
            supported += self.grid[start..start + l as usize]
                .iter()
                .filter(|&&h| h == base)
                .count() as u32;
        }
        let (x1, y1) = (x + l - 1, y + w - 1);
        let corners = [(x, y), (x1, y), (x, y1), (x1, y1)]
            .iter()
            .filter(|&&(cx, cy)| self.get(cx, cy) == base)
            .count() as u8;
        Support { base, supported, area: l * w, corners }
    }

    /// Resting height, supported fraction and supported corners of an item footprint.
    pub fn support_stats(
        &self,
        item: &Item,
        orientation: Orientation,
        x: u32,
        y: u32,
    ) -> Result<Support, StateError> {
        let (l, w) = item.footprint(orientation);
        self.check_bounds(x, y, l, w)?;
        Ok(self.support_unchecked(x, y, l, w))
    }

    /// Containment plus the three-condition stability rule. Never errors.
    pub fn is_feasible(&self, item: &Item, orientation: Orientation, x: u32, y: u32) -> bool {
        let (l, w) = item.footprint(orientation);
        if !self.in_bounds(x, y, l, w) {
            return false;
        }
        let support = self.support_unchecked(x, y, l, w);
        support.base + item.h <= self.bin.height && support.is_stable()
    }

    /// Drops the item at `(x, y)`: the footprint becomes `h_max + h`.
    pub fn place(
        &self,
        item: &Item,
        orientation: Orientation,
        x: u32,
        y: u32,
    ) -> Result<HeightMap, StateError> {
        let mut next = self.clone();
        next.apply(item, orientation, x, y)?;
        Ok(next)
    }

    /// In-place variant of [`HeightMap::place`]; returns the resting height.
    pub fn apply(
        &mut self,
        item: &Item,
        orientation: Orientation,
        x: u32,
        y: u32,
    ) -> Result<u32, StateError> {
        let (l, w) = item.footprint(orientation);
        self.check_bounds(x, y, l, w)?;
        let base = self.max_over(x, y, l, w);
        let top = base + item.h;
        if top > self.bin.height {
            return Err(StateError::ConstraintViolation(super::Action::new(x, y, orientation)));
        }
        self.fill(x, y, l, w, top);
        Ok(base)
    }

    fn fill(&mut self, x: u32, y: u32, l: u32, w: u32, value: u32) {
        let length = self.bin.length as usize;
        for row in y as usize..(y + w) as usize {
            let start = row * length + x as usize;
            self.grid[start..start + l as usize].fill(value);
        }
    }

    /// Copy with the rectangle raised to the bin height, so nothing can rest on it.
    pub fn block_footprint(&self, x: u32, y: u32, l: u32, w: u32) -> Result<HeightMap, StateError> {
        let mut next = self.clone();
        next.block_in_place(x, y, l, w)?;
        Ok(next)
    }

    pub fn block_in_place(&mut self, x: u32, y: u32, l: u32, w: u32) -> Result<(), StateError> {
        self.check_bounds(x, y, l, w)?;
        let top = self.bin.height;
        self.fill(x, y, l, w, top);
        Ok(())
    }
}
