//! Bin, item and action primitives on the integer grid.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::StateError;

/// Bin dimensions in grid cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinConfig {
    pub length: u32,
    pub width: u32,
    pub height: u32,
}

impl BinConfig {
    pub fn new(length: u32, width: u32, height: u32) -> Result<Self, StateError> {
        if length == 0 || width == 0 || height == 0 {
            return Err(StateError::InvalidBin { length, width, height });
        }
        Ok(Self { length, width, height })
    }

    /// Cubic bin of side `n`.
    pub fn cube(n: u32) -> Self {
        Self::new(n, n, n).expect("cube side must be positive")
    }

    pub fn cells(&self) -> usize {
        self.length as usize * self.width as usize
    }

    pub fn volume(&self) -> u64 {
        self.length as u64 * self.width as u64 * self.height as u64
    }

    /// Flat cell index `x + L * y`.
    #[inline]
    pub fn cell(&self, x: u32, y: u32) -> usize {
        x as usize + self.length as usize * y as usize
    }
}

impl Default for BinConfig {
    fn default() -> Self {
        Self::cube(10)
    }
}

impl fmt::Display for BinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.length, self.width, self.height)
    }
}

/// A cuboid item with positive integer dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Item {
    pub l: u32,
    pub w: u32,
    pub h: u32,
}

impl Item {
    pub fn new(l: u32, w: u32, h: u32) -> Result<Self, StateError> {
        if l == 0 || w == 0 || h == 0 {
            return Err(StateError::InvalidItem { l, w, h });
        }
        Ok(Self { l, w, h })
    }

    pub fn volume(&self) -> u64 {
        self.l as u64 * self.w as u64 * self.h as u64
    }

    /// Footprint extents `(along x, along y)` once `orientation` is applied.
    pub fn footprint(&self, orientation: Orientation) -> (u32, u32) {
        match orientation {
            Orientation::Identity => (self.l, self.w),
            Orientation::SwapLW => (self.w, self.l),
        }
    }

    pub fn oriented(&self, orientation: Orientation) -> Item {
        let (l, w) = self.footprint(orientation);
        Item { l, w, h: self.h }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.l, self.w, self.h)
    }
}

/// Horizontal axis-aligned rotation of an item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub enum Orientation {
    #[default]
    Identity,
    SwapLW,
}

impl Orientation {
    pub const ALL: [Orientation; 2] = [Orientation::Identity, Orientation::SwapLW];

    pub fn compose(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Identity
        } else {
            Orientation::SwapLW
        }
    }

    /// Orientations available with rotation on or off.
    pub fn allowed(rotation: bool) -> &'static [Orientation] {
        if rotation {
            &Self::ALL
        } else {
            &Self::ALL[..1]
        }
    }

    pub fn index(self) -> usize {
        match self {
            Orientation::Identity => 0,
            Orientation::SwapLW => 1,
        }
    }
}

/// A loading position plus orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Action {
    pub x: u32,
    pub y: u32,
    pub orientation: Orientation,
}

impl Action {
    pub fn new(x: u32, y: u32, orientation: Orientation) -> Self {
        Self { x, y, orientation }
    }

    /// `x + L * y`, offset by `L * W` for the swapped orientation.
    pub fn flat_index(&self, bin: &BinConfig) -> usize {
        self.orientation.index() * bin.cells() + bin.cell(self.x, self.y)
    }

    pub fn from_flat_index(index: usize, bin: &BinConfig) -> Result<Self, StateError> {
        let cells = bin.cells();
        if index >= 2 * cells {
            return Err(StateError::ActionIndex { index, limit: 2 * cells });
        }
        let orientation = Orientation::ALL[index / cells];
        let cell = index % cells;
        let length = bin.length as usize;
        Ok(Self {
            x: (cell % length) as u32,
            y: (cell / length) as u32,
            orientation,
        })
    }
}

/// An item resting in the bin with its front-left-bottom corner at `(x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PackedItem {
    pub item: Item,
    pub orientation: Orientation,
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl PackedItem {
    /// Extents along x, y and z after orientation.
    pub fn extents(&self) -> (u32, u32, u32) {
        let (l, w) = self.item.footprint(self.orientation);
        (l, w, self.item.h)
    }

    pub fn action(&self) -> Action {
        Action::new(self.x, self.y, self.orientation)
    }

    pub fn fits_in(&self, bin: &BinConfig) -> bool {
        let (l, w, h) = self.extents();
        self.x + l <= bin.length && self.y + w <= bin.width && self.z + h <= bin.height
    }

    pub fn overlaps(&self, other: &PackedItem) -> bool {
        let (al, aw, ah) = self.extents();
        let (bl, bw, bh) = other.extents();
        self.x < other.x + bl
            && other.x < self.x + al
            && self.y < other.y + bw
            && other.y < self.y + aw
            && self.z < other.z + bh
            && other.z < self.z + ah
    }
}
