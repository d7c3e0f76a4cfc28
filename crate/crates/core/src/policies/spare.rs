//! Maximal empty cuboids of the free space above a height map.
//!
//! Free space is upward closed, so every maximal cuboid reaches the bin top
//! and is fixed by its footprint rectangle `R`: the cuboid is `R x [z, H)`
//! with `z = max(R)`. It is maximal exactly when `R` is a maximal rectangle
//! of the cell set `{h <= z}` and some cell of `R` sits at height `z`.
//! Enumeration therefore runs one maximal-rectangle sweep per distinct height.

use serde::{Deserialize, Serialize};

use crate::state::HeightMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpareCuboid {
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub l: u32,
    pub w: u32,
    pub h: u32,
}

impl SpareCuboid {
    pub fn volume(&self) -> u64 {
        self.l as u64 * self.w as u64 * self.h as u64
    }
}

/// Reusable buffers for [`for_each_maximal_cuboid`].
#[derive(Default, Debug)]
pub struct CuboidScratch {
    levels: Vec<u32>,
    /// Prefix counts of cells at exactly the current level, `(L+1) x (W+1)`.
    at_level: Vec<u32>,
    /// Per-row prefix counts of cells above the current level, `W x (L+1)`.
    blocked: Vec<u32>,
    up: Vec<u32>,
    left: Vec<i32>,
    right: Vec<i32>,
    prev_le: Vec<i32>,
    stack: Vec<usize>,
}

pub fn maximal_spare_cuboids(map: &HeightMap) -> Vec<SpareCuboid> {
    let mut out = Vec::new();
    for_each_maximal_cuboid(map, &mut CuboidScratch::default(), |c| out.push(c));
    out
}

/// Calls `visit` once per maximal spare cuboid, without allocating per call
/// once `scratch` has warmed up.
pub fn for_each_maximal_cuboid<F: FnMut(SpareCuboid)>(map: &HeightMap, scratch: &mut CuboidScratch, mut visit: F) {
    let bin = *map.bin();
    let (len, wid, top) = (bin.length as usize, bin.width as usize, bin.height);
    let grid = map.cells();

    let s = scratch;
    s.levels.clear();
    s.levels.extend(grid.iter().copied().filter(|&h| h < top));
    s.levels.sort_unstable();
    s.levels.dedup();

    s.at_level.resize((len + 1) * (wid + 1), 0);
    s.blocked.resize(wid * (len + 1), 0);
    s.up.resize(len, 0);
    s.left.resize(len, 0);
    s.right.resize(len, 0);
    s.prev_le.resize(len, 0);

    for li in 0..s.levels.len() {
        let z = s.levels[li];

        // prefix tables for this level
        let stride = len + 1;
        s.at_level[..stride].fill(0);
        for y in 0..wid {
            let mut row_at = 0;
            let base = (y + 1) * stride;
            s.at_level[base] = 0;
            s.blocked[y * stride] = 0;
            for x in 0..len {
                let h = grid[x + len * y];
                row_at += (h == z) as u32;
                s.at_level[base + x + 1] = s.at_level[base - stride + x + 1] + row_at;
                s.blocked[y * stride + x + 1] = s.blocked[y * stride + x] + (h > z) as u32;
            }
        }

        s.up.fill(0);
        for y1 in 0..wid {
            for x in 0..len {
                s.up[x] = if grid[x + len * y1] <= z { s.up[x] + 1 } else { 0 };
            }

            // left: nearest index with up < up[x]; prev_le: nearest with up <= up[x]
            s.stack.clear();
            for x in 0..len {
                while let Some(&t) = s.stack.last() {
                    if s.up[t] >= s.up[x] {
                        s.stack.pop();
                    } else {
                        break;
                    }
                }
                s.left[x] = s.stack.last().map_or(-1, |&t| t as i32);
                s.stack.push(x);
            }
            s.stack.clear();
            for x in 0..len {
                while let Some(&t) = s.stack.last() {
                    if s.up[t] > s.up[x] {
                        s.stack.pop();
                    } else {
                        break;
                    }
                }
                s.prev_le[x] = s.stack.last().map_or(-1, |&t| t as i32);
                s.stack.push(x);
            }
            s.stack.clear();
            for x in (0..len).rev() {
                while let Some(&t) = s.stack.last() {
                    if s.up[t] >= s.up[x] {
                        s.stack.pop();
                    } else {
                        break;
                    }
                }
                s.right[x] = s.stack.last().map_or(len as i32, |&t| t as i32);
                s.stack.push(x);
            }

            for x in 0..len {
                let height = s.up[x] as usize;
                // skip empty columns and repeats of an equal-height run
                if height == 0 || s.prev_le[x] != s.left[x] {
                    continue;
                }
                let a = (s.left[x] + 1) as usize;
                let b = s.right[x] as usize; // exclusive
                let y0 = y1 + 1 - height;

                // cannot grow past row y1 + 1
                if y1 + 1 < wid {
                    let row = (y1 + 1) * stride;
                    if s.blocked[row + b] == s.blocked[row + a] {
                        continue;
                    }
                }
                // must touch level z, otherwise it belongs to a lower level
                let at = s.at_level[(y1 + 1) * stride + b] + s.at_level[y0 * stride + a]
                    - s.at_level[(y1 + 1) * stride + a]
                    - s.at_level[y0 * stride + b];
                if at == 0 {
                    continue;
                }
                visit(SpareCuboid {
                    x: a as u32,
                    y: y0 as u32,
                    z,
                    l: (b - a) as u32,
                    w: height as u32,
                    h: top - z,
                });
            }
        }
    }
}
