//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use pack3d_core::datagen::{predefined_item_set, ItemSet};
use pack3d_core::policies::{Observation, Policy, RandomFeasible};
use pack3d_core::state::{compute_mask, BinConfig, HeightMap, Item, Orientation};
use rand::seq::SliceRandom;
use rand::Rng;

/// Occupancy grid of unit voxels, indexed `[x][y][z]`.
pub struct Voxels {
    pub l: usize,
    pub w: usize,
    pub h: usize,
    pub cells: Vec<bool>,
}

impl Voxels {
    pub fn from_heights(map: &HeightMap) -> Self {
        let bin = *map.bin();
        let (l, w, h) = (bin.length as usize, bin.width as usize, bin.height as usize);
        let mut v = Voxels { l, w, h, cells: vec![false; l * w * h] };
        for x in 0..l {
            for y in 0..w {
                for z in 0..map.get(x as u32, y as u32) as usize {
                    v.set(x, y, z, true);
                }
            }
        }
        v
    }

    pub fn idx(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.w + y) * self.h + z
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> bool {
        self.cells[self.idx(x, y, z)]
    }

    pub fn set(&mut self, x: usize, y: usize, z: usize, v: bool) {
        let i = self.idx(x, y, z);
        self.cells[i] = v;
    }

    fn box_free(&self, x: usize, y: usize, z: usize, l: usize, w: usize, h: usize) -> bool {
        (x..x + l).all(|i| (y..y + w).all(|j| (z..z + h).all(|k| !self.get(i, j, k))))
    }

    /// Lets a box fall from the top of the bin and returns where it stops,
    /// or `None` if it does not fit in the bin at all.
    pub fn drop_box(&self, x: usize, y: usize, l: usize, w: usize, h: usize) -> Option<usize> {
        if x + l > self.l || y + w > self.w || h > self.h {
            return None;
        }
        let mut z = self.h - h;
        if !self.box_free(x, y, z, l, w, h) {
            return None;
        }
        while z > 0 && self.box_free(x, y, z - 1, l, w, h) {
            z -= 1;
        }
        Some(z)
    }

    /// Feasibility by first principles: the box falls, must stay in the bin,
    /// and its bottom face must rest on enough voxels under the three rules.
    pub fn placement_ok(&self, item: &Item, o: Orientation, x: usize, y: usize) -> bool {
        let (l, w) = match o {
            Orientation::Identity => (item.l as usize, item.w as usize),
            Orientation::SwapLW => (item.w as usize, item.l as usize),
        };
        let h = item.h as usize;
        let Some(z) = self.drop_box(x, y, l, w, h) else {
            return false;
        };
        // the drop can pass through gaps above a column, which columns never have;
        // still, resting height must match the tallest column below
        let supported = |i: usize, j: usize| z == 0 || self.get(i, j, z - 1);
        let mut count = 0;
        for i in x..x + l {
            for j in y..y + w {
                count += supported(i, j) as usize;
            }
        }
        let corners = [(x, y), (x + l - 1, y), (x, y + w - 1), (x + l - 1, y + w - 1)]
            .iter()
            .filter(|&&(i, j)| supported(i, j))
            .count();
        let area = l * w;
        let frac = count as f64 / area as f64;
        let eps = 1e-12;
        (frac + eps >= 0.60 && corners == 4) || (frac + eps >= 0.80 && corners >= 3) || frac + eps >= 0.95
    }
}

/// Height map reached by dropping up to `steps` random items at random feasible spots.
pub fn random_map<R: Rng>(rng: &mut R, bin: BinConfig, set: &ItemSet, steps: usize) -> HeightMap {
    let mut map = HeightMap::new(bin);
    let mut policy = RandomFeasible::new(rng.gen());
    for _ in 0..steps {
        let item = *set.items.choose(rng).unwrap();
        let mask = compute_mask(&map, &item, true);
        if !mask.any() {
            continue;
        }
        let a = policy.decide(&Observation::new(&map, std::slice::from_ref(&item)), &mask).unwrap().action;
        map = map.place(&item, a.orientation, a.x, a.y).unwrap();
    }
    map
}

pub fn standard_set(bin: &BinConfig) -> ItemSet {
    let max = bin.length.min(bin.width).min(bin.height) / 2;
    predefined_item_set(bin, 2, max).unwrap()
}

/// All maximal empty boxes of the free voxels, by exhaustive enumeration.
pub fn brute_force_maximal_boxes(v: &Voxels) -> Vec<(usize, usize, usize, usize, usize, usize)> {
    let (l, w, h) = (v.l, v.w, v.h);
    // 3D prefix sums of occupied voxels
    let s = |x: usize, y: usize, z: usize| (x * (w + 1) + y) * (h + 1) + z;
    let mut p = vec![0i32; (l + 1) * (w + 1) * (h + 1)];
    for x in 1..=l {
        for y in 1..=w {
            for z in 1..=h {
                p[s(x, y, z)] = v.get(x - 1, y - 1, z - 1) as i32 + p[s(x - 1, y, z)] + p[s(x, y - 1, z)]
                    + p[s(x, y, z - 1)]
                    - p[s(x - 1, y - 1, z)]
                    - p[s(x - 1, y, z - 1)]
                    - p[s(x, y - 1, z - 1)]
                    + p[s(x - 1, y - 1, z - 1)];
            }
        }
    }
    let occupied = |x0: usize, x1: usize, y0: usize, y1: usize, z0: usize, z1: usize| {
        p[s(x1, y1, z1)] - p[s(x0, y1, z1)] - p[s(x1, y0, z1)] - p[s(x1, y1, z0)]
            + p[s(x0, y0, z1)]
            + p[s(x0, y1, z0)]
            + p[s(x1, y0, z0)]
            - p[s(x0, y0, z0)]
    };
    let mut out = Vec::new();
    for x0 in 0..l {
        for x1 in x0 + 1..=l {
            for y0 in 0..w {
                for y1 in y0 + 1..=w {
                    for z0 in 0..h {
                        for z1 in z0 + 1..=h {
                            if occupied(x0, x1, y0, y1, z0, z1) != 0 {
                                break;
                            }
                            let grow = [
                                x0 > 0 && occupied(x0 - 1, x1, y0, y1, z0, z1) == 0,
                                x1 < l && occupied(x0, x1 + 1, y0, y1, z0, z1) == 0,
                                y0 > 0 && occupied(x0, x1, y0 - 1, y1, z0, z1) == 0,
                                y1 < w && occupied(x0, x1, y0, y1 + 1, z0, z1) == 0,
                                z0 > 0 && occupied(x0, x1, y0, y1, z0 - 1, z1) == 0,
                                z1 < h && occupied(x0, x1, y0, y1, z0, z1 + 1) == 0,
                            ];
                            if !grow.iter().any(|&g| g) {
                                out.push((x0, y0, z0, x1 - x0, y1 - y0, z1 - z0));
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}
