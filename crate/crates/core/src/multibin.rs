//! Routing one item stream across several open bins.
//!
//! Each bin remembers the value estimate it had when it was last chosen; an
//! arriving item goes to the bin whose estimate changed the most since then
//! (`argmax V(H(b)) - b.val`), and that bin's memory is refreshed.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::PolicyError;
use crate::policies::{checked_decide, Observation, Policy, ValueEstimator};
use crate::state::{compute_mask, BinConfig, HeightMap, Item, PackedItem};
use crate::Value;

/// Initial memory of every bin.
pub fn default_score() -> Value {
    Value::new(-1, 5)
}

/// What happens when the chosen bin cannot host the item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Closing {
    /// Close the bin and route the item among the bins still open.
    #[default]
    Reroute,
    /// Close the bin and discard the item.
    Drop,
}

impl fmt::Display for Closing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Closing::Reroute => "reroute",
            Closing::Drop => "drop",
        })
    }
}

impl FromStr for Closing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reroute" => Ok(Closing::Reroute),
            "drop" => Ok(Closing::Drop),
            other => Err(format!("unknown closing rule `{other}` (reroute, drop)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoolBin {
    pub map: HeightMap,
    pub val: Value,
    pub packed: Vec<PackedItem>,
    pub open: bool,
}

impl PoolBin {
    pub fn utilization(&self) -> Value {
        let volume: u64 = self.packed.iter().map(|p| p.item.volume()).sum();
        Value::new(volume as i64, self.map.bin().volume() as i64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinPool {
    pub bins: Vec<PoolBin>,
    pub rotation: bool,
}

impl BinPool {
    pub fn new(bin: BinConfig, count: usize, rotation: bool) -> Self {
        Self::with_default_score(bin, count, rotation, default_score())
    }

    pub fn with_default_score(bin: BinConfig, count: usize, rotation: bool, s_def: Value) -> Self {
        let fresh = PoolBin { map: HeightMap::new(bin), val: s_def, packed: Vec::new(), open: true };
        Self { bins: vec![fresh; count], rotation }
    }

    pub fn open_count(&self) -> usize {
        self.bins.iter().filter(|b| b.open).count()
    }
}

/// Picks the open bin maximizing `V(H(b), item) - b.val` (lowest index on
/// ties) and stores `V(H(b), item)` as its new memory. `None` when every bin
/// is closed.
pub fn select_bin<V: ValueEstimator + ?Sized>(pool: &mut BinPool, item: &Item, estimator: &V) -> Option<usize> {
    let mut best: Option<(Value, Value, usize)> = None;
    for (i, bin) in pool.bins.iter().enumerate().filter(|(_, b)| b.open) {
        let v = estimator.value(&bin.map, Some(item));
        let gain = v - bin.val;
        if best.as_ref().is_none_or(|(g, _, _)| gain > *g) {
            best = Some((gain, v, i));
        }
    }
    let (_, v, i) = best?;
    pool.bins[i].val = v;
    Some(i)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinStats {
    pub utilization: Value,
    pub items: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultibinRecord {
    pub bins: Vec<BinStats>,
    pub items_seen: usize,
    pub items_packed: usize,
    pub dropped: usize,
    /// Bin chosen for every packed item, in arrival order.
    pub routes: Vec<usize>,
    pub decision_time: Duration,
}

impl MultibinRecord {
    pub fn mean_utilization(&self) -> Value {
        let total: Value = self.bins.iter().map(|b| b.utilization).sum();
        total / Value::from_integer(self.bins.len().max(1) as i64)
    }

    pub fn items_per_bin(&self) -> Value {
        Value::new(self.items_packed as i64, self.bins.len().max(1) as i64)
    }

    /// Mean wall time per routed item, covering bin selection and placement.
    pub fn mean_decision_time(&self) -> Duration {
        if self.items_seen == 0 {
            Duration::ZERO
        } else {
            self.decision_time / self.items_seen as u32
        }
    }
}

/// Streams `items` through the pool until the sequence ends or every bin is closed.
pub fn run_multibin_episode<P, V>(
    pool: &mut BinPool,
    items: &[Item],
    policy: &mut P,
    estimator: &V,
    closing: Closing,
) -> Result<MultibinRecord, PolicyError>
where
    P: Policy + ?Sized,
    V: ValueEstimator + ?Sized,
{
    let mut record = MultibinRecord {
        bins: Vec::new(),
        items_seen: 0,
        items_packed: 0,
        dropped: 0,
        routes: Vec::new(),
        decision_time: Duration::ZERO,
    };
    for item in items {
        if pool.open_count() == 0 {
            break;
        }
        record.items_seen += 1;
        let start = Instant::now();
        let mut placed = false;
        while let Some(b) = select_bin(pool, item, estimator) {
            let bin = &mut pool.bins[b];
            let mask = compute_mask(&bin.map, item, pool.rotation);
            if !mask.any() {
                bin.open = false;
                match closing {
                    Closing::Reroute => continue,
                    Closing::Drop => break,
                }
            }
            let obs = Observation::new(&bin.map, std::slice::from_ref(item));
            let action = checked_decide(policy, &obs, &mask)?.action;
            let z = bin
                .map
                .apply(item, action.orientation, action.x, action.y)
                .expect("mask-true placement applies");
            bin.packed.push(PackedItem { item: *item, orientation: action.orientation, x: action.x, y: action.y, z });
            record.routes.push(b);
            placed = true;
            break;
        }
        record.decision_time += start.elapsed();
        if placed {
            record.items_packed += 1;
        } else {
            record.dropped += 1;
        }
    }
    record.bins = pool
        .bins
        .iter()
        .map(|b| BinStats { utilization: b.utilization(), items: b.packed.len() })
        .collect();
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::{DeepestBottomLeft, Estimator};

    #[test]
    fn single_bin_always_zero() {
        let mut pool = BinPool::new(BinConfig::cube(10), 1, false);
        let item = Item::new(2, 2, 2).unwrap();
        for _ in 0..5 {
            assert_eq!(select_bin(&mut pool, &item, &Estimator::FreeVolume), Some(0));
        }
    }

    #[test]
    fn identical_bins_tie_to_lowest_index() {
        let mut pool = BinPool::new(BinConfig::cube(10), 3, false);
        let item = Item::new(2, 2, 2).unwrap();
        assert_eq!(select_bin(&mut pool, &item, &Estimator::FreeVolume), Some(0));
        assert_eq!(pool.bins[0].val, Value::from_integer(10));
        // the others keep their initial memory
        assert_eq!(pool.bins[1].val, default_score());
        assert_eq!(pool.bins[2].val, default_score());
    }

    #[test]
    fn nearly_full_bin_loses_to_empty_bin() {
        let bin = BinConfig::cube(10);
        let mut pool = BinPool::new(bin, 2, false);
        pool.bins[0].map = HeightMap::from_grid(bin, vec![9; 100]).unwrap();
        // gains: 1 - (-0.2) for the full bin, 10 - (-0.2) for the empty one
        assert_eq!(select_bin(&mut pool, &Item::new(2, 2, 2).unwrap(), &Estimator::FreeVolume), Some(1));
    }

    #[test]
    fn constant_estimator_sticks_to_first_open_bin() {
        let bin = BinConfig::cube(4);
        let mut pool = BinPool::new(bin, 3, false);
        let zero = Estimator::Zero;
        let items = vec![Item::new(2, 2, 2).unwrap(); 10];
        let rec = run_multibin_episode(&mut pool, &items, &mut DeepestBottomLeft, &zero, Closing::Reroute).unwrap();
        // first bin takes 8 cubes; the first choice refreshes its memory to 0,
        // after which every bin's gain is 0 or 0.2 and the untouched ones win
        assert_eq!(rec.routes[0], 0);
        assert_eq!(rec.routes[1], 1);
        assert_eq!(rec.routes[2], 2);
        assert!(rec.routes[3..].iter().all(|&b| b == 0));
        assert_eq!(rec.items_packed, 10);
    }

    #[test]
    fn closing_rules() {
        let bin = BinConfig::cube(2);
        let big = Item::new(2, 2, 2).unwrap();
        let items = vec![big; 3];
        let mut pool = BinPool::new(bin, 2, false);
        let rec = run_multibin_episode(&mut pool, &items, &mut DeepestBottomLeft, &Estimator::FreeVolume, Closing::Reroute)
            .unwrap();
        assert_eq!(rec.items_packed, 2);
        assert_eq!(rec.dropped, 1);
        assert_eq!(pool.open_count(), 0);

        // with dropping, the third item closes one bin and is lost; no fourth item is tried
        let mut pool = BinPool::new(bin, 2, false);
        let items = vec![big, big, big, big];
        let rec = run_multibin_episode(&mut pool, &items, &mut DeepestBottomLeft, &Estimator::FreeVolume, Closing::Drop)
            .unwrap();
        assert_eq!(rec.items_packed, 2);
        assert_eq!(rec.items_seen, 4);
        assert_eq!(rec.dropped, 2);
    }
}
