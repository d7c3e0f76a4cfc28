//! State-value estimators standing in for a learned critic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::state::{compute_mask, reward, volume_reward, HeightMap, Item};
use crate::Value;

/// Estimated reward still to come from a bin, on the same `0..=10` scale as rewards.
pub trait ValueEstimator {
    fn value(&self, map: &HeightMap, next: Option<&Item>) -> Value;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Estimator {
    Zero,
    /// Reward of the next item if it has any feasible placement.
    GreedyFit { rotation: bool },
    /// `10 x` free volume above the height map over the bin volume.
    #[default]
    FreeVolume,
}

impl ValueEstimator for Estimator {
    fn value(&self, map: &HeightMap, next: Option<&Item>) -> Value {
        match *self {
            Estimator::Zero => Value::from_integer(0),
            Estimator::GreedyFit { rotation } => match next {
                Some(item) if compute_mask(map, item, rotation).any() => reward(item, map.bin()),
                _ => Value::from_integer(0),
            },
            Estimator::FreeVolume => volume_reward(map.free_volume(), map.bin()),
        }
    }
}

impl<F: Fn(&HeightMap, Option<&Item>) -> Value> ValueEstimator for F {
    fn value(&self, map: &HeightMap, next: Option<&Item>) -> Value {
        self(map, next)
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimator::Zero => f.write_str("zero"),
            Estimator::GreedyFit { .. } => f.write_str("greedy-fit"),
            Estimator::FreeVolume => f.write_str("free-volume"),
        }
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(Estimator::Zero),
            "greedy-fit" => Ok(Estimator::GreedyFit { rotation: false }),
            "free-volume" => Ok(Estimator::FreeVolume),
            other => Err(format!("unknown estimator `{other}` (zero, greedy-fit, free-volume)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{BinConfig, Orientation};

    #[test]
    fn builtins() {
        let bin = BinConfig::cube(10);
        let empty = HeightMap::new(bin);
        let item = Item::new(2, 2, 2).unwrap();
        assert_eq!(Estimator::Zero.value(&empty, Some(&item)), Value::from_integer(0));
        assert_eq!(Estimator::FreeVolume.value(&empty, None), Value::from_integer(10));
        assert_eq!(Estimator::GreedyFit { rotation: false }.value(&empty, Some(&item)), Value::new(8, 100));
        assert_eq!(Estimator::GreedyFit { rotation: false }.value(&empty, None), Value::from_integer(0));

        let nearly_full = HeightMap::from_grid(bin, vec![9; 100]).unwrap();
        assert_eq!(Estimator::GreedyFit { rotation: true }.value(&nearly_full, Some(&item)), Value::from_integer(0));
        assert_eq!(Estimator::FreeVolume.value(&nearly_full, None), Value::from_integer(1));
    }

    #[test]
    fn never_promises_more_than_remaining_volume() {
        let bin = BinConfig::cube(10);
        let item = Item::new(5, 4, 3).unwrap();
        let map = HeightMap::new(bin).place(&item, Orientation::Identity, 2, 2).unwrap();
        let packed = reward(&item, &bin);
        for est in [Estimator::Zero, Estimator::FreeVolume, Estimator::GreedyFit { rotation: true }] {
            let v = est.value(&map, Some(&item));
            assert!(v >= Value::from_integer(0) && v <= Value::from_integer(10) - packed, "{est}");
        }
    }

    #[test]
    fn closures_are_estimators() {
        let constant = |_: &HeightMap, _: Option<&Item>| Value::from_integer(3);
        assert_eq!(constant.value(&HeightMap::new(BinConfig::cube(4)), None), Value::from_integer(3));
    }
}
