use std::time::Duration;

use pack3d_core::error::PolicyError;
use pack3d_core::policies::bridge::{BridgeRequest, BridgeResponse};
use pack3d_core::policies::{ExternalPolicy, Observation, Policy};
use pack3d_core::rng::seeded;
use pack3d_core::state::{compute_mask, BinConfig, HeightMap, Item};
use proptest::prelude::*;
use rand::Rng;

fn stub(mode: &str, timeout: Duration) -> ExternalPolicy {
    ExternalPolicy::spawn(env!("CARGO_BIN_EXE_bridge-stub"), &[mode.to_string()], timeout).unwrap()
}

fn sample() -> (HeightMap, Vec<Item>) {
    let bin = BinConfig::cube(10);
    let mut map = HeightMap::new(bin);
    for x in 0..3 {
        map.set(x, 0, 4);
    }
    (map, vec![Item::new(2, 3, 2).unwrap(), Item::new(4, 4, 4).unwrap()])
}

#[test]
fn echo_stub_answer_is_accepted() {
    let (map, items) = sample();
    let mask = compute_mask(&map, &items[0], true);
    let mut policy = stub("first", Duration::from_secs(10));
    let obs = Observation::new(&map, &items);
    let d = policy.decide(&obs, &mask).unwrap();
    assert_eq!(d.action, mask.feasible_actions().next().unwrap());
    // the handle serves several requests in a row
    assert_eq!(policy.decide(&obs, &mask).unwrap(), d);
}

#[test]
fn mask_false_answer_is_rejected() {
    let (map, items) = sample();
    let mask = compute_mask(&map, &items[0], false);
    let mut policy = stub("bad", Duration::from_secs(10));
    let err = policy.decide(&Observation::new(&map, &items), &mask).unwrap_err();
    assert!(matches!(err, PolicyError::MaskRejected(0)), "{err}");
}

#[test]
fn failures_are_distinct() {
    let (map, items) = sample();
    let mask = compute_mask(&map, &items[0], false);
    let obs = Observation::new(&map, &items);

    let err = stub("die", Duration::from_secs(10)).decide(&obs, &mask).unwrap_err();
    assert!(matches!(err, PolicyError::ProcessDied), "{err}");

    let err = stub("sleep", Duration::from_millis(200)).decide(&obs, &mask).unwrap_err();
    assert!(matches!(err, PolicyError::Timeout(_)), "{err}");

    let err = stub("garbage", Duration::from_secs(10)).decide(&obs, &mask).unwrap_err();
    assert!(matches!(err, PolicyError::Protocol(_)), "{err}");

    let err = stub("old", Duration::from_secs(10)).decide(&obs, &mask).unwrap_err();
    assert!(matches!(err, PolicyError::Protocol(_)), "{err}");

    let err = ExternalPolicy::spawn("/nonexistent/bridge", &[], Duration::from_secs(1)).err().unwrap();
    assert!(matches!(err, PolicyError::Spawn(_)), "{err}");
}

#[test]
fn dead_handle_stays_dead() {
    let (map, items) = sample();
    let mask = compute_mask(&map, &items[0], false);
    let obs = Observation::new(&map, &items);
    let mut policy = stub("sleep", Duration::from_millis(100));
    assert!(matches!(policy.decide(&obs, &mask), Err(PolicyError::Timeout(_))));
    assert!(matches!(policy.decide(&obs, &mask), Err(PolicyError::ProcessDied)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn request_round_trip_is_byte_stable(seed in any::<u64>(), n in 1u32..=12, k in 1usize..5) {
        let mut rng = seeded(seed);
        let bin = BinConfig::new(n, rng.gen_range(1..=12), rng.gen_range(1..=12)).unwrap();
        let grid = (0..bin.cells()).map(|_| rng.gen_range(0..=bin.height)).collect();
        let map = HeightMap::from_grid(bin, grid).unwrap();
        let items: Vec<Item> = (0..k)
            .map(|_| Item::new(rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4)).unwrap())
            .collect();
        let mask = compute_mask(&map, &items[0], rng.gen());
        let line = BridgeRequest::new(&Observation::new(&map, &items), &mask).to_line();
        let again = BridgeRequest::from_line(&line).unwrap().to_line();
        prop_assert_eq!(&line, &again);
        prop_assert!(!line.contains('\n'));

        let resp = BridgeResponse { version: 1, action: rng.gen_range(0..1000) }.to_line();
        prop_assert_eq!(BridgeResponse::from_line(&resp).unwrap().to_line(), resp);
    }
}
