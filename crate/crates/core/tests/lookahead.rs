mod common;

use common::{random_map, standard_set};
use pack3d_core::error::SearchError;
use pack3d_core::lookahead::{brute_force_search, mcts_search, SearchBudget, BRUTE_FORCE_LIMIT};
use pack3d_core::policies::{BoundaryRule, DeepestBottomLeft, Estimator, Observation, Policy, ValueEstimator};
use pack3d_core::rng::seeded;
use pack3d_core::state::{
    compute_mask, reward, Action, BinConfig, EpisodeConfig, EpisodeState, HeightMap, Item, Orientation, RewardMode,
};
use pack3d_core::Value;
use rand::seq::SliceRandom;
use rand::Rng;

fn budget(simulations: usize, seed: u64) -> SearchBudget {
    SearchBudget { simulations, exploration: 1.0, seed }
}

fn random_case(rng: &mut impl Rng, k: usize) -> (HeightMap, Vec<Item>, Option<Item>) {
    let bin = BinConfig::cube(10);
    let set = standard_set(&bin);
    loop {
        let steps = rng.gen_range(0..10);
        let map = random_map(rng, bin, &set, steps);
        let items: Vec<Item> = (0..=k).map(|_| *set.items.choose(rng).unwrap()).collect();
        if compute_mask(&map, &items[0], false).any() {
            let last = items[k];
            return (map, items[..k].to_vec(), Some(last));
        }
    }
}

#[test]
fn single_item_window_is_the_policy() {
    let bin = BinConfig::cube(10);
    let set = standard_set(&bin);
    let mut rng = seeded(31);
    for _ in 0..20 {
        let (map, window, last) = random_case(&mut rng, 1);
        let mut policy = BoundaryRule::new(set.clone());
        let mask = compute_mask(&map, &window[0], false);
        let direct = policy.decide(&Observation::new(&map, &window), &mask).unwrap().action;
        let m = mcts_search(&map, &window, last.as_ref(), false, &mut policy, &Estimator::FreeVolume, &budget(50, 1)).unwrap();
        let b = brute_force_search(&map, &window, last.as_ref(), false, &mut policy, &Estimator::FreeVolume).unwrap();
        assert_eq!(m.action, direct);
        assert_eq!(b.action, direct);
    }
}

#[test]
fn fixed_seed_gives_fixed_action() {
    let bin = BinConfig::cube(10);
    let set = standard_set(&bin);
    let mut rng = seeded(32);
    for _ in 0..10 {
        let (map, window, last) = random_case(&mut rng, 5);
        let run = || {
            let mut policy = BoundaryRule::new(set.clone());
            mcts_search(&map, &window, last.as_ref(), false, &mut policy, &Estimator::FreeVolume, &budget(100, 9)).unwrap()
        };
        assert_eq!(run(), run());
    }
}

#[test]
fn root_value_is_monotone_and_bounded_by_exhaustive_search() {
    let mut rng = seeded(33);
    for case in 0..40 {
        let k = rng.gen_range(2..=5);
        let (map, window, last) = random_case(&mut rng, k);
        let est = Estimator::FreeVolume;
        let m = mcts_search(&map, &window, last.as_ref(), false, &mut DeepestBottomLeft, &est, &budget(60, case)).unwrap();
        let b = brute_force_search(&map, &window, last.as_ref(), false, &mut DeepestBottomLeft, &est).unwrap();
        assert!(m.root_history.windows(2).all(|w| w[0] <= w[1]));
        assert!(m.root_value.unwrap() <= b.value, "case {case}");
        assert_eq!(m.order_violations, 0);
        assert_eq!(b.order_violations, 0);
    }
}

#[test]
fn saturated_search_finds_the_exhaustive_optimum() {
    // with more simulations than orders, the tree holds every path
    let mut rng = seeded(34);
    for case in 0..20 {
        let (map, window, last) = random_case(&mut rng, 3);
        let est = Estimator::FreeVolume;
        let m = mcts_search(&map, &window, last.as_ref(), false, &mut DeepestBottomLeft, &est, &budget(200, case)).unwrap();
        let b = brute_force_search(&map, &window, last.as_ref(), false, &mut DeepestBottomLeft, &est).unwrap();
        assert_eq!(m.root_value, Some(b.value));
    }
}

#[test]
fn order_constraint_holds_in_many_searches() {
    let mut rng = seeded(35);
    let mut total = 0;
    for case in 0..1000 {
        let k = rng.gen_range(2..=6);
        let (map, window, last) = random_case(&mut rng, k);
        let m = mcts_search(&map, &window, last.as_ref(), true, &mut DeepestBottomLeft, &Estimator::Zero, &budget(30, case))
            .unwrap();
        assert_eq!(m.order_violations, 0);
        total += m.policy_calls;
    }
    assert!(total > 1000);
}

#[test]
fn dominating_order_is_chosen() {
    // 3x1x2 bin, left column already 1 high. Placing the cube first puts it
    // in the middle and leaves no room for the 2x1x2 block; placing the block
    // first on the right pushes the cube onto the left column.
    let bin = BinConfig::new(3, 1, 2).unwrap();
    let mut map = HeightMap::new(bin);
    map.set(0, 0, 1);
    let cube = Item::new(1, 1, 1).unwrap();
    let block = Item::new(2, 1, 2).unwrap();
    let window = [cube, block];

    // the policy alone takes the lowest spot
    let alone = DeepestBottomLeft
        .decide(&Observation::new(&map, &window), &compute_mask(&map, &cube, false))
        .unwrap()
        .action;
    assert_eq!(alone, Action::new(1, 0, Orientation::Identity));

    let b = brute_force_search(&map, &window, None, false, &mut DeepestBottomLeft, &Estimator::Zero).unwrap();
    assert_eq!(b.order, vec![1, 0]);
    assert_eq!(b.value, Value::new(50, 6));
    assert_eq!(b.action, Action::new(0, 0, Orientation::Identity));

    let m = mcts_search(&map, &window, None, false, &mut DeepestBottomLeft, &Estimator::Zero, &budget(20, 0)).unwrap();
    assert_eq!(m.action, b.action);
    assert_eq!(m.root_value, Some(b.value));
}

#[test]
fn best_path_replays_through_episode_steps() {
    let mut rng = seeded(36);
    let bin = BinConfig::cube(10);
    let set = standard_set(&bin);
    let est = Estimator::FreeVolume;
    let mut replayed = 0;
    for _ in 0..30 {
        // start from an empty bin so the window can be replayed as an episode
        let items: Vec<Item> = (0..5).map(|_| *set.items.choose(&mut rng).unwrap()).collect();
        let (window, last) = (&items[..4], items[4]);
        let map = HeightMap::new(bin);
        let mut policy = BoundaryRule::new(set.clone());
        let b = brute_force_search(&map, window, Some(&last), false, &mut policy, &est).unwrap();

        // value of the path placed in search order
        let mut value = Value::from_integer(0);
        let mut virtual_map = map.clone();
        for vp in &b.placements {
            let z = virtual_map.apply(&vp.packed.item, vp.packed.orientation, vp.packed.x, vp.packed.y).unwrap();
            assert_eq!(z, vp.packed.z);
            value += reward(&vp.packed.item, &bin);
        }
        if b.placements.len() == window.len() {
            value += est.value(&virtual_map, Some(&last));
            // the same placements in arrival order are legal and land identically
            let mut state = EpisodeState::new(EpisodeConfig::new(bin).with_lookahead(4), items.clone());
            for i in 0..window.len() {
                let vp = b.placements.iter().find(|vp| vp.index == i).unwrap();
                let out = state.step(vp.packed.action(), RewardMode::StepWise).unwrap();
                assert_eq!(out.state.packed().last().unwrap().z, vp.packed.z);
                state = out.state;
            }
            assert_eq!(state.height_map(), &virtual_map);
            replayed += 1;
        }
        assert_eq!(value, b.path_value);
        assert!(b.path_value <= b.value);
    }
    assert!(replayed > 10);
}

#[test]
fn search_errors() {
    let bin = BinConfig::cube(4);
    let map = HeightMap::from_grid(bin, vec![4; 16]).unwrap();
    let item = Item::new(2, 2, 2).unwrap();
    let est = Estimator::Zero;
    assert!(matches!(
        mcts_search(&map, &[item], None, false, &mut DeepestBottomLeft, &est, &budget(5, 0)),
        Err(SearchError::NoFeasibleAction)
    ));
    assert!(matches!(
        brute_force_search(&map, &[], None, false, &mut DeepestBottomLeft, &est),
        Err(SearchError::EmptyWindow)
    ));
    let many = vec![item; BRUTE_FORCE_LIMIT + 1];
    assert!(matches!(
        brute_force_search(&HeightMap::new(bin), &many, None, false, &mut DeepestBottomLeft, &est),
        Err(SearchError::TooManyItems { .. })
    ));
}
