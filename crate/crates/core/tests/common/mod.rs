#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmop::graph::{generate_scenario, GenParams, Layout};
use rmop::{RewardKind, Scenario};

/// Tiny random instance: 4 to 6 vertices in a 10 x 10 square, 2 or 3 robots,
/// `1 <= α < N`, a small budget, and modular or coverage rewards.
/// Every third seed puts all robots on the same start.
pub fn tiny_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_vertices = rng.gen_range(4..=6);
    let n_robots = rng.gen_range(2..=3);
    let alpha = rng.gen_range(1..n_robots);
    let budget = (rng.gen_range(3.0..12.0_f64) * 4.0).round() / 4.0;
    let mut params = GenParams::new(n_vertices, n_robots, alpha, budget, seed);
    params.layout = Layout::UniformRandom;
    params.area = (10.0, 10.0);
    params.sensing_radius = 4.0;
    params.importance.bumps = 2;
    params.reward_kind = if seed.is_multiple_of(2) {
        RewardKind::Modular
    } else {
        RewardKind::Coverage
    };
    let scenario = generate_scenario(&params).expect("valid generator parameters");
    if seed.is_multiple_of(3) {
        let start = scenario.starts()[0];
        scenario
            .with_starts(vec![start; n_robots])
            .expect("shared start is valid")
    } else {
        scenario
    }
}

/// Mid-sized instance for attack and planner checks: 12 to 30 vertices,
/// 4 to 8 robots.
pub fn medium_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n_vertices = rng.gen_range(12..=30);
    let n_robots = rng.gen_range(4..=8);
    let alpha = rng.gen_range(1..n_robots);
    let budget = rng.gen_range(15.0..40.0);
    let mut params = GenParams::new(n_vertices, n_robots, alpha, budget, seed);
    params.layout = if seed.is_multiple_of(2) {
        Layout::Grid
    } else {
        Layout::UniformRandom
    };
    params.area = (50.0, 40.0);
    params.sensing_radius = 8.0;
    params.reward_kind = if seed.is_multiple_of(3) {
        RewardKind::Coverage
    } else {
        RewardKind::Modular
    };
    generate_scenario(&params).expect("valid generator parameters")
}
