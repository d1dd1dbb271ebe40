//! Shared fixtures for the benchmarks.

use searchtrack_core::prior::initialize_belief;
use searchtrack_core::rfs::GlmbDensity;
use searchtrack_core::sim::{desk_scenario, Scenario};
use searchtrack_core::Position;

/// Desk scenario and its initial belief.
pub fn desk_fixture() -> (Scenario, GlmbDensity) {
    let scenario = desk_scenario(0);
    let caps = &scenario.filter_caps;
    let belief = initialize_belief(&scenario.prior(), caps.particles, caps.max_hypotheses, 7)
        .expect("desk prior is valid");
    (scenario, belief)
}

/// Points on a jittered grid, deterministic in `n` and `salt`.
pub fn point_set(n: usize, salt: u32) -> Vec<Position> {
    (0..n)
        .map(|i| {
            let h = (i as u32).wrapping_mul(2_654_435_761).wrapping_add(salt.wrapping_mul(40_503));
            let jitter = (h % 1000) as f64 / 100.0;
            Position::new((i % 8) as f64 * 30.0 + jitter, (i / 8) as f64 * 30.0 - jitter)
        })
        .collect()
}
