//! Ground truth: scenarios, target and agent kinematics, and the noisy
//! range-limited sensor.

mod scenario;
mod world;

pub use scenario::{desk_scenario, generate_scenario, Scenario, ScenarioKind};
pub use world::{sense, spawn_truth, step_agent, step_targets, Target, WorldState};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("action has no waypoint for step {0}")]
    WaypointExhausted(usize),
    #[error("unknown scenario kind `{0}`")]
    UnknownKind(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
