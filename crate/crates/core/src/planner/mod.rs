//! Unified-objective planning: LMB differential entropy, ideal-measurement
//! rollouts over a fixed action set, and the baseline policies used for
//! comparison.

mod actions;
mod entropy;
mod policies;
mod rollout;

pub use actions::{enumerate_actions, ActionPlan};
pub use entropy::{glmb_entropy, lmb_entropy, track_inner_product, EntropyConvention};
pub use policies::{LawnmowerRoute, Policy};
pub use rollout::{evaluate_action, evaluate_actions, pims, plan, ActionValue, PlanContext};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    /// Look-ahead horizon, steps.
    pub horizon: usize,
    /// Steps between rollout evaluations and between replans.
    pub sampling_interval: usize,
    /// Hyper-volume unit `K` of the entropy.
    pub hypervolume_unit: f64,
    /// Number of outbound straight-line actions (plus one stay action).
    pub action_count: usize,
    /// Agent speed, meters per step.
    pub step_length: f64,
    pub entropy_sign_convention: EntropyConvention,
    /// Estimated tracks with a higher detection probability produce an ideal
    /// measurement in rollouts.
    pub pims_detection_threshold: f64,
    pub policy: Policy,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            horizon: 40,
            sampling_interval: 10,
            hypervolume_unit: 1.0,
            action_count: 12,
            step_length: 10.0,
            entropy_sign_convention: EntropyConvention::PositiveLogDet,
            pims_detection_threshold: 0.5,
            policy: Policy::Unisat,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.sampling_interval == 0 || self.horizon == 0 {
            return Err("horizon and sampling_interval must be positive".into());
        }
        if self.horizon % self.sampling_interval != 0 {
            return Err("horizon must be a multiple of sampling_interval".into());
        }
        if !(self.hypervolume_unit > 0.0) {
            return Err("hypervolume_unit must be positive".into());
        }
        if !(self.step_length >= 0.0) {
            return Err("step_length must be nonnegative".into());
        }
        if self.action_count == 0 {
            return Err("action_count must be positive".into());
        }
        Ok(())
    }

    pub fn epochs(&self) -> usize {
        self.horizon / self.sampling_interval
    }
}
