//! GLMB recursion: prediction, measurement update with negative
//! observations, truncation, resampling, promotion and adaptive birth.

mod maintenance;
mod models;
mod predict;
mod subsets;
mod truncate;
mod update;

pub use maintenance::{
    adaptive_birth, birth_state, promote_tracks, resample_cloud, resample_density, BirthModel,
};
pub use models::{MotionModel, SensorModel};
pub use predict::{predict, predict_state, survival_probability};
pub use subsets::{k_best_subsets, RankedSubset};
pub use truncate::{prune_hypotheses, truncate};
pub use update::{
    association_likelihood, update, Assignment, AssociationMap, UpdateCaps, UpdateChild,
    UpdateOutput,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rfs::RfsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("clutter intensity is zero at a measurement")]
    ZeroClutterDensity,
    #[error("no hypothesis admits a feasible association")]
    NoFeasibleAssociation,
    #[error("measurement noise covariance is singular")]
    SingularMeasurementNoise,
    #[error(transparent)]
    Rfs(#[from] RfsError),
}

/// Filter limits and track-management constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterCaps {
    /// Ranked association maps enumerated per hypothesis.
    pub k_best: usize,
    /// Global hypothesis cap.
    pub max_hypotheses: usize,
    /// Labels with lower marginal existence are removed.
    pub min_existence: f64,
    /// Hypotheses lighter than this fraction of the heaviest are removed.
    pub min_hypothesis_weight: f64,
    /// Particles per search-phase track.
    pub particles: usize,
    /// Position-covariance trace (m²) below which a cloud becomes Gaussian.
    pub promotion_trace: f64,
    /// Existence probability of a birth track.
    pub birth_existence: f64,
    /// Birth position covariance as a multiple of the measurement noise.
    pub birth_position_scale: f64,
    pub birth_velocity_variance: f64,
    /// Measurements whose association probability is below this spawn births.
    pub birth_unused_threshold: f64,
}

impl Default for FilterCaps {
    fn default() -> Self {
        Self {
            k_best: 50,
            max_hypotheses: 1000,
            min_existence: 1e-4,
            min_hypothesis_weight: 1e-6,
            particles: 1000,
            promotion_trace: 25.0,
            birth_existence: 0.05,
            birth_position_scale: 4.0,
            birth_velocity_variance: 1.0,
            birth_unused_threshold: 0.5,
        }
    }
}

impl FilterCaps {
    pub fn validate(&self) -> Result<(), String> {
        if self.k_best == 0 || self.max_hypotheses == 0 || self.particles == 0 {
            return Err("k_best, max_hypotheses and particles must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.birth_existence) || !(0.0..1.0).contains(&self.min_existence) {
            return Err("probabilities outside [0, 1]".into());
        }
        if !(0.0..1.0).contains(&self.min_hypothesis_weight) {
            return Err("min_hypothesis_weight outside [0, 1)".into());
        }
        if !(self.promotion_trace >= 0.0) || !(self.birth_position_scale > 0.0) {
            return Err("promotion_trace and birth_position_scale must be positive".into());
        }
        Ok(())
    }

    pub fn update_caps(&self) -> UpdateCaps {
        UpdateCaps {
            k_best: self.k_best,
            max_hypotheses: self.max_hypotheses,
        }
    }

    pub fn birth_model(&self) -> BirthModel {
        BirthModel {
            existence: self.birth_existence,
            position_scale: self.birth_position_scale,
            velocity_variance: self.birth_velocity_variance,
        }
    }
}
