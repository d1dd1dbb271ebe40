//! Labeled random finite set densities.

mod density;
mod lmb;
mod track;

pub use density::{
    map_estimate, map_hypothesis, normalize_hypotheses, Estimate, GlmbDensity, HistoryId,
    Hypothesis, Label, TrackKey,
};
pub use lmb::{glmb_to_lmb, LmbDensity, LmbTrack};
pub use track::{GaussianComponent, GaussianMixture, ParticleCloud, TrackState};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RfsError {
    #[error("all hypothesis weights are zero")]
    AllZeroWeights,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("particle cloud has no particles")]
    EmptyCloud,
    #[error("covariance is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("hypothesis repeats a label")]
    DuplicateLabel,
    #[error("no track state for label {0}")]
    MissingTrack(Label),
}
