//! Unified search-and-track laboratory.
//!
//! A single labeled random-finite-set belief (a GLMB density) carries both the
//! objects that have already been found and the objects that a population-count
//! prior says are still out there. Particle-cloud tracks model the undiscovered
//! population; once a cloud collapses onto a detection it is promoted to a
//! Gaussian-mixture track. The planner scores candidate trajectories by the
//! differential entropy of the belief after predicted ideal measurements, so
//! search and tracking are traded off by one objective.
//!
//! Module map:
//!
//! * [`rfs`] labeled RFS densities (Bernoulli, LMB, GLMB) and estimators
//! * [`prior`] population-count prior to initial GLMB belief
//! * [`filter`] GLMB prediction, update with negative observations, truncation,
//!   resampling, promotion and adaptive birth
//! * [`planner`] LMB entropy, ideal-measurement rollouts and action selection
//! * [`sim`] scenarios, ground-truth kinematics and the noisy sensor
//! * [`metrics`] OSPA / OSPA² with optimal assignment
//! * [`harness`] configuration, the episode loop and Monte Carlo batches

pub mod assignment;
pub mod filter;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod planner;
pub mod prior;
pub mod rng;
pub mod rfs;
pub mod sim;

pub use filter::{FilterCaps, FilterError, MotionModel, SensorModel};
pub use geometry::Workspace;
pub use harness::{run_episode, run_monte_carlo, summarize, EpisodeLog, RunSummary};
pub use metrics::{ospa, ospa2_window, MetricConfig, OspaValue};
pub use planner::{ActionPlan, EntropyConvention, PlannerConfig};
pub use prior::{Cluster, PopulationPrior, SpatialDensity};
pub use rfs::{
    glmb_to_lmb, map_estimate, normalize_hypotheses, Estimate, GlmbDensity, HistoryId, Hypothesis,
    Label, LmbDensity, LmbTrack, TrackKey, TrackState,
};
pub use sim::{Scenario, ScenarioKind, WorldState};

/// Kinematic state `[px, py, vx, vy]` in meters and meters per step.
pub type State = nalgebra::Vector4<f64>;
/// Planar position in meters.
pub type Position = nalgebra::Vector2<f64>;
