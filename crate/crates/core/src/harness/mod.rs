//! Episode loop (observe, update, plan, act), seeded Monte Carlo batches,
//! statistics and output files.

mod batch;
mod episode;
mod output;

pub use batch::{run_monte_carlo, summarize, RunSummary};
pub use episode::{run_episode, EpisodeHeader, EpisodeLog, StepRecord};
pub use output::{load_scenario, scenario_digest, write_csv, CODE_VERSION};

use thiserror::Error;

use crate::filter::FilterError;
use crate::prior::PriorError;
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Prior(#[from] PriorError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
