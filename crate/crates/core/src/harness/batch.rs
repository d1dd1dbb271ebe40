use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_episode, scenario_digest, EpisodeLog, HarnessError};
use crate::sim::Scenario;

/// Mean and 95% margin of error `1.96 · s / √n` (0 for a single value).
pub fn summarize(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * var.sqrt() / (n as f64).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario_name: String,
    pub digest: String,
    pub base_seed: u64,
    /// Episodes that completed.
    pub runs: usize,
    /// Seeds of episodes that returned an error.
    pub failed_seeds: Vec<u64>,
    /// OSPA² at the last step, one value per completed episode.
    pub final_ospa2: Vec<f64>,
    pub mean_final_ospa2: f64,
    pub margin_final_ospa2: f64,
    /// Time-averaged OSPA², one value per completed episode.
    pub episode_mean_ospa2: Vec<f64>,
    pub mean_ospa2: f64,
    pub margin_ospa2: f64,
    pub per_step_mean: Vec<f64>,
    pub per_step_margin: Vec<f64>,
}

impl RunSummary {
    fn from_logs(scenario: &Scenario, base_seed: u64, logs: &[EpisodeLog], failed_seeds: Vec<u64>) -> Self {
        let final_ospa2: Vec<f64> = logs.iter().map(EpisodeLog::final_ospa2).collect();
        let episode_mean_ospa2: Vec<f64> = logs.iter().map(EpisodeLog::mean_ospa2).collect();
        let (mean_final_ospa2, margin_final_ospa2) = summarize(&final_ospa2);
        let (mean_ospa2, margin_ospa2) = summarize(&episode_mean_ospa2);
        let steps = logs.iter().map(|l| l.records.len()).max().unwrap_or(0);
        let (per_step_mean, per_step_margin) = (0..steps)
            .map(|k| {
                let v: Vec<f64> = logs
                    .iter()
                    .filter_map(|l| l.records.get(k).map(|r| r.ospa2.total))
                    .collect();
                summarize(&v)
            })
            .unzip();
        Self {
            scenario_name: scenario.name.clone(),
            digest: scenario_digest(scenario),
            base_seed,
            runs: logs.len(),
            failed_seeds,
            final_ospa2,
            mean_final_ospa2,
            margin_final_ospa2,
            episode_mean_ospa2,
            mean_ospa2,
            margin_ospa2,
            per_step_mean,
            per_step_margin,
        }
    }
}

/// Run episodes with seeds `base_seed + i` on `jobs` worker threads.
/// Results are gathered by episode index, so the summary does not depend on
/// `jobs`. Failed episodes are excluded and their seeds listed.
pub fn run_monte_carlo(
    scenario: &Scenario,
    n_runs: usize,
    base_seed: u64,
    jobs: usize,
) -> Result<(RunSummary, Vec<EpisodeLog>), HarnessError> {
    if n_runs == 0 {
        return Err(HarnessError::Config("n_runs must be at least 1".into()));
    }
    scenario.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let results: Vec<(u64, Result<EpisodeLog, HarnessError>)> = pool.install(|| {
        (0..n_runs as u64)
            .into_par_iter()
            .map(|i| {
                let seed = base_seed.wrapping_add(i);
                (seed, run_episode(scenario, seed))
            })
            .collect()
    });
    let mut logs = Vec::with_capacity(n_runs);
    let mut failed = Vec::new();
    for (seed, r) in results {
        match r {
            Ok(log) => logs.push(log),
            Err(_) => failed.push(seed),
        }
    }
    Ok((RunSummary::from_logs(scenario, base_seed, &logs, failed), logs))
}
