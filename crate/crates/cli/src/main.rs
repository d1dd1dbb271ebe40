use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use thiserror::Error;

use searchtrack_core::harness::{load_scenario, write_csv, HarnessError};
use searchtrack_core::metrics::{ospa2_window, Frame, MetricConfig};
use searchtrack_core::sim::{generate_scenario, ScenarioKind, SimError};
use searchtrack_core::{run_episode, run_monte_carlo, Position};

#[derive(Parser)]
#[command(name = "searchtrack", version, about = "Unified search-and-track simulation lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named scenario as a configuration file.
    Generate {
        /// base_config, bimodal, high_variance, overestimate, underestimate, random or desk
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one episode; writes a CSV, or a JSON log when `--out` ends in `.json`.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo batch; writes `summary.json` and one CSV per episode into `--out`.
    Mc {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// OSPA² series between two trajectory files.
    Metrics {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        est: PathBuf,
        #[arg(long, default_value_t = 50.0)]
        cutoff: f64,
        #[arg(long, default_value_t = 1.0)]
        order: f64,
        #[arg(long, default_value_t = 10)]
        window: usize,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Harness(_) => "harness",
            CliError::Sim(_) => "scenario",
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "json",
            CliError::Usage(_) => "usage",
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// One row per step: `[[id, x, y], ...]` for the objects present.
#[derive(Deserialize)]
#[serde(transparent)]
struct Trajectory(Vec<Vec<(u64, f64, f64)>>);

fn read_trajectory(path: &Path) -> Result<Vec<Frame>, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let t: Trajectory = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(t.0
        .into_iter()
        .map(|frame| frame.into_iter().map(|(id, x, y)| (id, Position::new(x, y))).collect())
        .collect())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { kind, seed, out } => {
            let kind: ScenarioKind = kind.parse()?;
            write_json(&out, &generate_scenario(kind, seed))
        }
        Command::Run { config, seed, out } => {
            let scenario = load_scenario(&config)?;
            let log = run_episode(&scenario, seed)?;
            if out.extension().is_some_and(|e| e == "json") {
                write_json(&out, &log)
            } else {
                let f = fs::File::create(&out).map_err(io_err(&out))?;
                write_csv(&log, BufWriter::new(f)).map_err(io_err(&out))
            }
        }
        Command::Mc {
            config,
            runs,
            base_seed,
            jobs,
            out,
        } => {
            if runs == 0 {
                return Err(CliError::Usage("--runs must be at least 1".into()));
            }
            let scenario = load_scenario(&config)?;
            let (summary, logs) = run_monte_carlo(&scenario, runs, base_seed, jobs)?;
            fs::create_dir_all(&out).map_err(io_err(&out))?;
            for log in &logs {
                let path = out.join(format!("episode_{}.csv", log.header.seed));
                let f = fs::File::create(&path).map_err(io_err(&path))?;
                write_csv(log, BufWriter::new(f)).map_err(io_err(&path))?;
            }
            write_json(&out.join("summary.json"), &summary)
        }
        Command::Metrics {
            truth,
            est,
            cutoff,
            order,
            window,
        } => {
            let cfg = MetricConfig { cutoff, order, window };
            cfg.validate().map_err(CliError::Usage)?;
            let series = ospa2_window(&read_trajectory(&truth)?, &read_trajectory(&est)?, &cfg);
            println!("step,ospa2_total,ospa2_loc,ospa2_card");
            for (k, v) in series.iter().enumerate() {
                println!("{},{},{},{}", k + 1, v.total, v.localization, v.cardinality);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let obj = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{obj}");
            ExitCode::FAILURE
        }
    }
}
