use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{EpisodeLog, HarnessError};
use crate::sim::Scenario;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the scenario's JSON form. Field order is fixed by the
/// struct definitions, so equal scenarios always hash equally.
pub fn scenario_digest(scenario: &Scenario) -> String {
    let bytes = serde_json::to_vec(scenario).expect("scenario serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Read and validate a scenario configuration file.
pub fn load_scenario(path: &Path) -> Result<Scenario, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let s: Scenario = serde_json::from_str(&text)?;
    s.validate()?;
    Ok(s)
}

/// Per-step CSV with `#` header lines carrying the provenance.
pub fn write_csv<W: Write>(log: &EpisodeLog, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# scenario={}", log.header.scenario_name)?;
    writeln!(out, "# seed={}", log.header.seed)?;
    writeln!(out, "# digest={}", log.header.digest)?;
    writeln!(out, "# version={}", log.header.code_version)?;
    writeln!(
        out,
        "step,ospa2_total,ospa2_loc,ospa2_card,entropy,n_hypotheses,agent_x,agent_y"
    )?;
    for r in &log.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.step,
            r.ospa2.total,
            r.ospa2.localization,
            r.ospa2.cardinality,
            r.entropy,
            r.n_hypotheses,
            r.agent[0],
            r.agent[1]
        )?;
    }
    Ok(())
}
