use serde::{Deserialize, Serialize};

use super::SimError;
use crate::filter::{FilterCaps, MotionModel, SensorModel};
use crate::geometry::Workspace;
use crate::metrics::MetricConfig;
use crate::planner::PlannerConfig;
use crate::prior::{covariance_from_std, tilt_to_expected_count, Cluster, PopulationPrior, SpatialDensity};
use crate::rng;

use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    BaseConfig,
    Bimodal,
    HighVariance,
    Overestimate,
    Underestimate,
    Random,
    /// Small single-cluster workspace for quick planner checks.
    Desk,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::BaseConfig,
        ScenarioKind::Bimodal,
        ScenarioKind::HighVariance,
        ScenarioKind::Overestimate,
        ScenarioKind::Underestimate,
        ScenarioKind::Random,
        ScenarioKind::Desk,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::BaseConfig => "base_config",
            ScenarioKind::Bimodal => "bimodal",
            ScenarioKind::HighVariance => "high_variance",
            ScenarioKind::Overestimate => "overestimate",
            ScenarioKind::Underestimate => "underestimate",
            ScenarioKind::Random => "random",
            ScenarioKind::Desk => "desk",
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| SimError::UnknownKind(s.to_string()))
    }
}

/// A complete experiment description. This is also the configuration file
/// schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub workspace: Workspace,
    /// Episode length, steps.
    pub duration: usize,
    /// Prior clusters given to the filter.
    pub clusters: Vec<Cluster>,
    /// Clusters the truth is drawn from; the prior clusters when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_clusters: Option<Vec<Cluster>>,
    /// Fixed agent start; uniform over the workspace when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_start: Option<[f64; 2]>,
    #[serde(default)]
    pub sensor: SensorModel,
    #[serde(default)]
    pub motion: MotionModel,
    #[serde(default)]
    pub planner: PlannerConfig,
    #[serde(default)]
    pub filter_caps: FilterCaps,
    #[serde(default)]
    pub metric: MetricConfig,
    /// Seed the scenario was generated with (informational).
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn prior(&self) -> PopulationPrior {
        PopulationPrior {
            clusters: self.clusters.clone(),
        }
    }

    pub fn truth_prior(&self) -> PopulationPrior {
        PopulationPrior {
            clusters: self.truth_clusters.clone().unwrap_or_else(|| self.clusters.clone()),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |s: String| Err(SimError::InvalidScenario(s));
        if !self.workspace.is_valid() {
            return bad("workspace must have positive area".into());
        }
        if self.duration == 0 {
            return bad("duration must be at least 1".into());
        }
        for c in self.clusters.iter().chain(self.truth_clusters.iter().flatten()) {
            c.validate().map_err(|e| SimError::InvalidScenario(e.to_string()))?;
        }
        if let Some([x, y]) = self.agent_start {
            if !self.workspace.contains(&crate::Position::new(x, y)) {
                return bad("agent_start outside workspace".into());
            }
        }
        self.sensor.validate().map_err(SimError::InvalidScenario)?;
        self.motion.validate().map_err(SimError::InvalidScenario)?;
        self.planner.validate().map_err(SimError::InvalidScenario)?;
        self.filter_caps.validate().map_err(SimError::InvalidScenario)?;
        self.metric.validate().map_err(SimError::InvalidScenario)?;
        Ok(())
    }
}

const FULL_WIDTH: f64 = 1216.0;
const FULL_HEIGHT: f64 = 1230.0;
const FULL_DURATION: usize = 500;
const CLUSTER_CENTERS: [[f64; 2]; 5] = [
    [250.0, 300.0],
    [900.0, 250.0],
    [600.0, 650.0],
    [250.0, 950.0],
    [950.0, 1000.0],
];
const CLUSTER_STD: f64 = 50.0;

fn base_pmfs() -> Vec<Vec<f64>> {
    vec![
        vec![0.0, 0.2, 0.5, 0.3],
        vec![0.05, 0.55, 0.4],
        vec![0.2, 0.6, 0.2],
        vec![0.3, 0.6, 0.1],
        vec![0.45, 0.4, 0.15],
    ]
}

fn high_variance_pmfs() -> Vec<Vec<f64>> {
    vec![
        vec![0.2, 0.15, 0.2, 0.25, 0.2],
        vec![0.4, 0.2, 0.15, 0.15, 0.1],
        vec![0.5, 0.2, 0.15, 0.1, 0.05],
        vec![0.6, 0.2, 0.05, 0.1, 0.05],
        vec![0.6, 0.25, 0.05, 0.05, 0.05],
    ]
}

/// Same expected count per cluster as the base configuration, with all mass
/// on zero and on the base support's maximum.
fn bimodal_pmfs() -> Vec<Vec<f64>> {
    base_pmfs()
        .into_iter()
        .map(|p| {
            let n = p.len() - 1;
            let e = crate::prior::expected_count(&p);
            let mut out = vec![0.0; n + 1];
            out[n] = e / n as f64;
            out[0] = 1.0 - out[n];
            out
        })
        .collect()
}

fn gaussian_clusters(pmfs: Vec<Vec<f64>>) -> Vec<Cluster> {
    CLUSTER_CENTERS
        .iter()
        .zip(pmfs)
        .map(|(c, pmf)| Cluster {
            spatial: SpatialDensity::Gaussian {
                mean: *c,
                cov: covariance_from_std(CLUSTER_STD, CLUSTER_STD, 0.0),
            },
            cardinality: pmf,
        })
        .collect()
}

fn full_scale(kind: ScenarioKind, seed: u64, clusters: Vec<Cluster>, truth: Option<Vec<Cluster>>) -> Scenario {
    Scenario {
        name: kind.name().to_string(),
        workspace: Workspace::new(FULL_WIDTH, FULL_HEIGHT),
        duration: FULL_DURATION,
        clusters,
        truth_clusters: truth,
        agent_start: None,
        sensor: SensorModel::default(),
        motion: MotionModel::default(),
        planner: PlannerConfig::default(),
        filter_caps: FilterCaps::default(),
        metric: MetricConfig::default(),
        seed,
    }
}

fn random_clusters(workspace: &Workspace, seed: u64) -> Vec<Cluster> {
    let mut rng = rng::stream(seed, "scenario");
    let n = rng.random_range(1..=6);
    let buffer = 100.0;
    (0..n)
        .map(|_| {
            let mean = [
                rng.random_range(workspace.x_min + buffer..=workspace.x_max - buffer),
                rng.random_range(workspace.y_min + buffer..=workspace.y_max - buffer),
            ];
            let sx = rng.random_range(0.0..64.0f64).max(1.0);
            let sy = rng.random_range(0.0..64.0f64).max(1.0);
            let rho = rng.random_range(-1.0..1.0f64).clamp(-0.99, 0.99);
            let raw: Vec<f64> = (0..=3).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            Cluster {
                spatial: SpatialDensity::Gaussian {
                    mean,
                    cov: covariance_from_std(sx, sy, rho),
                },
                cardinality: raw.into_iter().map(|p| p / total).collect(),
            }
        })
        .collect()
}

/// Small workspace with one prior cluster in the middle, sized so a whole
/// episode runs in well under a second.
pub fn desk_scenario(seed: u64) -> Scenario {
    let workspace = Workspace::new(300.0, 300.0);
    Scenario {
        name: ScenarioKind::Desk.name().to_string(),
        workspace,
        duration: 120,
        clusters: vec![Cluster {
            spatial: SpatialDensity::Gaussian {
                mean: [150.0, 150.0],
                cov: covariance_from_std(10.0, 10.0, 0.0),
            },
            cardinality: vec![0.0, 0.5, 0.5],
        }],
        truth_clusters: None,
        agent_start: None,
        sensor: SensorModel {
            inner_radius: 25.0,
            outer_radius: 40.0,
            ..SensorModel::default()
        },
        motion: MotionModel::default(),
        planner: PlannerConfig {
            step_length: 5.0,
            ..PlannerConfig::default()
        },
        filter_caps: FilterCaps::default(),
        metric: MetricConfig::default(),
        seed,
    }
}

/// Build one of the named scenarios. Only `Random` depends on `seed`.
pub fn generate_scenario(kind: ScenarioKind, seed: u64) -> Scenario {
    match kind {
        ScenarioKind::BaseConfig => full_scale(kind, seed, gaussian_clusters(base_pmfs()), None),
        ScenarioKind::Bimodal => full_scale(kind, seed, gaussian_clusters(bimodal_pmfs()), None),
        ScenarioKind::HighVariance => {
            full_scale(kind, seed, gaussian_clusters(high_variance_pmfs()), None)
        }
        ScenarioKind::Overestimate | ScenarioKind::Underestimate => {
            let target = if kind == ScenarioKind::Overestimate { 8.63 } else { 3.60 };
            let tilted = tilt_to_expected_count(&high_variance_pmfs(), target)
                .expect("target lies inside the support range");
            full_scale(
                kind,
                seed,
                gaussian_clusters(tilted),
                Some(gaussian_clusters(high_variance_pmfs())),
            )
        }
        ScenarioKind::Random => {
            let ws = Workspace::new(FULL_WIDTH, FULL_HEIGHT);
            full_scale(kind, seed, random_clusters(&ws, seed), None)
        }
        ScenarioKind::Desk => desk_scenario(seed),
    }
}
