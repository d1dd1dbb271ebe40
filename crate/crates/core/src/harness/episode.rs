use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{scenario_digest, HarnessError, CODE_VERSION};
use crate::filter::{
    adaptive_birth, predict, promote_tracks, prune_hypotheses, resample_density, truncate, update,
};
use crate::metrics::{ospa2_window, Frame, OspaValue};
use crate::planner::{enumerate_actions, glmb_entropy, plan, ActionPlan, LawnmowerRoute, PlanContext, Policy};
use crate::prior::initialize_belief;
use crate::rfs::{map_estimate, GlmbDensity, Label};
use crate::rng::{self, streams};
use crate::sim::{sense, spawn_truth, step_agent, step_targets, Scenario};
use crate::Position;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeHeader {
    pub scenario_name: String,
    pub digest: String,
    pub seed: u64,
    pub code_version: String,
    pub config: Scenario,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub agent: [f64; 2],
    pub truth: Vec<(u64, [f64; 2])>,
    pub estimates: Vec<(Label, [f64; 4])>,
    pub measurements: usize,
    pub ospa2: OspaValue,
    pub n_hypotheses: usize,
    pub entropy: f64,
    /// Expected cardinality before and after the prediction of this step.
    pub cardinality_prior: f64,
    pub cardinality_predicted: f64,
    /// Expected cardinality at the end of the step.
    pub cardinality: f64,
    /// Id of the action being executed.
    pub action: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub header: EpisodeHeader,
    pub records: Vec<StepRecord>,
}

impl EpisodeLog {
    pub fn final_ospa2(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.ospa2.total)
    }

    /// Time average of the OSPA² series.
    pub fn mean_ospa2(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| r.ospa2.total).sum::<f64>() / self.records.len() as f64
    }
}

fn label_id(l: &Label) -> u64 {
    ((l.birth_step as u64) << 32) | l.index as u64
}

struct Agent {
    route: Option<LawnmowerRoute>,
    plan: ActionPlan,
    /// Pose when `plan` was chosen and the number of its waypoints flown.
    origin: Position,
    offset: usize,
}

fn choose_action(
    scenario: &Scenario,
    belief: &GlmbDensity,
    pose: &Position,
    agent: &mut Agent,
    seed: u64,
    step: usize,
    policy_rng: &mut rng::StreamRng,
) -> ActionPlan {
    let cfg = &scenario.planner;
    match cfg.policy {
        Policy::Unisat => {
            let ctx = PlanContext {
                sensor: &scenario.sensor,
                motion: &scenario.motion,
                caps: &scenario.filter_caps,
                config: cfg,
                workspace: &scenario.workspace,
                seed: rng::derive_seed(seed, step as u64, streams::PLANNER),
            };
            plan(belief, pose, &ctx).0
        }
        Policy::Random => {
            let actions = enumerate_actions(pose, cfg, &scenario.workspace);
            let i = policy_rng.random_range(0..actions.len());
            actions[i].clone()
        }
        Policy::Lawnmower => {
            let route = agent
                .route
                .get_or_insert_with(|| LawnmowerRoute::new(&scenario.workspace, 2.0 * scenario.sensor.inner_radius));
            route.plan(pose, cfg.horizon, cfg.step_length)
        }
    }
}

/// Run one episode. Every random draw comes from streams derived from `seed`,
/// so `(scenario, seed)` fixes the log exactly.
pub fn run_episode(scenario: &Scenario, seed: u64) -> Result<EpisodeLog, HarnessError> {
    scenario.validate()?;
    let caps = &scenario.filter_caps;
    let interval = scenario.planner.sampling_interval;

    let mut truth_rng = rng::stream(seed, streams::TRUTH);
    let mut sensor_rng = rng::stream(seed, streams::SENSOR);
    let mut filter_rng = rng::stream(seed, streams::FILTER);
    let mut policy_rng = rng::stream(seed, streams::PLANNER);

    let mut world = spawn_truth(scenario, &mut truth_rng);
    let mut belief = initialize_belief(
        &scenario.prior(),
        caps.particles,
        caps.max_hypotheses,
        rng::derive_seed(seed, 0, streams::INIT),
    )?;
    let mut agent = Agent {
        route: None,
        plan: ActionPlan::stay(world.agent, scenario.planner.horizon),
        origin: world.agent,
        offset: 0,
    };
    let noise = scenario.sensor.noise_matrix();
    let birth = caps.birth_model();

    let mut records = Vec::with_capacity(scenario.duration);
    let mut truth_frames: Vec<Frame> = Vec::with_capacity(scenario.duration);
    let mut est_frames: Vec<Frame> = Vec::with_capacity(scenario.duration);

    for k in 1..=scenario.duration {
        if (k - 1) % interval == 0 {
            if let Some(route) = agent.route.as_mut() {
                route.advance(&agent.origin, agent.offset, scenario.planner.step_length);
            }
            let pose = world.agent;
            agent.plan = choose_action(scenario, &belief, &pose, &mut agent, seed, k, &mut policy_rng);
            agent.origin = pose;
            agent.offset = 0;
        }
        world = step_agent(&world, &agent.plan, agent.offset)?;
        agent.offset += 1;
        world = step_targets(&world, &scenario.motion, &scenario.workspace, &mut truth_rng);
        let zs = sense(&world, &scenario.sensor, &mut sensor_rng);

        let cardinality_prior = belief.expected_cardinality();
        let predicted = predict(&belief, &scenario.motion, 1, caps.max_hypotheses, &mut filter_rng);
        let cardinality_predicted = predicted.expected_cardinality();
        let out = update(&predicted, &zs, &scenario.sensor, &world.agent, caps.update_caps())?;
        let unused: Vec<Position> = zs
            .iter()
            .zip(&out.association_probability)
            .filter(|(_, p)| **p < caps.birth_unused_threshold)
            .map(|(z, _)| *z)
            .collect();
        let mut next = prune_hypotheses(&out.density, caps.min_hypothesis_weight);
        next = truncate(&next, caps.max_hypotheses, caps.min_existence);
        next = resample_density(&next, caps.particles, &mut filter_rng);
        next = promote_tracks(&next, caps.promotion_trace);
        next = adaptive_birth(&next, &unused, &noise, &birth, k as u32, caps.max_hypotheses);
        belief = next;

        let estimates = map_estimate(&belief);
        truth_frames.push(
            world
                .targets
                .iter()
                .map(|t| (t.id, t.position()))
                .collect(),
        );
        est_frames.push(
            estimates
                .iter()
                .map(|e| (label_id(&e.label), Position::new(e.state[0], e.state[1])))
                .collect(),
        );
        records.push(StepRecord {
            step: k,
            agent: [world.agent.x, world.agent.y],
            truth: world
                .targets
                .iter()
                .map(|t| (t.id, [t.state[0], t.state[1]]))
                .collect(),
            estimates: estimates
                .iter()
                .map(|e| (e.label, [e.state[0], e.state[1], e.state[2], e.state[3]]))
                .collect(),
            measurements: zs.len(),
            ospa2: OspaValue::default(),
            n_hypotheses: belief.len(),
            entropy: glmb_entropy(
                &belief,
                scenario.planner.hypervolume_unit,
                scenario.planner.entropy_sign_convention,
            ),
            cardinality_prior,
            cardinality_predicted,
            cardinality: belief.expected_cardinality(),
            action: agent.plan.id,
        });
    }

    for (r, v) in records
        .iter_mut()
        .zip(ospa2_window(&truth_frames, &est_frames, &scenario.metric))
    {
        r.ospa2 = v;
    }

    Ok(EpisodeLog {
        header: EpisodeHeader {
            scenario_name: scenario.name.clone(),
            digest: scenario_digest(scenario),
            seed,
            code_version: CODE_VERSION.to_string(),
            config: scenario.clone(),
        },
        records,
    })
}
