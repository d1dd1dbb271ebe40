use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Scenario, SimError};
use crate::filter::{MotionModel, SensorModel};
use crate::geometry::Workspace;
use crate::linalg::psd_factor2;
use crate::planner::ActionPlan;
use crate::{Position, State};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub id: u64,
    pub state: State,
}

impl Target {
    pub fn position(&self) -> Position {
        Position::new(self.state[0], self.state[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub targets: Vec<Target>,
    pub agent: Position,
    pub step: usize,
}

fn draw_count<R: Rng + ?Sized>(pmf: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (n, p) in pmf.iter().enumerate() {
        acc += p;
        if u < acc {
            return n;
        }
    }
    pmf.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

/// Draw the population from the truth prior and the agent start.
pub fn spawn_truth<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> WorldState {
    let ws = &scenario.workspace;
    let mut targets = Vec::new();
    for cluster in &scenario.truth_prior().clusters {
        let n = draw_count(&cluster.cardinality, rng);
        for _ in 0..n {
            let p = ws.reflect(&cluster.spatial.sample(rng));
            targets.push(Target {
                id: targets.len() as u64,
                state: State::new(p.x, p.y, 0.0, 0.0),
            });
        }
    }
    let agent = match scenario.agent_start {
        Some([x, y]) => Position::new(x, y),
        None => ws.sample_uniform(rng),
    };
    WorldState {
        targets,
        agent,
        step: 0,
    }
}

/// Advance every target one step under the random-walk model, reflecting at
/// the workspace boundary. The population is fixed.
pub fn step_targets<R: Rng + ?Sized>(
    world: &WorldState,
    motion: &MotionModel,
    workspace: &Workspace,
    rng: &mut R,
) -> WorldState {
    let f = motion.transition();
    let mut next = world.clone();
    for t in &mut next.targets {
        let mut s = f * t.state;
        s[0] += motion.position_noise_std * rng.sample::<f64, _>(StandardNormal);
        s[1] += motion.position_noise_std * rng.sample::<f64, _>(StandardNormal);
        s[2] += motion.velocity_noise_std * rng.sample::<f64, _>(StandardNormal);
        s[3] += motion.velocity_noise_std * rng.sample::<f64, _>(StandardNormal);
        let p = workspace.reflect(&Position::new(s[0], s[1]));
        s[0] = p.x;
        s[1] = p.y;
        t.state = s;
    }
    next.step = world.step + 1;
    next
}

/// Move the agent to waypoint `index` of `action`.
pub fn step_agent(world: &WorldState, action: &ActionPlan, index: usize) -> Result<WorldState, SimError> {
    let w = action
        .waypoints
        .get(index)
        .ok_or(SimError::WaypointExhausted(index))?;
    Ok(WorldState {
        agent: *w,
        ..world.clone()
    })
}

/// One scan: independent detections with Gaussian noise plus Poisson clutter
/// uniform over the field of view, in random order.
pub fn sense<R: Rng + ?Sized>(world: &WorldState, sensor: &SensorModel, rng: &mut R) -> Vec<Position> {
    let l = psd_factor2(&sensor.noise_matrix());
    let mut zs = Vec::new();
    for t in &world.targets {
        let p = t.position();
        let pd = sensor.detection_probability(&p, &world.agent);
        if rng.random::<f64>() < pd {
            let n = Position::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            zs.push(p + l * n);
        }
    }
    if sensor.clutter_rate > 0.0 {
        let count = Poisson::new(sensor.clutter_rate)
            .map(|d| d.sample(rng) as usize)
            .unwrap_or(0);
        for _ in 0..count {
            let r = sensor.outer_radius * rng.random::<f64>().sqrt();
            let a = rng.random::<f64>() * std::f64::consts::TAU;
            zs.push(world.agent + Position::new(r * a.cos(), r * a.sin()));
        }
    }
    zs.shuffle(rng);
    zs
}
