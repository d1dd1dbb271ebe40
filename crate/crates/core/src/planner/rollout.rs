use rayon::prelude::*;

use super::actions::{enumerate_actions, ActionPlan};
use super::entropy::glmb_entropy;
use super::PlannerConfig;
use crate::filter::{predict, prune_hypotheses, truncate, update, FilterCaps, MotionModel, SensorModel};
use crate::geometry::Workspace;
use crate::rfs::{map_estimate, GlmbDensity};
use crate::rng;
use crate::Position;

/// Everything a rollout needs besides the belief and the action.
#[derive(Clone, Debug)]
pub struct PlanContext<'a> {
    pub sensor: &'a SensorModel,
    pub motion: &'a MotionModel,
    pub caps: &'a FilterCaps,
    pub config: &'a PlannerConfig,
    pub workspace: &'a Workspace,
    /// Seed of the rollout noise; shared by all actions of one decision.
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionValue {
    pub id: usize,
    /// `-Σ_j h(X_j | Z_j)`.
    pub value: f64,
    /// `Σ_j [h(X_j) - h(X_j | Z_j)]` with `X_j` the open-loop prediction.
    pub mutual_information: f64,
}

/// Predicted ideal measurement set: the noiseless position of every
/// estimated track whose detection probability exceeds `threshold`.
pub fn pims(density: &GlmbDensity, agent: &Position, sensor: &SensorModel, threshold: f64) -> Vec<Position> {
    map_estimate(density)
        .into_iter()
        .map(|e| Position::new(e.state[0], e.state[1]))
        .filter(|p| sensor.detection_probability(p, agent) > threshold)
        .collect()
}

fn epoch_rng(seed: u64, epoch: usize) -> rng::StreamRng {
    rng::indexed_stream(seed, epoch as u64, "rollout")
}

fn entropy(d: &GlmbDensity, ctx: &PlanContext<'_>) -> f64 {
    glmb_entropy(d, ctx.config.hypervolume_unit, ctx.config.entropy_sign_convention)
}

/// Clutter rate used for ideal measurements. The update needs a positive
/// clutter density; this one is small enough that every ideal measurement is
/// explained by a track.
const IDEAL_CLUTTER_RATE: f64 = 1e-9;

fn ideal_update(predicted: GlmbDensity, agent: &Position, ctx: &PlanContext<'_>) -> GlmbDensity {
    let zs = pims(&predicted, agent, ctx.sensor, ctx.config.pims_detection_threshold);
    let sensor = SensorModel {
        clutter_rate: IDEAL_CLUTTER_RATE,
        ..ctx.sensor.clone()
    };
    match update(&predicted, &zs, &sensor, agent, ctx.caps.update_caps()) {
        Ok(out) => truncate(
            &prune_hypotheses(&out.density, ctx.caps.min_hypothesis_weight),
            ctx.caps.max_hypotheses,
            ctx.caps.min_existence,
        ),
        Err(_) => predicted,
    }
}

/// Open-loop predictions `X_1..X_J` at every evaluation epoch.
fn open_loop(density: &GlmbDensity, ctx: &PlanContext<'_>) -> Vec<GlmbDensity> {
    let interval = ctx.config.sampling_interval as u32;
    let mut out = Vec::with_capacity(ctx.config.epochs());
    let mut d = density.clone();
    for j in 1..=ctx.config.epochs() {
        d = predict(&d, ctx.motion, interval, ctx.caps.max_hypotheses, &mut epoch_rng(ctx.seed, j));
        out.push(d.clone());
    }
    out
}

fn rollout(
    density: &GlmbDensity,
    first_prediction: &GlmbDensity,
    action: &ActionPlan,
    ctx: &PlanContext<'_>,
) -> Vec<f64> {
    let interval = ctx.config.sampling_interval;
    let mut entropies = Vec::with_capacity(ctx.config.epochs());
    let mut posterior = density.clone();
    for j in 1..=ctx.config.epochs() {
        let predicted = if j == 1 {
            first_prediction.clone()
        } else {
            predict(
                &posterior,
                ctx.motion,
                interval as u32,
                ctx.caps.max_hypotheses,
                &mut epoch_rng(ctx.seed, j),
            )
        };
        let idx = (j * interval - 1).min(action.waypoints.len().saturating_sub(1));
        let agent = action.waypoints.get(idx).copied().unwrap_or_default();
        posterior = ideal_update(predicted, &agent, ctx);
        entropies.push(entropy(&posterior, ctx));
    }
    entropies
}

/// Value `-Σ_j h(X_j | Z_j)` of one action; the belief is not modified.
pub fn evaluate_action(density: &GlmbDensity, action: &ActionPlan, ctx: &PlanContext<'_>) -> f64 {
    let first = predict(
        density,
        ctx.motion,
        ctx.config.sampling_interval as u32,
        ctx.caps.max_hypotheses,
        &mut epoch_rng(ctx.seed, 1),
    );
    -rollout(density, &first, action, ctx).iter().sum::<f64>()
}

/// Values of all actions (evaluated in parallel, reported in input order).
pub fn evaluate_actions(
    density: &GlmbDensity,
    actions: &[ActionPlan],
    ctx: &PlanContext<'_>,
) -> Vec<ActionValue> {
    let open = open_loop(density, ctx);
    let prior_entropy: f64 = open.iter().map(|d| entropy(d, ctx)).sum();
    let first = open.first().cloned().unwrap_or_else(|| density.clone());
    actions
        .par_iter()
        .map(|a| {
            let h: f64 = rollout(density, &first, a, ctx).iter().sum();
            ActionValue {
                id: a.id,
                value: -h,
                mutual_information: prior_entropy - h,
            }
        })
        .collect()
}

/// Pick the action with the largest value; ties go to the lowest id.
pub fn plan(density: &GlmbDensity, agent: &Position, ctx: &PlanContext<'_>) -> (ActionPlan, Vec<ActionValue>) {
    let actions = enumerate_actions(agent, ctx.config, ctx.workspace);
    let values = evaluate_actions(density, &actions, ctx);
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.value > values[best].value {
            best = i;
        }
    }
    (actions[best].clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rfs::{HistoryId, Hypothesis, Label, TrackState};
    use crate::State;
    use nalgebra::Matrix4;

    fn gm_density(tracks: &[(f64, f64)]) -> GlmbDensity {
        let mut d = GlmbDensity::new();
        let labels: Vec<Label> = (0..tracks.len() as u32).map(|i| Label::new(0, i)).collect();
        for (l, (x, y)) in labels.iter().zip(tracks) {
            d.insert_track(
                *l,
                HistoryId(0),
                TrackState::gaussian(State::new(*x, *y, 0.0, 0.0), Matrix4::identity() * 4.0),
            );
        }
        d.hypotheses.push(Hypothesis::new(labels, 1.0, HistoryId(0)));
        d
    }

    #[test]
    fn pims_gates_on_detection_probability() {
        let s = SensorModel::default();
        let agent = Position::zeros();
        assert!(pims(&GlmbDensity::empty(), &agent, &s, 0.5).is_empty());
        let one = gm_density(&[(10.0, 0.0)]);
        assert_eq!(pims(&one, &agent, &s, 0.5), vec![Position::new(10.0, 0.0)]);
        let two = gm_density(&[(10.0, 0.0), (500.0, 0.0)]);
        assert_eq!(pims(&two, &agent, &s, 0.5).len(), 1);
    }

    #[test]
    fn empty_belief_plans_stay() {
        let (s, m, c, p) = (
            SensorModel::default(),
            MotionModel::default(),
            FilterCaps::default(),
            PlannerConfig::default(),
        );
        let ws = Workspace::new(500.0, 500.0);
        let ctx = PlanContext {
            sensor: &s,
            motion: &m,
            caps: &c,
            config: &p,
            workspace: &ws,
            seed: 1,
        };
        let (action, values) = plan(&GlmbDensity::empty(), &ws.center(), &ctx);
        assert_eq!(action.id, 0);
        assert!(values.iter().all(|v| v.value == 0.0));
    }
}
