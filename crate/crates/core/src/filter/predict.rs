use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::models::MotionModel;
use super::subsets::k_best_subsets;
use crate::linalg::{psd_factor4, regularize4};
use crate::rfs::{GaussianComponent, GaussianMixture, GlmbDensity, Hypothesis, ParticleCloud};
use crate::rfs::{Label, TrackState};
use crate::State;

/// Propagate one track state over `steps` steps.
pub fn predict_state<R: Rng + ?Sized>(
    state: &TrackState,
    motion: &MotionModel,
    steps: u32,
    rng: &mut R,
) -> TrackState {
    let f = motion.transition_steps(steps);
    let q = motion.process_noise_steps(steps);
    match state {
        TrackState::Particles(cloud) => {
            let l = psd_factor4(&q);
            let noisy = l.iter().any(|v| *v != 0.0);
            let states: Vec<State> = cloud
                .states()
                .iter()
                .map(|x| {
                    let mut y = f * x;
                    if noisy {
                        let n = State::new(
                            StandardNormal.sample(&mut *rng),
                            StandardNormal.sample(&mut *rng),
                            StandardNormal.sample(&mut *rng),
                            StandardNormal.sample(&mut *rng),
                        );
                        y += l * n;
                    }
                    y
                })
                .collect();
            TrackState::Particles(ParticleCloud::from_parts_unchecked(
                states,
                cloud.weights().to_vec(),
            ))
        }
        TrackState::Gaussian(g) => TrackState::Gaussian(GaussianMixture {
            components: g
                .components
                .iter()
                .map(|c| GaussianComponent {
                    weight: c.weight,
                    mean: f * c.mean,
                    cov: regularize4(&(f * c.cov * f.transpose() + q)),
                })
                .collect(),
        }),
    }
}

/// Survival probability of a track over `steps` steps.
pub fn survival_probability(state: &TrackState, motion: &MotionModel, steps: u32) -> f64 {
    let p = if state.is_particles() {
        motion.survival_search
    } else {
        motion.survival_tracked
    };
    p.powi(steps as i32)
}

/// GLMB prediction over `steps` steps.
///
/// Every distinct state is propagated once (shared states stay shared).
/// Hypotheses whose labels may die are split into their most probable
/// survivor subsets; duplicates are merged and the `max_hypotheses` heaviest
/// are kept. With all survival probabilities equal to one the hypotheses are
/// returned unchanged.
pub fn predict<R: Rng + ?Sized>(
    density: &GlmbDensity,
    motion: &MotionModel,
    steps: u32,
    max_hypotheses: usize,
    rng: &mut R,
) -> GlmbDensity {
    let mut out = density.clone();
    let mut cache: HashMap<*const TrackState, Arc<TrackState>> = HashMap::new();
    let mut survival: HashMap<(Label, crate::rfs::HistoryId), f64> = HashMap::new();
    for (key, state) in out.tracks.iter_mut() {
        survival.insert((key.label, key.history), survival_probability(state, motion, steps));
        let ptr = Arc::as_ptr(state);
        let next = cache
            .entry(ptr)
            .or_insert_with(|| Arc::new(predict_state(state, motion, steps, rng)))
            .clone();
        *state = next;
    }

    let all_survive = survival.values().all(|p| *p == 1.0);
    if all_survive {
        return out;
    }

    let cap = max_hypotheses.max(1);
    let mut children: Vec<Hypothesis> = Vec::new();
    let mut index: HashMap<(Vec<Label>, crate::rfs::HistoryId), usize> = HashMap::new();
    for h in &density.hypotheses {
        let probs: Vec<f64> = h
            .labels
            .iter()
            .map(|l| survival.get(&(*l, h.history)).copied().unwrap_or(1.0))
            .collect();
        for subset in k_best_subsets(&probs, cap) {
            let labels: Vec<Label> = h
                .labels
                .iter()
                .zip(&subset.included)
                .filter(|(_, inc)| **inc)
                .map(|(l, _)| *l)
                .collect();
            let w = h.weight * subset.probability;
            let key = (labels, h.history);
            match index.get(&key) {
                Some(&i) => children[i].weight += w,
                None => {
                    index.insert(key.clone(), children.len());
                    children.push(Hypothesis {
                        labels: key.0,
                        weight: w,
                        history: h.history,
                    });
                }
            }
        }
    }
    // stable: equal weights keep generation order
    children.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    children.truncate(cap);
    let total: f64 = children.iter().map(|h| h.weight).sum();
    if total > 0.0 {
        for h in &mut children {
            h.weight /= total;
        }
    }
    out.hypotheses = children;
    out.prune_tracks();
    out
}
