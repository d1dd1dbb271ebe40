use std::collections::BTreeMap;
use std::sync::Arc;

use super::{GaussianComponent, GaussianMixture, GlmbDensity, HistoryId, Hypothesis, Label};
use super::{ParticleCloud, TrackState};

/// One labeled Bernoulli component.
#[derive(Clone, Debug, PartialEq)]
pub struct LmbTrack {
    pub existence: f64,
    pub state: TrackState,
}

/// Labeled multi-Bernoulli density: independent labeled Bernoulli tracks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LmbDensity {
    pub tracks: BTreeMap<Label, LmbTrack>,
}

impl LmbDensity {
    pub fn expected_cardinality(&self) -> f64 {
        self.tracks.values().map(|t| t.existence).sum()
    }

    /// Enumerate the LMB as a GLMB: one hypothesis per subset of labels with
    /// weight `Π_{l∈I} r_l Π_{l∉I} (1-r_l)`, all under a single history.
    /// Exponential in the number of tracks.
    pub fn to_glmb(&self) -> GlmbDensity {
        let mut out = GlmbDensity::new();
        let history = HistoryId(0);
        let labels: Vec<Label> = self.tracks.keys().copied().collect();
        for (label, t) in &self.tracks {
            out.insert_track(*label, history, t.state.clone());
        }
        let n = labels.len();
        for mask in 0u64..(1u64 << n) {
            let mut w = 1.0;
            let mut members = Vec::new();
            for (i, l) in labels.iter().enumerate() {
                let r = self.tracks[l].existence;
                if mask & (1 << i) != 0 {
                    w *= r;
                    members.push(*l);
                } else {
                    w *= 1.0 - r;
                }
            }
            out.hypotheses.push(Hypothesis::new(members, w, history));
        }
        out
    }
}

/// Collapse a GLMB to the LMB with matching first moment.
///
/// Existence of a label is the total weight of hypotheses containing it; its
/// state is the existence-normalized mixture of its per-history states.
/// Particle clouds are concatenated with reweighting and Gaussian mixtures are
/// merged component-wise. If a label mixes both kinds, clouds are
/// moment-matched into Gaussian components.
pub fn glmb_to_lmb(density: &GlmbDensity) -> LmbDensity {
    // label -> [(state, summed weight)], distinct states in first-seen order
    let mut groups: BTreeMap<Label, Vec<(Arc<TrackState>, f64)>> = BTreeMap::new();
    for h in &density.hypotheses {
        for key in h.keys() {
            let Some(state) = density.tracks.get(&key) else {
                continue;
            };
            let entry = groups.entry(key.label).or_default();
            if let Some(slot) = entry
                .iter_mut()
                .find(|(s, _)| Arc::ptr_eq(s, state) || **s == **state)
            {
                slot.1 += h.weight;
            } else {
                entry.push((Arc::clone(state), h.weight));
            }
        }
    }

    let tracks = groups
        .into_iter()
        .map(|(label, parts)| {
            let existence: f64 = parts.iter().map(|(_, w)| w).sum();
            let state = mix_states(&parts, existence);
            (label, LmbTrack { existence, state })
        })
        .collect();
    LmbDensity { tracks }
}

fn mix_states(parts: &[(Arc<TrackState>, f64)], total: f64) -> TrackState {
    if parts.len() == 1 {
        return (*parts[0].0).clone();
    }
    let share = |w: f64| {
        if total > 0.0 {
            w / total
        } else {
            1.0 / parts.len() as f64
        }
    };
    if parts.iter().all(|(s, _)| s.is_particles()) {
        let mut states = Vec::new();
        let mut weights = Vec::new();
        for (s, w) in parts {
            let TrackState::Particles(cloud) = &**s else {
                unreachable!()
            };
            let a = share(*w);
            states.extend_from_slice(cloud.states());
            weights.extend(cloud.weights().iter().map(|v| v * a));
        }
        return TrackState::Particles(ParticleCloud::from_parts_unchecked(states, weights));
    }
    let mut components = Vec::new();
    for (s, w) in parts {
        let a = share(*w);
        match &**s {
            TrackState::Gaussian(g) => components.extend(g.components.iter().map(|c| {
                GaussianComponent {
                    weight: c.weight * a,
                    mean: c.mean,
                    cov: c.cov,
                }
            })),
            other => {
                let mut c = other.moment_matched();
                c.weight = a;
                components.push(c);
            }
        }
    }
    TrackState::Gaussian(GaussianMixture { components })
}
