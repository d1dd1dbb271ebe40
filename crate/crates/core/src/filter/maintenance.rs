use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::Matrix4;
use rand::Rng;

use super::subsets::k_best_subsets;
use crate::linalg::regularize4;
use crate::rfs::{GaussianMixture, GlmbDensity, Hypothesis, Label, ParticleCloud, TrackState};
use crate::{Position, State};

/// Replace every particle track whose position-covariance trace is below
/// `trace_threshold` (m²) by its moment-matched Gaussian.
pub fn promote_tracks(density: &GlmbDensity, trace_threshold: f64) -> GlmbDensity {
    let mut out = density.clone();
    let mut cache: HashMap<*const TrackState, Option<Arc<TrackState>>> = HashMap::new();
    for state in out.tracks.values_mut() {
        let promoted = cache
            .entry(Arc::as_ptr(state))
            .or_insert_with(|| match &**state {
                TrackState::Particles(cloud) if cloud.position_covariance().trace() < trace_threshold => {
                    let c = state.moment_matched();
                    Some(Arc::new(TrackState::Gaussian(GaussianMixture {
                        components: vec![c],
                    })))
                }
                _ => None,
            })
            .clone();
        if let Some(p) = promoted {
            *state = p;
        }
    }
    out
}

/// Systematic resampling to `target_count` equal-weight particles when the
/// effective sample size falls below `target_count / 2`; otherwise the cloud
/// is returned unchanged.
pub fn resample_cloud<R: Rng + ?Sized>(
    cloud: &ParticleCloud,
    target_count: usize,
    rng: &mut R,
) -> ParticleCloud {
    let target = target_count.max(1);
    if cloud.effective_sample_size() >= target as f64 / 2.0 {
        return cloud.clone();
    }
    let u0: f64 = rng.random::<f64>() / target as f64;
    let weights = cloud.weights();
    let states = cloud.states();
    let mut out = Vec::with_capacity(target);
    let mut cum = weights[0];
    let mut i = 0;
    for k in 0..target {
        let u = u0 + k as f64 / target as f64;
        while u > cum && i + 1 < weights.len() {
            i += 1;
            cum += weights[i];
        }
        out.push(states[i]);
    }
    ParticleCloud::uniform(out).expect("target >= 1")
}

/// Resample every particle track of the density (shared clouds once).
pub fn resample_density<R: Rng + ?Sized>(
    density: &GlmbDensity,
    target_count: usize,
    rng: &mut R,
) -> GlmbDensity {
    let mut out = density.clone();
    let mut cache: HashMap<*const TrackState, Arc<TrackState>> = HashMap::new();
    for state in out.tracks.values_mut() {
        let next = cache
            .entry(Arc::as_ptr(state))
            .or_insert_with(|| match &**state {
                TrackState::Particles(cloud)
                    if cloud.effective_sample_size() < target_count.max(1) as f64 / 2.0 =>
                {
                    Arc::new(TrackState::Particles(resample_cloud(cloud, target_count, rng)))
                }
                _ => state.clone(),
            })
            .clone();
        *state = next;
    }
    out
}

/// Birth-track shape.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BirthModel {
    /// Existence probability of each birth track.
    pub existence: f64,
    /// Position covariance is this multiple of the measurement noise.
    pub position_scale: f64,
    /// Velocity variance of a birth track.
    pub velocity_variance: f64,
}

/// Gaussian birth state centered on a measurement.
pub fn birth_state(z: &Position, noise: &nalgebra::Matrix2<f64>, birth: &BirthModel) -> TrackState {
    let mut cov = Matrix4::zeros();
    cov.fixed_view_mut::<2, 2>(0, 0)
        .copy_from(&(noise * birth.position_scale));
    cov[(2, 2)] = birth.velocity_variance;
    cov[(3, 3)] = birth.velocity_variance;
    TrackState::gaussian(State::new(z.x, z.y, 0.0, 0.0), regularize4(&cov))
}

/// Add one Bernoulli birth track per unused measurement, labeled
/// `(step, 0..)`, and extend every hypothesis by the birth subsets.
/// Keeps the `max_hypotheses` heaviest results.
pub fn adaptive_birth(
    density: &GlmbDensity,
    unused: &[Position],
    noise: &nalgebra::Matrix2<f64>,
    birth: &BirthModel,
    step: u32,
    max_hypotheses: usize,
) -> GlmbDensity {
    if unused.is_empty() || birth.existence <= 0.0 {
        return density.clone();
    }
    let cap = max_hypotheses.max(1);
    let labels: Vec<Label> = (0..unused.len() as u32).map(|i| Label::new(step, i)).collect();
    let states: Vec<Arc<TrackState>> = unused
        .iter()
        .map(|z| Arc::new(birth_state(z, noise, birth)))
        .collect();
    let subsets = k_best_subsets(&vec![birth.existence; unused.len()], cap);

    let mut hyps: Vec<Hypothesis> = Vec::new();
    for h in &density.hypotheses {
        for s in &subsets {
            let born = labels
                .iter()
                .zip(&s.included)
                .filter(|(_, inc)| **inc)
                .map(|(l, _)| *l);
            hyps.push(Hypothesis::new(
                h.labels.iter().copied().chain(born),
                h.weight * s.probability,
                h.history,
            ));
        }
    }
    hyps.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    hyps.truncate(cap);
    let total: f64 = hyps.iter().map(|h| h.weight).sum();
    if total > 0.0 {
        for h in &mut hyps {
            h.weight /= total;
        }
    }

    let mut out = density.clone();
    for h in &hyps {
        for (l, st) in labels.iter().zip(&states) {
            if h.contains(l) {
                out.tracks
                    .entry(crate::rfs::TrackKey::new(*l, h.history))
                    .or_insert_with(|| st.clone());
            }
        }
    }
    out.hypotheses = hyps;
    out.prune_tracks();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rfs::HistoryId;
    use approx::assert_relative_eq;
    use nalgebra::Matrix2;
    use rand::SeedableRng;

    fn birth(p: f64) -> BirthModel {
        BirthModel {
            existence: p,
            position_scale: 4.0,
            velocity_variance: 1.0,
        }
    }

    #[test]
    fn promotion_matches_moments() {
        let cloud = ParticleCloud::uniform(vec![
            State::new(0.0, 0.0, 0.0, 0.0),
            State::new(2.0, 0.0, 0.0, 0.0),
        ])
        .unwrap();
        let mut d = GlmbDensity::new();
        let l = Label::new(0, 0);
        d.insert_track(l, HistoryId(0), TrackState::Particles(cloud.clone()));
        d.hypotheses.push(Hypothesis::new([l], 1.0, HistoryId(0)));
        let p = promote_tracks(&d, 25.0);
        let st = p.track(l, HistoryId(0)).unwrap();
        assert!(!st.is_particles());
        assert_relative_eq!(st.mean(), cloud.mean(), epsilon = 1e-12);
        let c = st.covariance();
        assert_relative_eq!(c[(0, 0)], 1.0, epsilon = 1e-6);
        assert_relative_eq!(c[(1, 1)], 0.0, epsilon = 1e-6);
        assert!(c.cholesky().is_some());
        // a wide cloud stays a cloud
        assert!(promote_tracks(&d, 0.5).track(l, HistoryId(0)).unwrap().is_particles());
    }

    #[test]
    fn resampling_rules() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let states: Vec<State> = (0..10).map(|i| State::new(i as f64, 0.0, 0.0, 0.0)).collect();
        let uniform = ParticleCloud::uniform(states.clone()).unwrap();
        assert_eq!(resample_cloud(&uniform, 10, &mut rng), uniform);

        let mut w = vec![0.0; 10];
        w[3] = 1.0;
        let degenerate = ParticleCloud::new(states.clone(), w).unwrap();
        assert_eq!(degenerate.effective_sample_size(), 1.0);
        let r = resample_cloud(&degenerate, 10, &mut rng);
        assert!(r.states().iter().all(|s| s[0] == 3.0));

        let mut w = vec![0.0; 10];
        w[0] = 0.5;
        w[1] = 0.5;
        let two = ParticleCloud::new(states, w).unwrap();
        assert_eq!(two.effective_sample_size(), 2.0);
    }

    #[test]
    fn birth_bernoulli_products() {
        let d = GlmbDensity::empty();
        let noise = Matrix2::identity() * 4.0;
        assert_eq!(adaptive_birth(&d, &[Position::zeros()], &noise, &birth(0.0), 3, 100), d);

        let one = adaptive_birth(&d, &[Position::zeros()], &noise, &birth(0.1), 3, 100);
        let w: Vec<f64> = one.hypotheses.iter().map(|h| h.weight).collect();
        assert_relative_eq!(w[0], 0.9, epsilon = 1e-12);
        assert_relative_eq!(w[1], 0.1, epsilon = 1e-12);

        let two = adaptive_birth(
            &d,
            &[Position::zeros(), Position::new(5.0, 5.0)],
            &noise,
            &birth(0.1),
            3,
            100,
        );
        let w: Vec<f64> = two.hypotheses.iter().map(|h| h.weight).collect();
        for (g, e) in w.iter().zip([0.81, 0.09, 0.09, 0.01]) {
            assert_relative_eq!(*g, e, epsilon = 1e-12);
        }
        assert!(two.validate().is_ok());
        let st = two.track(Label::new(3, 1), HistoryId(0)).unwrap();
        assert_relative_eq!(st.position_covariance()[(0, 0)], 16.0, epsilon = 1e-9);
    }
}
