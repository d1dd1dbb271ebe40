//! Brute-force oracles shared by the integration and acceptance tests. They
//! re-derive everything from the model definitions and never call the
//! filter's own likelihood code.

#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use searchtrack_core::filter::{Assignment, SensorModel};
use searchtrack_core::rfs::{GlmbDensity, HistoryId, Hypothesis, Label, ParticleCloud, TrackState};
use searchtrack_core::{Position, State};

pub fn detection_probability(sensor: &SensorModel, x: f64, y: f64, agent: &Position) -> f64 {
    let d = ((x - agent.x).powi(2) + (y - agent.y).powi(2)).sqrt();
    if d <= sensor.inner_radius {
        sensor.detection_peak
    } else if d >= sensor.outer_radius {
        0.0
    } else {
        sensor.detection_peak * (1.0 - (d - sensor.inner_radius) / (sensor.outer_radius - sensor.inner_radius))
    }
}

pub fn gauss2(dx: f64, dy: f64, s: &Matrix2<f64>) -> f64 {
    let (a, b, c, d) = (s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]);
    let det = a * d - b * c;
    let q = (d * dx * dx - (b + c) * dx * dy + a * dy * dy) / det;
    (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
}

fn noise(sensor: &SensorModel) -> Matrix2<f64> {
    Matrix2::new(
        sensor.noise_cov[0][0],
        sensor.noise_cov[0][1],
        sensor.noise_cov[1][0],
        sensor.noise_cov[1][1],
    )
}

/// `ψ(miss)` and `ψ(z)` for one track, straight from the definitions.
pub fn track_likelihood(state: &TrackState, z: Option<&Position>, sensor: &SensorModel, agent: &Position) -> f64 {
    let kappa = sensor.clutter_rate / (std::f64::consts::PI * sensor.outer_radius.powi(2));
    let r = noise(sensor);
    match state {
        TrackState::Particles(cloud) => {
            let mut acc = 0.0;
            for (x, w) in cloud.states().iter().zip(cloud.weights()) {
                let pd = detection_probability(sensor, x[0], x[1], agent);
                acc += w * match z {
                    None => 1.0 - pd,
                    Some(z) => pd * gauss2(z.x - x[0], z.y - x[1], &r) / kappa,
                };
            }
            acc
        }
        TrackState::Gaussian(g) => {
            let mut acc = 0.0;
            for c in &g.components {
                let pd = detection_probability(sensor, c.mean[0], c.mean[1], agent);
                let s = Matrix2::new(c.cov[(0, 0)], c.cov[(0, 1)], c.cov[(1, 0)], c.cov[(1, 1)]) + r;
                acc += c.weight * match z {
                    None => 1.0 - pd,
                    Some(z) => pd * gauss2(z.x - c.mean[0], z.y - c.mean[1], &s) / kappa,
                };
            }
            acc
        }
    }
}

/// Every injective map from `n` tracks to `{miss} ∪ {0..m}`.
pub fn all_maps(n: usize, m: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for partial in &out {
            next.push([partial.clone(), vec![None]].concat());
            for j in 0..m {
                if !partial.contains(&Some(j)) {
                    next.push([partial.clone(), vec![Some(j)]].concat());
                }
            }
        }
        out = next;
    }
    out
}

/// One posterior term of the exhaustive update.
#[derive(Clone, Debug)]
pub struct OracleTerm {
    pub parent: usize,
    pub map: Vec<(Label, Option<usize>)>,
    pub weight: f64,
}

/// Exhaustive GLMB update: every hypothesis times every association map,
/// normalized in log space. Zero-weight terms are dropped.
pub fn brute_force_update(
    density: &GlmbDensity,
    zs: &[Position],
    sensor: &SensorModel,
    agent: &Position,
) -> Vec<OracleTerm> {
    let mut terms = Vec::new();
    for (hi, h) in density.hypotheses.iter().enumerate() {
        for map in all_maps(h.labels.len(), zs.len()) {
            let mut w = h.weight.ln();
            let mut pairs = Vec::new();
            for (l, a) in h.labels.iter().zip(&map) {
                let state = density.track(*l, h.history).expect("track present");
                w += track_likelihood(state, a.map(|j| &zs[j]), sensor, agent).ln();
                pairs.push((*l, *a));
            }
            if w > f64::NEG_INFINITY {
                terms.push(OracleTerm {
                    parent: hi,
                    map: pairs,
                    weight: w,
                });
            }
        }
    }
    let max = terms.iter().map(|t| t.weight).fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = terms.iter().map(|t| (t.weight - max).exp()).sum();
    for t in &mut terms {
        t.weight = (t.weight - max).exp() / total;
    }
    terms
}

/// Relative agreement to `tol`. Below the normal range an `f64` cannot hold
/// that many significant digits, so subnormal values compare absolutely.
pub fn weights_agree(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) || (a.abs().max(b.abs()) < f64::MIN_POSITIVE)
}

pub fn as_option(a: &Assignment) -> Option<usize> {
    match a {
        Assignment::Missed => None,
        Assignment::Detected(j) => Some(*j),
    }
}

fn random_state(rng: &mut ChaCha8Rng, agent: &Position, gaussian: bool) -> TrackState {
    let cx = agent.x + rng.random_range(-160.0..160.0);
    let cy = agent.y + rng.random_range(-160.0..160.0);
    if gaussian {
        let mut cov = Matrix4::identity();
        let sx: f64 = rng.random_range(1.0..30.0);
        let sy: f64 = rng.random_range(1.0..30.0);
        let rho: f64 = rng.random_range(-0.8..0.8);
        cov[(0, 0)] = sx * sx;
        cov[(1, 1)] = sy * sy;
        cov[(0, 1)] = rho * sx * sy;
        cov[(1, 0)] = rho * sx * sy;
        TrackState::gaussian(State::new(cx, cy, 0.0, 0.0), cov)
    } else {
        let n = rng.random_range(1..40);
        let states: Vec<State> = (0..n)
            .map(|_| {
                State::new(
                    cx + rng.random_range(-60.0..60.0),
                    cy + rng.random_range(-60.0..60.0),
                    0.0,
                    0.0,
                )
            })
            .collect();
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
        TrackState::Particles(ParticleCloud::from_unnormalized(states, weights).unwrap())
    }
}

/// Up to two labels, up to four hypotheses over their subsets, mixed
/// particle and Gaussian tracks scattered around the agent.
pub fn random_small_density(rng: &mut ChaCha8Rng, agent: &Position) -> GlmbDensity {
    let n_labels = rng.random_range(0..=2u32);
    let labels: Vec<Label> = (0..n_labels).map(|i| Label::new(0, i)).collect();
    let mut d = GlmbDensity::new();
    for l in &labels {
        let g = rng.random_bool(0.5);
        d.insert_track(*l, HistoryId(0), random_state(rng, agent, g));
    }
    let subsets: Vec<Vec<Label>> = (0..(1u32 << n_labels))
        .map(|mask| {
            labels
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, l)| *l)
                .collect()
        })
        .collect();
    let n_h = rng.random_range(1..=subsets.len().min(4));
    let mut chosen: Vec<usize> = (0..subsets.len()).collect();
    for i in (1..chosen.len()).rev() {
        let j = rng.random_range(0..=i);
        chosen.swap(i, j);
    }
    let raw: Vec<f64> = (0..n_h).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    for (k, w) in chosen.into_iter().take(n_h).zip(raw) {
        d.hypotheses.push(Hypothesis::new(subsets[k].clone(), w / total, HistoryId(0)));
    }
    d.prune_tracks();
    d
}

/// Measurements near the agent, some close to track means.
pub fn random_measurements(rng: &mut ChaCha8Rng, density: &GlmbDensity, agent: &Position) -> Vec<Position> {
    let m = rng.random_range(0..=2);
    let means: Vec<Position> = density.tracks.values().map(|s| s.position()).collect();
    (0..m)
        .map(|_| {
            if !means.is_empty() && rng.random_bool(0.6) {
                let p = means[rng.random_range(0..means.len())];
                p + Position::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))
            } else {
                agent + Position::new(rng.random_range(-140.0..140.0), rng.random_range(-140.0..140.0))
            }
        })
        .collect()
}

/// Optimal OSPA by enumerating every injection of the smaller set.
pub fn brute_force_ospa(x: &[Position], y: &[Position], c: f64, p: f64) -> f64 {
    let (small, large) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let n = large.len();
    if n == 0 {
        return 0.0;
    }
    fn best(small: &[Position], large: &[Position], used: &mut Vec<bool>, i: usize, c: f64, p: f64) -> f64 {
        if i == small.len() {
            return 0.0;
        }
        let mut b = f64::INFINITY;
        for j in 0..large.len() {
            if !used[j] {
                used[j] = true;
                let d = (small[i] - large[j]).norm().min(c).powf(p);
                b = b.min(d + best(small, large, used, i + 1, c, p));
                used[j] = false;
            }
        }
        b
    }
    let loc = best(small, large, &mut vec![false; n], 0, c, p);
    ((loc + c.powf(p) * (n - small.len()) as f64) / n as f64).powf(1.0 / p)
}
