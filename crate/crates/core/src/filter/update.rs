use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix2x4, Matrix4, Vector2};
use serde::{Deserialize, Serialize};

use super::models::SensorModel;
use super::FilterError;
use crate::assignment::{murty, CostMatrix};
use crate::linalg::{regularize4, Gaussian2};
use crate::rfs::{GaussianComponent, GaussianMixture, GlmbDensity, HistoryId, Hypothesis};
use crate::rfs::{Label, ParticleCloud, TrackKey, TrackState};
use crate::Position;

/// Value of an association map at one existing label.
/// Labels outside the hypothesis are implicitly absent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Assignment {
    Missed,
    Detected(usize),
}

/// Association map restricted to the labels of one hypothesis, in label order.
pub type AssociationMap = Vec<(Label, Assignment)>;

/// Provenance of one posterior hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateChild {
    /// Index of the prior hypothesis.
    pub parent: usize,
    pub associations: AssociationMap,
}

#[derive(Clone, Debug)]
pub struct UpdateOutput {
    pub density: GlmbDensity,
    /// Aligned with `density.hypotheses`.
    pub children: Vec<UpdateChild>,
    /// Posterior probability that each measurement came from some track.
    pub association_probability: Vec<f64>,
}

/// Association limits of the update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpdateCaps {
    /// Ranked assignments per hypothesis.
    pub k_best: usize,
    /// Posterior hypotheses kept.
    pub max_hypotheses: usize,
}

/// Single-track association likelihood: `⟨p, P_D g(z|·)⟩ / κ(z)` for a
/// detection, `⟨p, 1 - P_D⟩` for a miss (`z = None`).
pub fn association_likelihood(
    state: &TrackState,
    z: Option<&Position>,
    sensor: &SensorModel,
    agent: &Position,
) -> Result<f64, FilterError> {
    let zs: Vec<Position> = z.into_iter().copied().collect();
    let kappa = clutter_terms(&zs, sensor, agent)?;
    let noise = measurement_noise(sensor)?;
    let lik = state_likelihoods(state, &zs, &kappa, sensor, agent, &noise);
    Ok(match z {
        Some(_) => lik.detect[0],
        None => lik.miss,
    })
}

fn clutter_terms(
    zs: &[Position],
    sensor: &SensorModel,
    agent: &Position,
) -> Result<Vec<f64>, FilterError> {
    zs.iter()
        .map(|z| {
            let k = sensor.clutter_intensity(z, agent);
            if k > 0.0 && k.is_finite() {
                Ok(k)
            } else {
                Err(FilterError::ZeroClutterDensity)
            }
        })
        .collect()
}

fn measurement_noise(sensor: &SensorModel) -> Result<Gaussian2, FilterError> {
    Gaussian2::new(&sensor.noise_matrix()).ok_or(FilterError::SingularMeasurementNoise)
}

struct Likelihoods {
    miss: f64,
    detect: Vec<f64>,
}

fn state_likelihoods(
    state: &TrackState,
    zs: &[Position],
    kappa: &[f64],
    sensor: &SensorModel,
    agent: &Position,
    noise: &Gaussian2,
) -> Likelihoods {
    let mut detect = vec![0.0; zs.len()];
    let miss = match state {
        TrackState::Particles(cloud) => {
            let mut seen = 0.0;
            for (x, w) in cloud.iter() {
                let pd = sensor.detection_probability(&Position::new(x[0], x[1]), agent);
                if pd > 0.0 {
                    seen += w * pd;
                    let wp = w * pd;
                    for (j, z) in zs.iter().enumerate() {
                        detect[j] += wp * noise.pdf(z.x - x[0], z.y - x[1]);
                    }
                }
            }
            1.0 - seen
        }
        TrackState::Gaussian(g) => {
            let r = sensor.noise_matrix();
            let mut seen = 0.0;
            for c in &g.components {
                let pos = Position::new(c.mean[0], c.mean[1]);
                let pd = sensor.detection_probability(&pos, agent);
                seen += c.weight * pd;
                if pd > 0.0 && !zs.is_empty() {
                    let s = c.cov.fixed_view::<2, 2>(0, 0).into_owned() + r;
                    if let Some(gs) = Gaussian2::new(&s) {
                        for (j, z) in zs.iter().enumerate() {
                            detect[j] += c.weight * pd * gs.pdf(z.x - pos.x, z.y - pos.y);
                        }
                    }
                }
            }
            1.0 - seen
        }
    };
    for (d, k) in detect.iter_mut().zip(kappa) {
        *d /= k;
    }
    Likelihoods {
        miss: miss.max(0.0),
        detect,
    }
}

/// Posterior single-track density for one assignment, or `None` when the
/// assignment leaves the density unchanged.
fn posterior_state(
    state: &TrackState,
    assignment: Assignment,
    zs: &[Position],
    sensor: &SensorModel,
    agent: &Position,
    noise: &Gaussian2,
) -> Option<TrackState> {
    match state {
        TrackState::Particles(cloud) => {
            let mut changed = false;
            let weights: Vec<f64> = cloud
                .iter()
                .map(|(x, w)| {
                    let pd = sensor.detection_probability(&Position::new(x[0], x[1]), agent);
                    match assignment {
                        Assignment::Missed => {
                            if pd > 0.0 {
                                changed = true;
                            }
                            w * (1.0 - pd)
                        }
                        Assignment::Detected(j) => {
                            changed = true;
                            w * pd * noise.pdf(zs[j].x - x[0], zs[j].y - x[1])
                        }
                    }
                })
                .collect();
            if !changed {
                return None;
            }
            ParticleCloud::from_unnormalized(cloud.states().to_vec(), weights)
                .ok()
                .map(TrackState::Particles)
        }
        TrackState::Gaussian(g) => {
            let r = sensor.noise_matrix();
            let mut comps = Vec::with_capacity(g.components.len());
            let mut changed = false;
            for c in &g.components {
                let pos = Position::new(c.mean[0], c.mean[1]);
                let pd = sensor.detection_probability(&pos, agent);
                match assignment {
                    Assignment::Missed => {
                        if pd > 0.0 {
                            changed = true;
                        }
                        comps.push(GaussianComponent {
                            weight: c.weight * (1.0 - pd),
                            mean: c.mean,
                            cov: c.cov,
                        });
                    }
                    Assignment::Detected(j) => {
                        changed = true;
                        if pd <= 0.0 {
                            continue;
                        }
                        if let Some((w, comp)) = kalman_update(c, &zs[j], &r) {
                            comps.push(GaussianComponent {
                                weight: c.weight * pd * w,
                                ..comp
                            });
                        }
                    }
                }
            }
            if !changed {
                return None;
            }
            let total: f64 = comps.iter().map(|c| c.weight).sum();
            if !(total > 0.0) || !total.is_finite() {
                return None;
            }
            comps.retain(|c| c.weight > 0.0);
            for c in &mut comps {
                c.weight /= total;
            }
            Some(TrackState::Gaussian(GaussianMixture { components: comps }))
        }
    }
}

/// Linear-Gaussian update of one component with a position measurement.
/// Returns the measurement likelihood and the updated component.
fn kalman_update(
    c: &GaussianComponent,
    z: &Position,
    r: &Matrix2<f64>,
) -> Option<(f64, GaussianComponent)> {
    let h = Matrix2x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
    let s = h * c.cov * h.transpose() + r;
    let s_inv = s.try_inverse()?;
    let innov: Vector2<f64> = z - h * c.mean;
    let lik = Gaussian2::new(&s)?.pdf(innov.x, innov.y);
    let k = c.cov * h.transpose() * s_inv;
    let i_kh = Matrix4::identity() - k * h;
    let cov = i_kh * c.cov * i_kh.transpose() + k * r * k.transpose();
    let cov = regularize4(&(0.5 * (cov + cov.transpose())));
    Some((
        lik,
        GaussianComponent {
            weight: 1.0,
            mean: c.mean + k * innov,
            cov,
        },
    ))
}

type Ranked = Arc<Vec<(Vec<Assignment>, f64)>>;

/// Ranked association maps for one set of track states (one per row).
fn rank_associations(rows: &[usize], liks: &[Likelihoods], m: usize, k_best: usize) -> Ranked {
    let mut fixed_loglik = 0.0;
    let mut active: Vec<usize> = Vec::new();
    let mut base = vec![Assignment::Missed; rows.len()];
    for (r, &s) in rows.iter().enumerate() {
        let lk = &liks[s];
        if lk.detect.iter().all(|d| *d <= 0.0) {
            if lk.miss <= 0.0 {
                return Arc::new(Vec::new());
            }
            fixed_loglik += lk.miss.ln();
        } else {
            active.push(r);
        }
    }
    if active.is_empty() {
        return Arc::new(vec![(base, fixed_loglik)]);
    }

    let n = active.len();
    let mut cost = CostMatrix::new(n, m + n, f64::INFINITY);
    for (a, &r) in active.iter().enumerate() {
        let lk = &liks[rows[r]];
        for j in 0..m {
            if lk.detect[j] > 0.0 {
                cost.set(a, j, -lk.detect[j].ln());
            }
        }
        if lk.miss > 0.0 {
            cost.set(a, m + a, -lk.miss.ln());
        }
        // shift the row so its best entry is zero; every assignment uses each
        // row once, so ranking is unaffected
        let row_min = (0..m + n)
            .map(|c| cost.get(a, c))
            .fold(f64::INFINITY, f64::min);
        if row_min.is_finite() {
            for c in 0..m + n {
                let v = cost.get(a, c);
                cost.set(a, c, v - row_min);
            }
        }
    }

    let ranked = murty(&cost, k_best)
        .into_iter()
        .map(|sol| {
            let mut assign = base.clone();
            let mut loglik = fixed_loglik;
            for (a, &c) in sol.columns.iter().enumerate() {
                let r = active[a];
                let lk = &liks[rows[r]];
                if c < m {
                    assign[r] = Assignment::Detected(c);
                    loglik += lk.detect[c].ln();
                } else {
                    assign[r] = Assignment::Missed;
                    loglik += lk.miss.ln();
                }
            }
            (assign, loglik)
        })
        .collect();
    base.clear();
    Arc::new(ranked)
}

/// GLMB measurement update with negative information.
///
/// For every hypothesis, association maps are enumerated in decreasing
/// likelihood with a ranked assignment over `-ln` likelihoods (columns are
/// the measurements and one private miss column per track). Tracks that
/// cannot have produced any measurement are fixed to the miss branch. The
/// posterior keeps the `max_hypotheses` heaviest children; a child with no
/// detections keeps its parent's history identifier.
pub fn update(
    density: &GlmbDensity,
    zs: &[Position],
    sensor: &SensorModel,
    agent: &Position,
    caps: UpdateCaps,
) -> Result<UpdateOutput, FilterError> {
    let m = zs.len();
    let kappa = clutter_terms(zs, sensor, agent)?;
    let noise = measurement_noise(sensor)?;

    // distinct states and their likelihoods
    let mut state_ids: HashMap<*const TrackState, usize> = HashMap::new();
    let mut states: Vec<Arc<TrackState>> = Vec::new();
    let mut liks: Vec<Likelihoods> = Vec::new();
    let mut key_state: HashMap<TrackKey, usize> = HashMap::new();
    for (key, st) in &density.tracks {
        let id = *state_ids.entry(Arc::as_ptr(st)).or_insert_with(|| {
            states.push(st.clone());
            liks.push(state_likelihoods(st, zs, &kappa, sensor, agent, &noise));
            states.len() - 1
        });
        key_state.insert(*key, id);
    }

    // ranked association maps per hypothesis
    let mut memo: HashMap<Vec<usize>, Ranked> = HashMap::new();
    let mut candidates: Vec<(f64, usize, Ranked, usize)> = Vec::new();
    for (hi, h) in density.hypotheses.iter().enumerate() {
        if !(h.weight > 0.0) {
            continue;
        }
        let mut rows = Vec::with_capacity(h.labels.len());
        for k in h.keys() {
            rows.push(
                *key_state
                    .get(&k)
                    .ok_or(FilterError::Rfs(crate::rfs::RfsError::MissingTrack(k.label)))?,
            );
        }
        let ranked = memo
            .entry(rows.clone())
            .or_insert_with(|| rank_associations(&rows, &liks, m, caps.k_best.max(1)))
            .clone();
        let lw = h.weight.ln();
        for (i, (_, ll)) in ranked.iter().enumerate() {
            let v = lw + ll;
            if v > f64::NEG_INFINITY {
                candidates.push((v, hi, ranked.clone(), i));
            }
        }
    }
    if candidates.is_empty() {
        return Err(FilterError::NoFeasibleAssociation);
    }

    // normalize in log space, keep the heaviest
    let max = candidates
        .iter()
        .map(|c| c.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut weighted: Vec<(f64, usize, Ranked, usize)> = candidates
        .into_iter()
        .map(|(v, hi, r, i)| ((v - max).exp(), hi, r, i))
        .collect();
    if weighted.len() > caps.max_hypotheses.max(1) {
        weighted.sort_by(|a, b| b.0.total_cmp(&a.0));
        weighted.truncate(caps.max_hypotheses.max(1));
    }
    let total: f64 = weighted.iter().map(|c| c.0).sum();

    let mut out = GlmbDensity::new();
    out.reserve_histories_from(density);
    let mut posterior_memo: HashMap<(usize, Assignment), Arc<TrackState>> = HashMap::new();
    let mut histories: HashMap<(HistoryId, Vec<(Label, usize)>), HistoryId> = HashMap::new();
    let mut children = Vec::with_capacity(weighted.len());
    let mut association_probability = vec![0.0; m];

    for (w, hi, ranked, i) in weighted {
        let parent = &density.hypotheses[hi];
        let weight = w / total;
        let assign = &ranked[i].0;
        let detections: Vec<(Label, usize)> = parent
            .labels
            .iter()
            .zip(assign)
            .filter_map(|(l, a)| match a {
                Assignment::Detected(j) => Some((*l, *j)),
                Assignment::Missed => None,
            })
            .collect();
        for (_, j) in &detections {
            association_probability[*j] += weight;
        }
        let history = if detections.is_empty() {
            parent.history
        } else {
            match histories.get(&(parent.history, detections.clone())) {
                Some(h) => *h,
                None => {
                    let h = out.allocate_history();
                    histories.insert((parent.history, detections), h);
                    h
                }
            }
        };
        for (l, a) in parent.labels.iter().zip(assign) {
            let key = TrackKey::new(*l, history);
            if out.tracks.contains_key(&key) {
                continue;
            }
            let sid = key_state[&TrackKey::new(*l, parent.history)];
            let st = posterior_memo
                .entry((sid, *a))
                .or_insert_with(|| {
                    match posterior_state(&states[sid], *a, zs, sensor, agent, &noise) {
                        Some(p) => Arc::new(p),
                        None => states[sid].clone(),
                    }
                })
                .clone();
            out.tracks.insert(key, st);
        }
        out.hypotheses.push(Hypothesis {
            labels: parent.labels.clone(),
            weight,
            history,
        });
        children.push(UpdateChild {
            parent: hi,
            associations: parent.labels.iter().copied().zip(assign.iter().copied()).collect(),
        });
    }

    Ok(UpdateOutput {
        density: out,
        children,
        association_probability,
    })
}
