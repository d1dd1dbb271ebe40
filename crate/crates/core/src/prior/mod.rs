//! Population-count prior and initialization of the unified belief.
//!
//! Each prior cluster contributes `N` labels, where `N` is the largest count
//! with nonzero prior probability. Every subset of those labels becomes a
//! hypothesis; the `C(N, k)` subsets of size `k` share the prior mass `ρ(k)`
//! equally, so the belief's cardinality marginal reproduces `ρ` exactly.
//! Each label starts as a particle cloud drawn from the cluster's spatial
//! density. Clusters are independent, so the joint prior is their product,
//! truncated to the heaviest hypotheses.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Workspace;
use crate::linalg::{matrix2_from_rows, psd_factor2};
use crate::rfs::{GlmbDensity, HistoryId, Hypothesis, Label, ParticleCloud, TrackState};
use crate::rng::{self, StreamRng};
use crate::{Position, State};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PriorError {
    #[error("cardinality pmf is empty or has no positive mass")]
    EmptyPmf,
    #[error("cardinality pmf is invalid: {0}")]
    InvalidPmf(String),
    #[error("spatial density is invalid: {0}")]
    InvalidSpatial(String),
}

/// One Gaussian term of a spatial mixture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialComponent {
    pub weight: f64,
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

/// Spatial part of a population prior, over planar position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialDensity {
    Gaussian { mean: [f64; 2], cov: [[f64; 2]; 2] },
    Mixture { components: Vec<SpatialComponent> },
    Uniform { region: Workspace },
}

impl SpatialDensity {
    pub fn validate(&self) -> Result<(), PriorError> {
        let check_cov = |cov: &[[f64; 2]; 2]| {
            let m = matrix2_from_rows(cov);
            if (m[(0, 1)] - m[(1, 0)]).abs() > 1e-9 * m.abs().max().max(1.0) {
                return Err(PriorError::InvalidSpatial("covariance not symmetric".into()));
            }
            if m.cholesky().is_none() {
                return Err(PriorError::InvalidSpatial(
                    "covariance not positive definite".into(),
                ));
            }
            Ok(())
        };
        match self {
            SpatialDensity::Gaussian { cov, .. } => check_cov(cov),
            SpatialDensity::Mixture { components } => {
                if components.is_empty() {
                    return Err(PriorError::InvalidSpatial("empty mixture".into()));
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if components.iter().any(|c| c.weight < 0.0) || (total - 1.0).abs() > 1e-9 {
                    return Err(PriorError::InvalidSpatial(format!(
                        "mixture weights sum to {total}"
                    )));
                }
                components.iter().try_for_each(|c| check_cov(&c.cov))
            }
            SpatialDensity::Uniform { region } => {
                if region.is_valid() {
                    Ok(())
                } else {
                    Err(PriorError::InvalidSpatial("empty uniform region".into()))
                }
            }
        }
    }

    pub fn mean(&self) -> Position {
        match self {
            SpatialDensity::Gaussian { mean, .. } => Position::new(mean[0], mean[1]),
            SpatialDensity::Mixture { components } => components.iter().fold(
                Position::zeros(),
                |acc, c| acc + Position::new(c.mean[0], c.mean[1]) * c.weight,
            ),
            SpatialDensity::Uniform { region } => region.center(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Position {
        match self {
            SpatialDensity::Gaussian { mean, cov } => sample_gaussian(mean, cov, rng),
            SpatialDensity::Mixture { components } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = components.len() - 1;
                for (i, c) in components.iter().enumerate() {
                    acc += c.weight;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                let c = &components[pick];
                sample_gaussian(&c.mean, &c.cov, rng)
            }
            SpatialDensity::Uniform { region } => region.sample_uniform(rng),
        }
    }

    pub fn translated(&self, offset: &Position) -> Self {
        let shift = |m: &[f64; 2]| [m[0] + offset.x, m[1] + offset.y];
        match self {
            SpatialDensity::Gaussian { mean, cov } => SpatialDensity::Gaussian {
                mean: shift(mean),
                cov: *cov,
            },
            SpatialDensity::Mixture { components } => SpatialDensity::Mixture {
                components: components
                    .iter()
                    .map(|c| SpatialComponent {
                        weight: c.weight,
                        mean: shift(&c.mean),
                        cov: c.cov,
                    })
                    .collect(),
            },
            SpatialDensity::Uniform { region } => SpatialDensity::Uniform {
                region: region.translated(offset),
            },
        }
    }
}

fn sample_gaussian<R: Rng + ?Sized>(mean: &[f64; 2], cov: &[[f64; 2]; 2], rng: &mut R) -> Position {
    let l = psd_factor2(&matrix2_from_rows(cov));
    let n = nalgebra::Vector2::new(
        StandardNormal.sample(&mut *rng),
        StandardNormal.sample(&mut *rng),
    );
    Position::new(mean[0], mean[1]) + l * n
}

/// One prior cluster: where objects are and how many there are.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cluster {
    pub spatial: SpatialDensity,
    /// `cardinality[n] = Pr(|X| = n)`.
    pub cardinality: Vec<f64>,
}

impl Cluster {
    pub fn validate(&self) -> Result<(), PriorError> {
        validate_pmf(&self.cardinality)?;
        self.spatial.validate()
    }

    pub fn expected_count(&self) -> f64 {
        expected_count(&self.cardinality)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationPrior {
    pub clusters: Vec<Cluster>,
}

impl PopulationPrior {
    pub fn expected_count(&self) -> f64 {
        self.clusters.iter().map(Cluster::expected_count).sum()
    }
}

pub fn expected_count(pmf: &[f64]) -> f64 {
    pmf.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
}

pub fn validate_pmf(pmf: &[f64]) -> Result<(), PriorError> {
    if pmf.is_empty() {
        return Err(PriorError::EmptyPmf);
    }
    if pmf.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(PriorError::InvalidPmf("negative or non-finite entry".into()));
    }
    let total: f64 = pmf.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(PriorError::InvalidPmf(format!("sums to {total}")));
    }
    Ok(())
}

/// Largest `n` with `ρ(n) > 0`.
pub fn max_cardinality(rho: &[f64]) -> Result<usize, PriorError> {
    rho.iter()
        .rposition(|p| *p > 0.0)
        .ok_or(PriorError::EmptyPmf)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All subsets of `{l_1..l_N}` with `w(I) = ρ(|I|) / C(N, |I|)`. Labels are
/// `(birth_step 0, label_base + i)`; `state_for` supplies each label's state.
/// Subsets are listed by size, then lexicographically.
pub fn init_cluster_hypotheses(
    cluster: &Cluster,
    label_base: u32,
    mut state_for: impl FnMut(Label) -> TrackState,
) -> Result<GlmbDensity, PriorError> {
    validate_pmf(&cluster.cardinality)?;
    let n = max_cardinality(&cluster.cardinality)?;
    let labels: Vec<Label> = (0..n as u32).map(|i| Label::new(0, label_base + i)).collect();
    let history = HistoryId(0);

    let mut density = GlmbDensity::new();
    for l in &labels {
        density.insert_track(*l, history, state_for(*l));
    }
    for k in 0..=n {
        let w = cluster.cardinality[k] / binomial(n, k);
        for combo in combinations(n, k) {
            density
                .hypotheses
                .push(Hypothesis::new(combo.into_iter().map(|i| labels[i]), w, history));
        }
    }
    Ok(density)
}

/// k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        if idx[i] == i + n - k {
            return out;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Product of independent cluster densities (label ranges must be disjoint),
/// keeping the `cap` heaviest hypotheses and renormalizing.
///
/// Clusters are folded in pairwise with truncation after every step; this is
/// exact because any member of the global top-`cap` has a partial product
/// that is itself in the partial top-`cap`.
pub fn merge_cluster_priors(per_cluster: &[GlmbDensity], cap: usize) -> GlmbDensity {
    let cap = cap.max(1);
    let Some((first, rest)) = per_cluster.split_first() else {
        return GlmbDensity::empty();
    };
    let mut acc = truncate_top(first.clone(), cap);
    for next in rest {
        acc = truncate_top(product(&acc, next), cap);
    }
    let total = acc.total_weight();
    if total > 0.0 {
        for h in &mut acc.hypotheses {
            h.weight /= total;
        }
    }
    acc
}

fn product(a: &GlmbDensity, b: &GlmbDensity) -> GlmbDensity {
    let mut out = GlmbDensity::new();
    out.reserve_histories_from(a);
    out.reserve_histories_from(b);
    let mut history_map: HashMap<(HistoryId, HistoryId), HistoryId> = HashMap::new();
    for ha in &a.hypotheses {
        for hb in &b.hypotheses {
            let key = (ha.history, hb.history);
            let history = match history_map.get(&key) {
                Some(h) => *h,
                None => {
                    let h = if key == (HistoryId(0), HistoryId(0)) {
                        HistoryId(0)
                    } else {
                        out.allocate_history()
                    };
                    history_map.insert(key, h);
                    h
                }
            };
            for (src, hyp) in [(a, ha), (b, hb)] {
                for k in hyp.keys() {
                    if let Some(s) = src.tracks.get(&k) {
                        out.tracks
                            .entry(crate::rfs::TrackKey::new(k.label, history))
                            .or_insert_with(|| s.clone());
                    }
                }
            }
            out.hypotheses.push(Hypothesis::new(
                ha.labels.iter().chain(hb.labels.iter()).copied(),
                ha.weight * hb.weight,
                history,
            ));
        }
    }
    out
}

fn truncate_top(mut d: GlmbDensity, cap: usize) -> GlmbDensity {
    if d.hypotheses.len() > cap {
        // stable: ties keep generation order
        d.hypotheses
            .sort_by(|x, y| y.weight.total_cmp(&x.weight));
        d.hypotheses.truncate(cap);
        d.prune_tracks();
    }
    d
}

/// Equal-weight cloud of `n_particles` positions drawn from the cluster's
/// spatial density, with zero velocity.
pub fn sample_track_particles(cluster: &Cluster, n_particles: usize, seed: u64) -> TrackState {
    let mut rng = rng::from_seed(seed);
    sample_cloud(&cluster.spatial, n_particles.max(1), &mut rng)
}

fn sample_cloud(spatial: &SpatialDensity, n: usize, rng: &mut StreamRng) -> TrackState {
    let states: Vec<State> = (0..n)
        .map(|_| {
            let p = spatial.sample(rng);
            State::new(p.x, p.y, 0.0, 0.0)
        })
        .collect();
    TrackState::Particles(ParticleCloud::uniform(states).expect("n >= 1"))
}

/// Build the initial belief for a whole prior: per-cluster hypotheses with
/// freshly sampled clouds, merged and truncated to `cap` hypotheses.
pub fn initialize_belief(
    prior: &PopulationPrior,
    n_particles: usize,
    cap: usize,
    seed: u64,
) -> Result<GlmbDensity, PriorError> {
    let mut per_cluster = Vec::with_capacity(prior.clusters.len());
    let mut base = 0u32;
    for cluster in &prior.clusters {
        cluster.validate()?;
        let density = init_cluster_hypotheses(cluster, base, |label| {
            let s = rng::derive_seed(seed, label.index as u64, rng::streams::INIT);
            sample_track_particles(cluster, n_particles, s)
        })?;
        base += max_cardinality(&cluster.cardinality)? as u32;
        per_cluster.push(density);
    }
    Ok(merge_cluster_priors(&per_cluster, cap))
}

/// Exponentially tilt every cluster pmf, `ρ'(n) ∝ ρ(n) e^{θ n}`, with one
/// shared `θ` chosen so the total expected count equals `target`.
/// Supports are preserved.
pub fn tilt_to_expected_count(pmfs: &[Vec<f64>], target: f64) -> Result<Vec<Vec<f64>>, PriorError> {
    let tilt = |theta: f64| -> Vec<Vec<f64>> {
        pmfs.iter()
            .map(|p| {
                let raw: Vec<f64> = p
                    .iter()
                    .enumerate()
                    .map(|(n, v)| v * (theta * n as f64).exp())
                    .collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / s).collect()
            })
            .collect()
    };
    let total = |theta: f64| tilt(theta).iter().map(|p| expected_count(p)).sum::<f64>();
    let (mut lo, mut hi) = (-50.0, 50.0);
    if target < total(lo) || target > total(hi) {
        return Err(PriorError::InvalidPmf(format!(
            "expected count {target} unreachable with these supports"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(tilt(0.5 * (lo + hi)))
}

/// Covariance matrix helper for callers that think in standard deviations.
pub fn covariance_from_std(std_x: f64, std_y: f64, correlation: f64) -> [[f64; 2]; 2] {
    let c = correlation * std_x * std_y;
    [[std_x * std_x, c], [c, std_y * std_y]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix4;

    fn point_state(_: Label) -> TrackState {
        TrackState::gaussian(State::zeros(), Matrix4::identity())
    }

    fn cluster(pmf: &[f64]) -> Cluster {
        Cluster {
            spatial: SpatialDensity::Gaussian {
                mean: [0.0, 0.0],
                cov: [[1.0, 0.0], [0.0, 1.0]],
            },
            cardinality: pmf.to_vec(),
        }
    }

    #[test]
    fn max_cardinality_examples() {
        assert_eq!(max_cardinality(&[0.2, 0.5, 0.3]), Ok(2));
        assert_eq!(max_cardinality(&[1.0]), Ok(0));
        assert_eq!(max_cardinality(&[0.5, 0.5, 0.0]), Ok(1));
        assert_eq!(max_cardinality(&[]), Err(PriorError::EmptyPmf));
    }

    #[test]
    fn binary_cluster() {
        let d = init_cluster_hypotheses(&cluster(&[0.4, 0.6]), 0, point_state).unwrap();
        assert_eq!(d.hypotheses.len(), 2);
        assert!(d.hypotheses[0].labels.is_empty());
        assert_eq!(d.hypotheses[0].weight, 0.4);
        assert_eq!(d.hypotheses[1].labels, vec![Label::new(0, 0)]);
        assert_eq!(d.hypotheses[1].weight, 0.6);
    }

    #[test]
    fn two_label_cluster_splits_mass() {
        let d = init_cluster_hypotheses(&cluster(&[0.25, 0.5, 0.25]), 10, point_state).unwrap();
        let got: Vec<(Vec<u32>, f64)> = d
            .hypotheses
            .iter()
            .map(|h| (h.labels.iter().map(|l| l.index).collect(), h.weight))
            .collect();
        assert_eq!(
            got,
            vec![
                (vec![], 0.25),
                (vec![10], 0.25),
                (vec![11], 0.25),
                (vec![10, 11], 0.25)
            ]
        );
    }

    #[test]
    fn three_label_uniform_cluster() {
        let d = init_cluster_hypotheses(&cluster(&[0.25; 4]), 0, point_state).unwrap();
        assert_eq!(d.hypotheses.len(), 8);
        for h in &d.hypotheses {
            let expect = 0.25 / binomial(3, h.labels.len());
            assert!((h.weight - expect).abs() < 1e-15);
        }
        assert!((d.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn combinations_are_complete() {
        for n in 0..7 {
            let total: usize = (0..=n).map(|k| combinations(n, k).len()).sum();
            assert_eq!(total, 1 << n);
        }
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn merging_one_cluster_is_identity() {
        let d = init_cluster_hypotheses(&cluster(&[0.25, 0.5, 0.25]), 0, point_state).unwrap();
        let m = merge_cluster_priors(std::slice::from_ref(&d), 1000);
        assert_eq!(m.hypotheses, d.hypotheses);
    }

    #[test]
    fn merging_two_binary_clusters_multiplies() {
        let a = init_cluster_hypotheses(&cluster(&[0.4, 0.6]), 0, point_state).unwrap();
        let b = init_cluster_hypotheses(&cluster(&[0.1, 0.9]), 1, point_state).unwrap();
        let m = merge_cluster_priors(&[a, b], 1000);
        assert_eq!(m.hypotheses.len(), 4);
        let ws: Vec<f64> = m.hypotheses.iter().map(|h| h.weight).collect();
        let expect = [0.04, 0.36, 0.06, 0.54];
        for (g, e) in ws.iter().zip(expect) {
            assert!((g - e).abs() < 1e-12);
        }
        assert!((m.total_weight() - 1.0).abs() < 1e-12);
        assert!(m.validate().is_ok());
    }

    #[test]
    fn tilting_hits_target_mean() {
        let pmfs = vec![vec![0.2, 0.3, 0.5], vec![0.5, 0.5]];
        let tilted = tilt_to_expected_count(&pmfs, 2.0).unwrap();
        let total: f64 = tilted.iter().map(|p| expected_count(p)).sum();
        assert!((total - 2.0).abs() < 1e-9);
        assert!(tilt_to_expected_count(&pmfs, 3.5).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_equal_weight() {
        let c = cluster(&[0.5, 0.5]);
        let a = sample_track_particles(&c, 1000, 5);
        let b = sample_track_particles(&c, 1000, 5);
        assert_eq!(a, b);
        let TrackState::Particles(cloud) = a else {
            panic!()
        };
        assert_eq!(cloud.len(), 1000);
        assert!(cloud.weights().iter().all(|w| *w == 1.0 / 1000.0));
        assert!(cloud.states().iter().all(|s| s[2] == 0.0 && s[3] == 0.0));
    }

    #[test]
    fn degenerate_spatial_collapses_to_mean() {
        let c = Cluster {
            spatial: SpatialDensity::Gaussian {
                mean: [5.0, -3.0],
                cov: [[1e-12, 0.0], [0.0, 1e-12]],
            },
            cardinality: vec![0.0, 1.0],
        };
        let TrackState::Particles(cloud) = sample_track_particles(&c, 200, 1) else {
            panic!()
        };
        for s in cloud.states() {
            assert!((s[0] - 5.0).abs() < 1e-4 && (s[1] + 3.0).abs() < 1e-4);
        }
    }
}
