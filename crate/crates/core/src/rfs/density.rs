use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{RfsError, TrackState};
use crate::State;

/// Track label: the step an object entered the belief and a per-step counter.
/// Ordering is lexicographic on `(birth_step, index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub birth_step: u32,
    pub index: u32,
}

impl Label {
    pub const fn new(birth_step: u32, index: u32) -> Self {
        Self { birth_step, index }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.birth_step, self.index)
    }
}

/// Opaque identifier of an association history.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HistoryId(pub u64);

/// Key of a per-track state: a label under one association history.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrackKey {
    pub label: Label,
    pub history: HistoryId,
}

impl TrackKey {
    pub const fn new(label: Label, history: HistoryId) -> Self {
        Self { label, history }
    }
}

/// One GLMB component: a set of existing labels under a history, with weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    /// Sorted, distinct.
    pub labels: Vec<Label>,
    pub weight: f64,
    pub history: HistoryId,
}

impl Hypothesis {
    pub fn new(labels: impl IntoIterator<Item = Label>, weight: f64, history: HistoryId) -> Self {
        let mut labels: Vec<Label> = labels.into_iter().collect();
        labels.sort_unstable();
        labels.dedup();
        Self {
            labels,
            weight,
            history,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.labels.len()
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.labels.binary_search(label).is_ok()
    }

    pub fn keys(&self) -> impl Iterator<Item = TrackKey> + '_ {
        self.labels.iter().map(move |l| TrackKey::new(*l, self.history))
    }
}

/// Generalized labeled multi-Bernoulli density.
///
/// Track states are shared through `Arc`, so cloning a density is cheap and
/// identical states under different histories can share storage while still
/// behaving as independent values.
#[derive(Clone, Debug, PartialEq)]
pub struct GlmbDensity {
    pub hypotheses: Vec<Hypothesis>,
    pub tracks: BTreeMap<TrackKey, Arc<TrackState>>,
    next_history: u64,
}

impl Default for GlmbDensity {
    fn default() -> Self {
        Self::empty()
    }
}

impl GlmbDensity {
    /// Density with no hypotheses at all (not normalized).
    pub fn new() -> Self {
        Self {
            hypotheses: Vec::new(),
            tracks: BTreeMap::new(),
            next_history: 1,
        }
    }

    /// The certainly-empty multi-object density.
    pub fn empty() -> Self {
        let mut d = Self::new();
        d.hypotheses.push(Hypothesis::new([], 1.0, HistoryId(0)));
        d
    }

    /// Allocate a fresh history identifier.
    pub fn allocate_history(&mut self) -> HistoryId {
        let id = HistoryId(self.next_history);
        self.next_history += 1;
        id
    }

    pub(crate) fn reserve_histories_from(&mut self, other: &GlmbDensity) {
        self.next_history = self.next_history.max(other.next_history);
    }

    pub fn track(&self, label: Label, history: HistoryId) -> Option<&Arc<TrackState>> {
        self.tracks.get(&TrackKey::new(label, history))
    }

    pub fn insert_track(&mut self, label: Label, history: HistoryId, state: TrackState) {
        self.tracks
            .insert(TrackKey::new(label, history), Arc::new(state));
    }

    pub fn total_weight(&self) -> f64 {
        self.hypotheses.iter().map(|h| h.weight).sum()
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    /// All labels referenced by any hypothesis.
    pub fn labels(&self) -> BTreeSet<Label> {
        self.hypotheses
            .iter()
            .flat_map(|h| h.labels.iter().copied())
            .collect()
    }

    /// Marginal existence probability of every label.
    pub fn existence(&self) -> BTreeMap<Label, f64> {
        let mut out = BTreeMap::new();
        for h in &self.hypotheses {
            for l in &h.labels {
                *out.entry(*l).or_insert(0.0) += h.weight;
            }
        }
        out
    }

    /// `Σ_h w_h |I_h|`.
    pub fn expected_cardinality(&self) -> f64 {
        self.hypotheses
            .iter()
            .map(|h| h.weight * h.labels.len() as f64)
            .sum()
    }

    /// Cardinality marginal `Pr(|X| = n)` for `n = 0..=max`.
    pub fn cardinality_distribution(&self) -> Vec<f64> {
        let max = self.hypotheses.iter().map(|h| h.labels.len()).max().unwrap_or(0);
        let mut dist = vec![0.0; max + 1];
        for h in &self.hypotheses {
            dist[h.labels.len()] += h.weight;
        }
        dist
    }

    /// Drop track entries no hypothesis refers to.
    pub fn prune_tracks(&mut self) {
        let used: HashSet<TrackKey> = self.hypotheses.iter().flat_map(|h| h.keys()).collect();
        self.tracks.retain(|k, _| used.contains(k));
    }

    /// Number of distinct state allocations (shared states counted once).
    pub fn distinct_states(&self) -> usize {
        let ptrs: HashSet<*const TrackState> =
            self.tracks.values().map(Arc::as_ptr).collect();
        ptrs.len()
    }

    /// Check the density invariants: weights nonnegative and summing to one,
    /// distinct labels, and a state for every referenced label.
    pub fn validate(&self) -> Result<(), RfsError> {
        let total = self.total_weight();
        if (total - 1.0).abs() > 1e-9 {
            return Err(RfsError::InvalidWeights(format!(
                "hypothesis weights sum to {total}"
            )));
        }
        for h in &self.hypotheses {
            if !(h.weight >= 0.0) {
                return Err(RfsError::InvalidWeights("negative hypothesis weight".into()));
            }
            if h.labels.windows(2).any(|w| w[0] >= w[1]) {
                return Err(RfsError::DuplicateLabel);
            }
            for k in h.keys() {
                let state = self.tracks.get(&k).ok_or(RfsError::MissingTrack(k.label))?;
                state.validate()?;
            }
        }
        Ok(())
    }
}

/// Scale hypothesis weights to sum to one, preserving order and ratios.
pub fn normalize_hypotheses(density: &GlmbDensity) -> Result<GlmbDensity, RfsError> {
    let total = density.total_weight();
    if !(total > 0.0) || !total.is_finite() {
        return Err(RfsError::AllZeroWeights);
    }
    let mut out = density.clone();
    for h in &mut out.hypotheses {
        h.weight /= total;
    }
    Ok(out)
}

/// A labeled point estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub label: Label,
    pub state: State,
}

/// MAP-cardinality estimator: pick the most probable cardinality, then the
/// heaviest hypothesis with that cardinality, and report its tracks' means.
/// Ties go to the smaller cardinality and then to the earlier hypothesis.
pub fn map_estimate(density: &GlmbDensity) -> Vec<Estimate> {
    let Some(best) = map_hypothesis(density) else {
        return Vec::new();
    };
    let h = &density.hypotheses[best];
    h.labels
        .iter()
        .filter_map(|l| {
            density.track(*l, h.history).map(|s| Estimate {
                label: *l,
                state: s.mean(),
            })
        })
        .collect()
}

/// Index of the hypothesis selected by the MAP-cardinality rule.
pub fn map_hypothesis(density: &GlmbDensity) -> Option<usize> {
    if density.hypotheses.is_empty() {
        return None;
    }
    let dist = density.cardinality_distribution();
    let mut card = 0;
    for (n, w) in dist.iter().enumerate() {
        if *w > dist[card] {
            card = n;
        }
    }
    let mut best: Option<usize> = None;
    for (i, h) in density.hypotheses.iter().enumerate() {
        if h.labels.len() != card {
            continue;
        }
        match best {
            Some(b) if density.hypotheses[b].weight >= h.weight => {}
            _ => best = Some(i),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix4;

    fn l(i: u32) -> Label {
        Label::new(0, i)
    }

    fn density_with(weights: &[(Vec<u32>, f64)]) -> GlmbDensity {
        let mut d = GlmbDensity::new();
        for (labels, w) in weights {
            d.hypotheses
                .push(Hypothesis::new(labels.iter().map(|i| l(*i)), *w, HistoryId(0)));
            for i in labels {
                let mean = State::new(*i as f64 * 10.0, 0.0, 0.0, 0.0);
                d.insert_track(l(*i), HistoryId(0), TrackState::gaussian(mean, Matrix4::identity()));
            }
        }
        d
    }

    #[test]
    fn normalize_examples() {
        let d = density_with(&[(vec![], 2.0), (vec![1], 2.0)]);
        let n = normalize_hypotheses(&d).unwrap();
        assert_eq!(n.hypotheses[0].weight, 0.5);
        assert_eq!(n.hypotheses[1].weight, 0.5);

        let d = density_with(&[(vec![1], 1.0)]);
        assert_eq!(normalize_hypotheses(&d).unwrap().hypotheses[0].weight, 1.0);

        let d = density_with(&[(vec![], 0.2), (vec![1], 0.3), (vec![2], 0.5)]);
        let n = normalize_hypotheses(&d).unwrap();
        for (a, b) in n.hypotheses.iter().zip([0.2, 0.3, 0.5]) {
            assert!((a.weight - b).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_rejects_all_zero() {
        let d = density_with(&[(vec![], 0.0), (vec![1], 0.0)]);
        assert_eq!(normalize_hypotheses(&d), Err(RfsError::AllZeroWeights));
    }

    #[test]
    fn map_estimate_of_empty_hypothesis_is_empty() {
        assert!(map_estimate(&GlmbDensity::empty()).is_empty());
    }

    #[test]
    fn map_estimate_picks_map_cardinality() {
        let d = density_with(&[(vec![], 0.3), (vec![1], 0.7)]);
        let est = map_estimate(&d);
        assert_eq!(est.len(), 1);
        assert_eq!(est[0].label, l(1));
        assert_eq!(est[0].state[0], 10.0);
    }

    #[test]
    fn map_estimate_uses_cardinality_marginal_not_best_hypothesis() {
        // Cardinality marginals {0: 0.25, 1: 0.5, 2: 0.25}; the single best
        // hypothesis overall ({1,2} at 0.25 vs {1} at 0.3) is irrelevant.
        let d = density_with(&[
            (vec![], 0.25),
            (vec![1], 0.3),
            (vec![2], 0.2),
            (vec![1, 2], 0.25),
        ]);
        let est = map_estimate(&d);
        assert_eq!(est.iter().map(|e| e.label).collect::<Vec<_>>(), vec![l(1)]);
    }

    #[test]
    fn validate_detects_missing_track() {
        let mut d = GlmbDensity::new();
        d.hypotheses.push(Hypothesis::new([l(3)], 1.0, HistoryId(0)));
        assert_eq!(d.validate(), Err(RfsError::MissingTrack(l(3))));
    }

    #[test]
    fn prune_removes_unreferenced_states() {
        let mut d = density_with(&[(vec![1], 0.5), (vec![2], 0.5)]);
        d.hypotheses.truncate(1);
        d.prune_tracks();
        assert_eq!(d.tracks.len(), 1);
    }
}
