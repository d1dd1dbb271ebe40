use std::collections::HashMap;

use crate::rfs::{GlmbDensity, HistoryId, Hypothesis, Label};

/// Keep the `max_hypotheses` heaviest hypotheses, then remove every label
/// whose marginal existence is below `min_existence`, merging hypotheses that
/// become identical. Weights are renormalized and at least one hypothesis is
/// always kept. Returns the input unchanged when nothing is removed.
pub fn truncate(density: &GlmbDensity, max_hypotheses: usize, min_existence: f64) -> GlmbDensity {
    let mut hyps = density.hypotheses.clone();
    let mut changed = false;
    if hyps.len() > max_hypotheses.max(1) {
        hyps.sort_by(|a, b| b.weight.total_cmp(&a.weight));
        hyps.truncate(max_hypotheses.max(1));
        changed = true;
    }
    normalize(&mut hyps);

    let mut existence: HashMap<Label, f64> = HashMap::new();
    for h in &hyps {
        for l in &h.labels {
            *existence.entry(*l).or_insert(0.0) += h.weight;
        }
    }
    let drop: Vec<Label> = existence
        .iter()
        .filter(|(_, r)| **r < min_existence)
        .map(|(l, _)| *l)
        .collect();

    if !drop.is_empty() {
        changed = true;
        let mut merged: Vec<Hypothesis> = Vec::with_capacity(hyps.len());
        let mut index: HashMap<(Vec<Label>, HistoryId), usize> = HashMap::new();
        for h in hyps {
            let labels: Vec<Label> = h.labels.into_iter().filter(|l| !drop.contains(l)).collect();
            let key = (labels, h.history);
            match index.get(&key) {
                Some(&i) => merged[i].weight += h.weight,
                None => {
                    index.insert(key.clone(), merged.len());
                    merged.push(Hypothesis {
                        labels: key.0,
                        weight: h.weight,
                        history: key.1,
                    });
                }
            }
        }
        hyps = merged;
        normalize(&mut hyps);
    }

    if !changed {
        return density.clone();
    }
    let mut out = density.clone();
    out.hypotheses = hyps;
    out.prune_tracks();
    out
}

/// Drop hypotheses lighter than `relative_threshold` times the heaviest one
/// and renormalize. A threshold of 0 keeps everything.
pub fn prune_hypotheses(density: &GlmbDensity, relative_threshold: f64) -> GlmbDensity {
    let max = density
        .hypotheses
        .iter()
        .map(|h| h.weight)
        .fold(0.0, f64::max);
    let cut = relative_threshold * max;
    if !(cut > 0.0) || density.hypotheses.iter().all(|h| h.weight >= cut) {
        return density.clone();
    }
    let mut out = density.clone();
    out.hypotheses.retain(|h| h.weight >= cut);
    normalize(&mut out.hypotheses);
    out.prune_tracks();
    out
}

fn normalize(hyps: &mut [Hypothesis]) {
    let total: f64 = hyps.iter().map(|h| h.weight).sum();
    if total > 0.0 && total.is_finite() {
        for h in hyps.iter_mut() {
            h.weight /= total;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rfs::TrackState;
    use crate::State;
    use nalgebra::Matrix4;

    fn density(hyps: &[(&[u32], f64)]) -> GlmbDensity {
        let mut d = GlmbDensity::new();
        for (labels, w) in hyps {
            for l in labels.iter() {
                d.insert_track(
                    Label::new(0, *l),
                    HistoryId(0),
                    TrackState::gaussian(State::zeros(), Matrix4::identity()),
                );
            }
            d.hypotheses.push(Hypothesis::new(
                labels.iter().map(|l| Label::new(0, *l)),
                *w,
                HistoryId(0),
            ));
        }
        d
    }

    #[test]
    fn unlimited_thresholds_are_identity() {
        let d = density(&[(&[], 0.3), (&[0], 0.7)]);
        assert_eq!(truncate(&d, usize::MAX, 0.0), d);
    }

    #[test]
    fn cap_of_one_keeps_heaviest() {
        let d = density(&[(&[], 0.1), (&[0], 0.9)]);
        let t = truncate(&d, 1, 0.0);
        assert_eq!(t.hypotheses.len(), 1);
        assert_eq!(t.hypotheses[0].weight, 1.0);
        assert_eq!(t.hypotheses[0].labels, vec![Label::new(0, 0)]);
    }

    #[test]
    fn light_hypotheses_are_pruned() {
        let d = density(&[(&[0], 0.6), (&[1], 0.4 - 1e-9), (&[0, 1], 1e-9)]);
        assert_eq!(prune_hypotheses(&d, 0.0), d);
        assert_eq!(prune_hypotheses(&d, 1e-10), d);
        let p = prune_hypotheses(&d, 1e-6);
        assert_eq!(p.hypotheses.len(), 2);
        assert!((p.total_weight() - 1.0).abs() < 1e-12);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn rare_label_is_removed_and_duplicates_merge() {
        let d = density(&[(&[0], 0.5 - 1e-6), (&[0, 1], 1e-6), (&[], 0.5)]);
        let t = truncate(&d, 100, 1e-3);
        assert_eq!(t.hypotheses.len(), 2);
        assert!((t.hypotheses[0].weight - 0.5).abs() < 1e-12);
        assert_eq!(t.hypotheses[0].labels, vec![Label::new(0, 0)]);
        assert!(t.tracks.keys().all(|k| k.label != Label::new(0, 1)));
        assert!(t.validate().is_ok());
    }
}
