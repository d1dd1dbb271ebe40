//! OSPA and trajectory OSPA (OSPA²) with their localization and cardinality
//! components.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assignment::{solve_rectangular, CostMatrix};
use crate::Position;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricConfig {
    /// Cutoff `c`, meters.
    pub cutoff: f64,
    /// Order `p >= 1`.
    pub order: f64,
    /// OSPA² window length, steps.
    pub window: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            cutoff: 50.0,
            order: 1.0,
            window: 10,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.cutoff > 0.0) || !(self.order >= 1.0) || self.window == 0 {
            return Err("metric needs cutoff > 0, order >= 1 and window >= 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OspaValue {
    pub total: f64,
    pub localization: f64,
    pub cardinality: f64,
}

/// Minimum-cost one-to-one assignment of `min(n, m)` pairs for a rectangular
/// cost matrix given as rows. Returns `(row, col)` pairs sorted by row and
/// the total cost.
pub fn assignment_solve(cost: &[Vec<f64>]) -> (Vec<(usize, usize)>, f64) {
    if cost.is_empty() || cost[0].is_empty() {
        return (Vec::new(), 0.0);
    }
    solve_rectangular(&CostMatrix::from_rows(cost)).expect("finite costs are always feasible")
}

/// OSPA from a matrix of pairwise base distances already capped at `c`.
fn ospa_from_distances(dist: &[Vec<f64>], n: usize, m: usize, cfg: &MetricConfig) -> OspaValue {
    let n_max = n.max(m);
    if n_max == 0 {
        return OspaValue::default();
    }
    let p = cfg.order;
    let c = cfg.cutoff;
    let loc_sum = if n.min(m) == 0 {
        0.0
    } else {
        let cost: Vec<Vec<f64>> = dist
            .iter()
            .map(|row| row.iter().map(|d| d.powf(p)).collect())
            .collect();
        assignment_solve(&cost).1
    };
    let card_sum = c.powf(p) * n.abs_diff(m) as f64;
    let scale = 1.0 / n_max as f64;
    OspaValue {
        total: (scale * (loc_sum + card_sum)).powf(1.0 / p),
        localization: (scale * loc_sum).powf(1.0 / p),
        cardinality: (scale * card_sum).powf(1.0 / p),
    }
}

/// OSPA distance between two finite point sets.
pub fn ospa(truth: &[Position], estimate: &[Position], cfg: &MetricConfig) -> OspaValue {
    let c = cfg.cutoff;
    let dist: Vec<Vec<f64>> = truth
        .iter()
        .map(|x| estimate.iter().map(|y| (x - y).norm().min(c)).collect())
        .collect();
    ospa_from_distances(&dist, truth.len(), estimate.len(), cfg)
}

/// Labeled points present at one step.
pub type Frame = Vec<(u64, Position)>;

/// OSPA² series: at step `k` the window `[k-w+1, k]` is evaluated by
/// matching whole tracks. The base distance between a truth and an
/// estimated track is the order-`p` mean, over the steps where at least one
/// of them exists, of `min(d, c)` (or `c` when only one exists).
pub fn ospa2_window(truth: &[Frame], estimate: &[Frame], cfg: &MetricConfig) -> Vec<OspaValue> {
    let steps = truth.len().max(estimate.len());
    let empty = Frame::new();
    fn at<'a>(frames: &'a [Frame], k: usize, empty: &'a Frame) -> &'a Frame {
        frames.get(k).unwrap_or(empty)
    }
    let c = cfg.cutoff;
    let p = cfg.order;

    (0..steps)
        .map(|k| {
            let start = (k + 1).saturating_sub(cfg.window.max(1));
            let collect = |frames: &[Frame]| {
                let mut tracks: BTreeMap<u64, Vec<Option<Position>>> = BTreeMap::new();
                for (off, t) in (start..=k).enumerate() {
                    for (id, pos) in at(frames, t, &empty) {
                        tracks
                            .entry(*id)
                            .or_insert_with(|| vec![None; k - start + 1])[off] = Some(*pos);
                    }
                }
                tracks
            };
            let xs = collect(truth);
            let ys = collect(estimate);
            let dist: Vec<Vec<f64>> = xs
                .values()
                .map(|x| {
                    ys.values()
                        .map(|y| {
                            let mut sum = 0.0;
                            let mut count = 0usize;
                            for (a, b) in x.iter().zip(y) {
                                let d = match (a, b) {
                                    (Some(a), Some(b)) => (a - b).norm().min(c),
                                    (None, None) => continue,
                                    _ => c,
                                };
                                sum += d.powf(p);
                                count += 1;
                            }
                            if count == 0 {
                                0.0
                            } else {
                                (sum / count as f64).powf(1.0 / p)
                            }
                        })
                        .collect()
                })
                .collect();
            ospa_from_distances(&dist, xs.len(), ys.len(), cfg)
        })
        .collect()
}
