//! Ranked enumeration of independent Bernoulli inclusion patterns.
//!
//! Given items included independently with probabilities `p_i`, list the
//! subsets in nonincreasing order of `Π_{i∈S} p_i Π_{i∉S} (1 - p_i)`.
//! The best subset takes every item with `p_i >= 0.5`; every other subset is
//! reached by toggling a set of items, and its log-probability drops by the
//! sum of their (nonnegative) toggle penalties. Toggle sets are generated in
//! order of total penalty with the usual "extend or advance" successor rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// One enumerated subset: inclusion flags (item order) and its probability.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedSubset {
    pub included: Vec<bool>,
    pub probability: f64,
}

struct Entry {
    penalty: f64,
    seq: u64,
    /// Positions into the sorted toggle list, strictly increasing.
    toggles: Vec<usize>,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .penalty
            .total_cmp(&self.penalty)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Up to `k` most probable subsets. Items with `p` of exactly 0 or 1 are
/// never toggled, so zero-probability subsets are not produced.
pub fn k_best_subsets(probabilities: &[f64], k: usize) -> Vec<RankedSubset> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let base: Vec<bool> = probabilities.iter().map(|p| *p >= 0.5).collect();
    let base_prob: f64 = probabilities
        .iter()
        .map(|p| if *p >= 0.5 { *p } else { 1.0 - p })
        .product();

    // (penalty, item) for every item whose flip has positive probability.
    let mut toggles: Vec<(f64, usize)> = probabilities
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0 && **p < 1.0)
        .map(|(i, p)| {
            let (hi, lo) = if *p >= 0.5 { (*p, 1.0 - p) } else { (1.0 - p, *p) };
            (hi.ln() - lo.ln(), i)
        })
        .collect();
    toggles.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let build = |set: &[usize]| -> RankedSubset {
        let mut included = base.clone();
        let mut prob = base_prob;
        for &t in set {
            let item = toggles[t].1;
            let p = probabilities[item];
            included[item] = !included[item];
            prob = if included[item] {
                prob / (1.0 - p) * p
            } else {
                prob / p * (1.0 - p)
            };
        }
        RankedSubset {
            included,
            probability: prob,
        }
    };

    out.push(build(&[]));
    if toggles.is_empty() {
        return out;
    }
    let mut seq = 0u64;
    let mut heap = BinaryHeap::new();
    heap.push(Entry {
        penalty: toggles[0].0,
        seq,
        toggles: vec![0],
    });
    while out.len() < k {
        let Some(e) = heap.pop() else {
            break;
        };
        out.push(build(&e.toggles));
        let last = *e.toggles.last().expect("nonempty");
        if last + 1 < toggles.len() {
            // extend with the next toggle
            let mut ext = e.toggles.clone();
            ext.push(last + 1);
            seq += 1;
            heap.push(Entry {
                penalty: e.penalty + toggles[last + 1].0,
                seq,
                toggles: ext,
            });
            // advance the last toggle
            let mut adv = e.toggles;
            *adv.last_mut().expect("nonempty") = last + 1;
            seq += 1;
            heap.push(Entry {
                penalty: e.penalty - toggles[last].0 + toggles[last + 1].0,
                seq,
                toggles: adv,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_subsets(p: &[f64]) -> Vec<f64> {
        let n = p.len();
        let mut v: Vec<f64> = (0..1u32 << n)
            .map(|mask| {
                (0..n)
                    .map(|i| if mask & (1 << i) != 0 { p[i] } else { 1.0 - p[i] })
                    .product()
            })
            .filter(|w: &f64| *w > 0.0)
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    #[test]
    fn matches_exhaustive_ranking() {
        let cases: Vec<Vec<f64>> = vec![
            vec![0.9],
            vec![0.1, 0.2],
            vec![0.5, 0.5, 0.5],
            vec![0.99, 0.3, 0.6, 0.05, 0.7],
            vec![1.0, 0.4, 0.0, 0.8],
        ];
        for p in cases {
            let expected = all_subsets(&p);
            let got = k_best_subsets(&p, 1000);
            assert_eq!(got.len(), expected.len(), "{p:?}");
            for (g, e) in got.iter().zip(&expected) {
                assert!((g.probability - e).abs() < 1e-12);
                let direct: f64 = g
                    .included
                    .iter()
                    .zip(&p)
                    .map(|(inc, pi)| if *inc { *pi } else { 1.0 - pi })
                    .product();
                assert!((direct - g.probability).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn truncates_to_k() {
        let got = k_best_subsets(&[0.1, 0.1, 0.1], 2);
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].included, vec![false, false, false]);
        assert!((got[0].probability - 0.729).abs() < 1e-12);
    }

    #[test]
    fn birth_style_product() {
        let got = k_best_subsets(&[0.1, 0.1], 10);
        let probs: Vec<f64> = got.iter().map(|s| s.probability).collect();
        let expect = [0.81, 0.09, 0.09, 0.01];
        for (g, e) in probs.iter().zip(expect) {
            assert!((g - e).abs() < 1e-12);
        }
    }
}
