use serde::{Deserialize, Serialize};

use crate::rfs::{GlmbDensity, LmbDensity, TrackState};

/// Sign of the Gaussian inner product `⟨p, ln(Kp)⟩`.
///
/// `PositiveLogDet` uses `+0.5 ln det(2πeΣ)`, so wider Gaussian tracks *lower* the
/// entropy. `Shannon` uses `-0.5 ln det(2πeΣ)`, the expected log-density of
/// a Gaussian. Particle tracks are unaffected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyConvention {
    #[default]
    PositiveLogDet,
    Shannon,
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Inner product `⟨p, ln(Kp)⟩` of one track with existence `r`.
pub fn track_inner_product(
    state: &TrackState,
    existence: f64,
    hypervolume: f64,
    convention: EntropyConvention,
) -> f64 {
    match state {
        TrackState::Particles(cloud) => {
            let w = cloud.weights();
            let first = w[0];
            // uniform clouds: Σ (1/M) ln(r/M) = ln r - ln M
            let sum = if w.iter().all(|x| *x == first) {
                if existence > 0.0 {
                    existence.ln() - (w.len() as f64).ln()
                } else {
                    0.0
                }
            } else {
                w.iter()
                    .map(|x| {
                        let v = existence * x;
                        if v > 0.0 {
                            x * v.ln()
                        } else {
                            0.0
                        }
                    })
                    .sum()
            };
            sum + hypervolume.ln()
        }
        TrackState::Gaussian(_) => {
            let cov = state.position_covariance();
            let det = (cov * (2.0 * std::f64::consts::PI * std::f64::consts::E)).determinant();
            let half = 0.5 * det.max(f64::MIN_POSITIVE).ln();
            let signed = match convention {
                EntropyConvention::PositiveLogDet => half,
                EntropyConvention::Shannon => -half,
            };
            signed + hypervolume.ln()
        }
    }
}

/// Differential entropy of an LMB:
/// `-Σ_l [r ln r + (1-r) ln(1-r) + r ⟨p, ln(Kp)⟩]` with `0 ln 0 = 0`.
pub fn lmb_entropy(lmb: &LmbDensity, hypervolume: f64, convention: EntropyConvention) -> f64 {
    -lmb.tracks
        .values()
        .map(|t| {
            let r = t.existence.clamp(0.0, 1.0);
            let inner = if r > 0.0 {
                r * track_inner_product(&t.state, r, hypervolume, convention)
            } else {
                0.0
            };
            xlnx(r) + xlnx(1.0 - r) + inner
        })
        .sum::<f64>()
}

/// Entropy of a GLMB through its first-moment LMB approximation.
pub fn glmb_entropy(density: &GlmbDensity, hypervolume: f64, convention: EntropyConvention) -> f64 {
    lmb_entropy(&crate::rfs::glmb_to_lmb(density), hypervolume, convention)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rfs::{LmbTrack, ParticleCloud};
    use crate::State;
    use crate::Label;
    use nalgebra::Matrix4;

    fn lmb(tracks: Vec<(f64, TrackState)>) -> LmbDensity {
        LmbDensity {
            tracks: tracks
                .into_iter()
                .enumerate()
                .map(|(i, (r, s))| (Label::new(0, i as u32), LmbTrack { existence: r, state: s }))
                .collect(),
        }
    }

    fn uniform_cloud(m: usize) -> TrackState {
        TrackState::Particles(ParticleCloud::uniform(vec![State::zeros(); m]).unwrap())
    }

    #[test]
    fn empty_and_absent_tracks_contribute_nothing() {
        assert_eq!(lmb_entropy(&LmbDensity::default(), 1.0, EntropyConvention::PositiveLogDet), 0.0);
        let d = lmb(vec![(0.0, uniform_cloud(10))]);
        assert_eq!(lmb_entropy(&d, 1.0, EntropyConvention::PositiveLogDet), 0.0);
    }

    #[test]
    fn uniform_cloud_identity() {
        for m in [1, 7, 1000] {
            let d = lmb(vec![(1.0, uniform_cloud(m))]);
            assert_eq!(lmb_entropy(&d, 1.0, EntropyConvention::PositiveLogDet), (m as f64).ln());
        }
    }

    #[test]
    fn gaussian_closed_form_both_signs() {
        let mut cov = Matrix4::identity();
        cov[(0, 0)] = 25.0;
        cov[(1, 1)] = 25.0;
        let d = lmb(vec![(1.0, TrackState::gaussian(State::zeros(), cov))]);
        let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
        let half = 0.5 * (two_pi_e * two_pi_e * 625.0_f64).ln();
        let positive = lmb_entropy(&d, 1.0, EntropyConvention::PositiveLogDet);
        let shannon = lmb_entropy(&d, 1.0, EntropyConvention::Shannon);
        assert!((positive + half).abs() < 1e-12);
        assert!((shannon - half).abs() < 1e-12);
    }
}
