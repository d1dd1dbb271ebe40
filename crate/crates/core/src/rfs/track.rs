use nalgebra::{Matrix2, Matrix4, Vector2};

use super::RfsError;
use crate::linalg::regularize4;
use crate::State;

const WEIGHT_TOL: f64 = 1e-9;

/// Weighted particle representation of a single-object state density.
///
/// Weights are kept normalized; use [`ParticleCloud::from_unnormalized`] when
/// building a cloud from raw likelihood products.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleCloud {
    states: Vec<State>,
    weights: Vec<f64>,
}

impl ParticleCloud {
    pub fn new(states: Vec<State>, weights: Vec<f64>) -> Result<Self, RfsError> {
        if states.is_empty() {
            return Err(RfsError::EmptyCloud);
        }
        if states.len() != weights.len() {
            return Err(RfsError::InvalidWeights("length mismatch".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(RfsError::InvalidWeights("negative or non-finite weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(RfsError::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(Self { states, weights })
    }

    /// Equal-weight cloud.
    pub fn uniform(states: Vec<State>) -> Result<Self, RfsError> {
        if states.is_empty() {
            return Err(RfsError::EmptyCloud);
        }
        let w = 1.0 / states.len() as f64;
        let weights = vec![w; states.len()];
        Ok(Self { states, weights })
    }

    /// Normalize arbitrary nonnegative weights.
    pub fn from_unnormalized(states: Vec<State>, weights: Vec<f64>) -> Result<Self, RfsError> {
        if states.is_empty() {
            return Err(RfsError::EmptyCloud);
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(RfsError::AllZeroWeights);
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { states, weights })
    }

    pub(crate) fn from_parts_unchecked(states: Vec<State>, weights: Vec<f64>) -> Self {
        Self { states, weights }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&State, f64)> + '_ {
        self.states.iter().zip(self.weights.iter().copied())
    }

    pub fn mean(&self) -> State {
        self.iter().fold(State::zeros(), |acc, (x, w)| acc + x * w)
    }

    /// Weighted (biased) covariance of the cloud.
    pub fn covariance(&self) -> Matrix4<f64> {
        let mean = self.mean();
        self.iter().fold(Matrix4::zeros(), |acc, (x, w)| {
            let d = x - mean;
            acc + d * d.transpose() * w
        })
    }

    pub fn position_covariance(&self) -> Matrix2<f64> {
        let c = self.covariance();
        c.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Effective sample size `1 / Σ w²`.
    pub fn effective_sample_size(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }
}

/// One weighted Gaussian term of a mixture.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: State,
    pub cov: Matrix4<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture {
    pub components: Vec<GaussianComponent>,
}

impl GaussianMixture {
    pub fn single(mean: State, cov: Matrix4<f64>) -> Self {
        Self {
            components: vec![GaussianComponent {
                weight: 1.0,
                mean,
                cov,
            }],
        }
    }

    pub fn mean(&self) -> State {
        self.components
            .iter()
            .fold(State::zeros(), |acc, c| acc + c.mean * c.weight)
    }

    /// Moment-matched covariance of the whole mixture.
    pub fn covariance(&self) -> Matrix4<f64> {
        let mean = self.mean();
        self.components.iter().fold(Matrix4::zeros(), |acc, c| {
            let d = c.mean - mean;
            acc + (c.cov + d * d.transpose()) * c.weight
        })
    }
}

/// Per-track state density: a particle cloud while the object is still being
/// searched for, a Gaussian mixture once it has been found.
#[derive(Clone, Debug, PartialEq)]
pub enum TrackState {
    Particles(ParticleCloud),
    Gaussian(GaussianMixture),
}

impl TrackState {
    pub fn gaussian(mean: State, cov: Matrix4<f64>) -> Self {
        TrackState::Gaussian(GaussianMixture::single(mean, cov))
    }

    pub fn is_particles(&self) -> bool {
        matches!(self, TrackState::Particles(_))
    }

    pub fn mean(&self) -> State {
        match self {
            TrackState::Particles(c) => c.mean(),
            TrackState::Gaussian(g) => g.mean(),
        }
    }

    pub fn position(&self) -> Vector2<f64> {
        let m = self.mean();
        Vector2::new(m[0], m[1])
    }

    pub fn covariance(&self) -> Matrix4<f64> {
        match self {
            TrackState::Particles(c) => c.covariance(),
            TrackState::Gaussian(g) => g.covariance(),
        }
    }

    pub fn position_covariance(&self) -> Matrix2<f64> {
        self.covariance().fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Check the weight, count and positive-definiteness invariants.
    pub fn validate(&self) -> Result<(), RfsError> {
        match self {
            TrackState::Particles(c) => {
                if c.is_empty() {
                    return Err(RfsError::EmptyCloud);
                }
                let total: f64 = c.weights.iter().sum();
                if (total - 1.0).abs() > WEIGHT_TOL || c.weights.iter().any(|w| *w < 0.0) {
                    return Err(RfsError::InvalidWeights(format!("cloud weights sum to {total}")));
                }
            }
            TrackState::Gaussian(g) => {
                let total: f64 = g.components.iter().map(|c| c.weight).sum();
                if g.components.is_empty()
                    || (total - 1.0).abs() > WEIGHT_TOL
                    || g.components.iter().any(|c| c.weight < 0.0)
                {
                    return Err(RfsError::InvalidWeights(format!(
                        "mixture weights sum to {total}"
                    )));
                }
                for c in &g.components {
                    let sym = (c.cov - c.cov.transpose()).abs().max();
                    if sym > 1e-9 * c.cov.abs().max().max(1.0) || c.cov.cholesky().is_none() {
                        return Err(RfsError::NotPositiveDefinite);
                    }
                }
            }
        }
        Ok(())
    }

    /// Single Gaussian matching the first two moments (regularized if degenerate).
    pub fn moment_matched(&self) -> GaussianComponent {
        GaussianComponent {
            weight: 1.0,
            mean: self.mean(),
            cov: regularize4(&self.covariance()),
        }
    }
}
