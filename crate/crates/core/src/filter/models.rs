use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::linalg::matrix2_from_rows;
use crate::Position;

/// Random-walk motion: position is carried over, velocity is reset to zero,
/// and additive Gaussian noise is applied each step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotionModel {
    /// Per-axis position noise standard deviation, meters per step.
    pub position_noise_std: f64,
    /// Per-axis velocity noise standard deviation.
    pub velocity_noise_std: f64,
    /// Survival probability per step of tracks still in the search phase.
    pub survival_search: f64,
    /// Survival probability per step of promoted (Gaussian) tracks.
    pub survival_tracked: f64,
}

impl Default for MotionModel {
    fn default() -> Self {
        Self {
            position_noise_std: 1.0,
            velocity_noise_std: 0.0,
            survival_search: 1.0,
            survival_tracked: 0.99,
        }
    }
}

impl MotionModel {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.position_noise_std >= 0.0) || !(self.velocity_noise_std >= 0.0) {
            return Err("noise standard deviations must be nonnegative".into());
        }
        for p in [self.survival_search, self.survival_tracked] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("survival probability {p} outside [0, 1]"));
            }
        }
        Ok(())
    }

    /// One-step transition matrix.
    pub fn transition(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 0.0, 0.0))
    }

    /// `F^steps`.
    pub fn transition_steps(&self, steps: u32) -> Matrix4<f64> {
        if steps == 0 {
            return Matrix4::identity();
        }
        let f = self.transition();
        (1..steps).fold(f, |acc, _| f * acc)
    }

    /// One-step process noise covariance.
    pub fn process_noise(&self) -> Matrix4<f64> {
        let p = self.position_noise_std * self.position_noise_std;
        let v = self.velocity_noise_std * self.velocity_noise_std;
        Matrix4::from_diagonal(&nalgebra::Vector4::new(p, p, v, v))
    }

    /// Accumulated noise over `steps`: `Σ_{i<steps} F^i Q F^iᵀ`.
    pub fn process_noise_steps(&self, steps: u32) -> Matrix4<f64> {
        let f = self.transition();
        let q = self.process_noise();
        let mut fi = Matrix4::identity();
        let mut acc = Matrix4::zeros();
        for _ in 0..steps {
            acc += fi * q * fi.transpose();
            fi = f * fi;
        }
        acc
    }
}

/// Range-dependent detection with Gaussian position measurements and
/// Poisson clutter uniform over the field of view.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorModel {
    /// Detection probability inside the inner radius.
    pub detection_peak: f64,
    /// Plateau radius, meters.
    pub inner_radius: f64,
    /// Detection probability falls linearly to zero at this radius, meters.
    pub outer_radius: f64,
    /// Measurement noise covariance, m².
    pub noise_cov: [[f64; 2]; 2],
    /// Expected clutter points per scan.
    pub clutter_rate: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            detection_peak: 0.8825,
            inner_radius: 100.0,
            outer_radius: 150.0,
            noise_cov: [[4.0, 0.0], [0.0, 4.0]],
            clutter_rate: 0.01,
        }
    }
}

impl SensorModel {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.detection_peak) {
            return Err("detection_peak outside [0, 1]".into());
        }
        if !(self.inner_radius >= 0.0) || !(self.outer_radius > self.inner_radius) {
            return Err("need 0 <= inner_radius < outer_radius".into());
        }
        if !(self.clutter_rate >= 0.0) {
            return Err("clutter_rate must be nonnegative".into());
        }
        let r = self.noise_matrix();
        if (r[(0, 1)] - r[(1, 0)]).abs() > 1e-12 || r[(0, 0)] < 0.0 || r[(1, 1)] < 0.0 {
            return Err("noise_cov must be symmetric positive semidefinite".into());
        }
        Ok(())
    }

    pub fn noise_matrix(&self) -> Matrix2<f64> {
        matrix2_from_rows(&self.noise_cov)
    }

    /// `P_D` for an object at `position` seen from `agent`.
    #[inline]
    pub fn detection_probability(&self, position: &Position, agent: &Position) -> f64 {
        let dx = position.x - agent.x;
        let dy = position.y - agent.y;
        let d2 = dx * dx + dy * dy;
        if d2 <= self.inner_radius * self.inner_radius {
            self.detection_peak
        } else if d2 >= self.outer_radius * self.outer_radius {
            0.0
        } else {
            let d = d2.sqrt();
            self.detection_peak * (self.outer_radius - d) / (self.outer_radius - self.inner_radius)
        }
    }

    pub fn fov_area(&self) -> f64 {
        std::f64::consts::PI * self.outer_radius * self.outer_radius
    }

    /// Clutter intensity used by the filter: `λ_c / area(FOV)`.
    ///
    /// The intensity is applied at every measurement, including the rare
    /// detection whose noise carries it just outside the disc, so only a zero
    /// clutter rate makes it vanish.
    pub fn clutter_intensity(&self, _z: &Position, _agent: &Position) -> f64 {
        self.clutter_rate / self.fov_area()
    }

    /// Whether `position` lies inside the outer radius.
    pub fn in_fov(&self, position: &Position, agent: &Position) -> bool {
        (position - agent).norm_squared() <= self.outer_radius * self.outer_radius
    }
}
