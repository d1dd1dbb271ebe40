use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::Position;

/// Axis-aligned rectangular workspace in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Workspace {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Workspace {
    /// Workspace anchored at the origin.
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            x_min: 0.0,
            y_min: 0.0,
            x_max: width,
            y_max: height,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Position {
        Position::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn is_valid(&self) -> bool {
        self.width() > 0.0 && self.height() > 0.0 && self.area().is_finite()
    }

    pub fn contains(&self, p: &Position) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn clamp(&self, p: &Position) -> Position {
        Position::new(
            p.x.clamp(self.x_min, self.x_max),
            p.y.clamp(self.y_min, self.y_max),
        )
    }

    /// Mirror a point back inside the rectangle. Points more than one
    /// width/height outside are folded repeatedly.
    pub fn reflect(&self, p: &Position) -> Position {
        Position::new(
            reflect_axis(p.x, self.x_min, self.x_max),
            reflect_axis(p.y, self.y_min, self.y_max),
        )
    }

    pub fn translated(&self, offset: &Position) -> Self {
        Self {
            x_min: self.x_min + offset.x,
            y_min: self.y_min + offset.y,
            x_max: self.x_max + offset.x,
            y_max: self.y_max + offset.y,
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Position {
        Position::new(
            self.x_min + rng.random::<f64>() * self.width(),
            self.y_min + rng.random::<f64>() * self.height(),
        )
    }
}

fn reflect_axis(v: f64, lo: f64, hi: f64) -> f64 {
    let span = hi - lo;
    if span <= 0.0 {
        return lo;
    }
    let mut t = (v - lo).rem_euclid(2.0 * span);
    if t > span {
        t = 2.0 * span - t;
    }
    lo + t
}
