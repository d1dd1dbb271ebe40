use serde::{Deserialize, Serialize};

use super::actions::ActionPlan;
use crate::geometry::Workspace;
use crate::Position;

/// How the agent chooses its next trajectory.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Maximize the entropy objective over the action set.
    #[default]
    Unisat,
    /// Uniformly random member of the action set.
    Random,
    /// Fixed boustrophedon sweep of the workspace.
    Lawnmower,
}

/// A back-and-forth sweep with horizontal lanes `spacing` apart. When the
/// last corner is reached the sweep runs back in reverse.
#[derive(Clone, Debug, PartialEq)]
pub struct LawnmowerRoute {
    corners: Vec<Position>,
    next: usize,
    forward: bool,
}

impl LawnmowerRoute {
    pub fn new(workspace: &Workspace, spacing: f64) -> Self {
        let spacing = spacing.max(1.0);
        let (w, h) = (workspace.width(), workspace.height());
        let mut lanes = Vec::new();
        let mut y = (spacing / 2.0).min(h / 2.0);
        while y <= h {
            lanes.push(y);
            y += spacing;
        }
        let mut corners = Vec::with_capacity(2 * lanes.len());
        for (i, y) in lanes.into_iter().enumerate() {
            let (a, b) = if i % 2 == 0 { (0.0, w) } else { (w, 0.0) };
            let origin = Position::new(workspace.x_min, workspace.y_min);
            corners.push(workspace.clamp(&(origin + Position::new(a, y))));
            corners.push(workspace.clamp(&(origin + Position::new(b, y))));
        }
        Self {
            corners,
            next: 0,
            forward: true,
        }
    }

    pub fn corners(&self) -> &[Position] {
        &self.corners
    }

    fn step_index(&self, next: usize, forward: bool) -> (usize, bool) {
        let n = self.corners.len();
        if n < 2 {
            return (0, forward);
        }
        match (forward, next) {
            (true, i) if i + 1 < n => (i + 1, true),
            (true, i) => (i - 1, false),
            (false, 0) => (1, true),
            (false, i) => (i - 1, false),
        }
    }

    /// Positions after each of the next `n` steps from `pose`, and the
    /// route state reached at the end.
    fn trace(&self, pose: &Position, n: usize, step_length: f64) -> (Vec<Position>, usize, bool) {
        let mut out = Vec::with_capacity(n);
        let mut p = *pose;
        let (mut next, mut forward) = (self.next, self.forward);
        if self.corners.is_empty() {
            return (vec![p; n], next, forward);
        }
        for _ in 0..n {
            let mut budget = step_length;
            // bounded loop: each pass either consumes the budget or reaches a corner
            for _ in 0..=self.corners.len() {
                let target = self.corners[next];
                let d = (target - p).norm();
                if d > budget {
                    p += (target - p) * (budget / d);
                    break;
                }
                p = target;
                budget -= d;
                (next, forward) = self.step_index(next, forward);
                if budget <= 0.0 {
                    break;
                }
            }
            out.push(p);
        }
        (out, next, forward)
    }

    /// The next `horizon` waypoints of the sweep as a plan (id 0, no heading).
    pub fn plan(&self, pose: &Position, horizon: usize, step_length: f64) -> ActionPlan {
        ActionPlan {
            id: 0,
            heading: None,
            waypoints: self.trace(pose, horizon, step_length).0,
        }
    }

    /// Commit `steps` steps of travel from `pose`.
    pub fn advance(&mut self, pose: &Position, steps: usize, step_length: f64) {
        let (_, next, forward) = self.trace(pose, steps, step_length);
        self.next = next;
        self.forward = forward;
    }
}
