use serde::{Deserialize, Serialize};

use super::PlannerConfig;
use crate::geometry::Workspace;
use crate::Position;

/// A candidate trajectory: one agent position per future step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionPlan {
    /// 0 is the stay action; `i >= 1` heads at `(i - 1) · 360° / count`.
    pub id: usize,
    /// Heading in radians, counterclockwise from +x; `None` for stay.
    pub heading: Option<f64>,
    pub waypoints: Vec<Position>,
}

impl ActionPlan {
    pub fn stay(pose: Position, horizon: usize) -> Self {
        Self {
            id: 0,
            heading: None,
            waypoints: vec![pose; horizon],
        }
    }
}

/// The stay action followed by `action_count` straight lines at even
/// headings, each with `horizon` waypoints `step_length` apart and clamped
/// to the workspace.
pub fn enumerate_actions(pose: &Position, cfg: &PlannerConfig, workspace: &Workspace) -> Vec<ActionPlan> {
    let mut out = Vec::with_capacity(cfg.action_count + 1);
    out.push(ActionPlan::stay(workspace.clamp(pose), cfg.horizon));
    for i in 0..cfg.action_count {
        let heading = i as f64 * std::f64::consts::TAU / cfg.action_count as f64;
        let dir = Position::new(heading.cos(), heading.sin());
        let waypoints = (1..=cfg.horizon)
            .map(|k| workspace.clamp(&(pose + dir * (k as f64 * cfg.step_length))))
            .collect();
        out.push(ActionPlan {
            id: i + 1,
            heading: Some(heading),
            waypoints,
        });
    }
    out
}
