//! Reference trajectories for the simulation experiments.

use serde::{Deserialize, Serialize};

use crate::geom::{Position, Workspace};

use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrajectoryKind {
    /// Closed loop around the workspace perimeter, inset by one step.
    Boundary,
    /// Serpentine sweep covering the interior.
    Cross,
    /// Both diagonals, connected along the top edge.
    Diagonal,
    Custom { waypoints: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrajectoryConfig {
    #[serde(flatten)]
    pub kind: TrajectoryKind,
    /// Maximum spacing between consecutive waypoints, meters.
    pub step: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self { kind: TrajectoryKind::Diagonal, step: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub waypoints: Vec<Position>,
    pub kind: TrajectoryKind,
    pub step: f64,
}

/// Builds the waypoint list for `kind`, every consecutive pair at most
/// `step` apart and every point inside the workspace.
pub fn generate_trajectory(
    workspace: &Workspace,
    kind: &TrajectoryKind,
    step: f64,
) -> Result<Trajectory, HarnessError> {
    if step.is_nan() || step <= 0.0 {
        return Err(HarnessError::InvalidConfig(format!("step must be positive, got {step}")));
    }
    if step >= workspace.width() / 2.0 || step >= workspace.height() / 2.0 {
        return Err(HarnessError::InvalidConfig(format!(
            "step {step} too large for a {} x {} workspace",
            workspace.width(),
            workspace.height()
        )));
    }

    let corners = |inset: f64| -> [Position; 4] {
        [
            Position::new(workspace.x_min + inset, workspace.y_min + inset),
            Position::new(workspace.x_max - inset, workspace.y_min + inset),
            Position::new(workspace.x_max - inset, workspace.y_max - inset),
            Position::new(workspace.x_min + inset, workspace.y_max - inset),
        ]
    };

    let polyline: Vec<Position> = match kind {
        TrajectoryKind::Boundary => {
            let c = corners(step);
            vec![c[0], c[1], c[2], c[3], c[0]]
        }
        TrajectoryKind::Diagonal => {
            let c = corners(step);
            // SW -> NE, along the top edge to NW, then NW -> SE.
            vec![c[0], c[2], c[3], c[1]]
        }
        TrajectoryKind::Cross => serpentine(workspace, step),
        TrajectoryKind::Custom { waypoints } => {
            if waypoints.len() < 2 {
                return Err(HarnessError::InvalidConfig(
                    "custom trajectory needs at least 2 waypoints".into(),
                ));
            }
            let points: Vec<Position> =
                waypoints.iter().map(|&(x, y)| Position::new(x, y)).collect();
            if let Some(outside) = points.iter().find(|p| !workspace.contains(**p)) {
                return Err(HarnessError::InvalidConfig(format!(
                    "custom waypoint {outside} lies outside the workspace"
                )));
            }
            points
        }
    };

    let waypoints = densify(&polyline, step);
    debug_assert!(waypoints.iter().all(|p| workspace.contains(*p)));
    Ok(Trajectory { waypoints, kind: kind.clone(), step })
}

/// Zig-zag rows no more than one meter apart, inset by `step` at the sides.
fn serpentine(workspace: &Workspace, step: f64) -> Vec<Position> {
    let inset = step;
    let usable_height = workspace.height() - 2.0 * inset;
    let rows = (workspace.height().ceil() as usize).max(2);
    let mut points = Vec::with_capacity(rows * 2);
    for row in 0..rows {
        let y = workspace.y_min
            + inset
            + if rows > 1 { usable_height * row as f64 / (rows - 1) as f64 } else { 0.0 };
        let left = Position::new(workspace.x_min + inset, y);
        let right = Position::new(workspace.x_max - inset, y);
        if row % 2 == 0 {
            points.push(left);
            points.push(right);
        } else {
            points.push(right);
            points.push(left);
        }
    }
    points
}

/// Inserts evenly spaced points so consecutive waypoints are at most `step`
/// apart.
fn densify(polyline: &[Position], step: f64) -> Vec<Position> {
    let mut out = Vec::new();
    out.push(polyline[0]);
    for pair in polyline.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let length = a.distance_to(b);
        if length == 0.0 {
            continue;
        }
        let segments = (length / step).ceil() as usize;
        for k in 1..=segments {
            let t = k as f64 / segments as f64;
            out.push(Position::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    out
}
