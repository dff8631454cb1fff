//! Planar geometry and angle arithmetic shared by every estimator.
//!
//! Angles are always stored wrapped into `(-pi, pi]`; bearings follow the
//! mathematical convention (0 = +x axis, pi/2 = +y axis, counterclockwise).

use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("smoothing factor must lie in [0, 1], got {0}")]
    InvalidSmoothingFactor(f64),
    #[error("workspace bounds are empty or inverted")]
    EmptyWorkspace,
    #[error("node layout needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("node positions must be pairwise distinct (nodes {0} and {1} coincide)")]
    DuplicateNodePosition(usize, usize),
    #[error("node position must be finite")]
    NonFinitePosition,
    #[error("node spacing must be positive along both axes")]
    DegenerateSpacing,
    #[error("sensing range must be positive, got {0}")]
    InvalidSensingRange(f64),
}

/// A 2-D point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance_to(&self, other: Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Bearing of `other` as seen from `self`.
    pub fn bearing_to(&self, other: Position) -> Angle {
        Angle::new((other.y - self.y).atan2(other.x - self.x))
    }
}

impl std::ops::Sub for Position {
    type Output = Vector2<f64>;

    fn sub(self, rhs: Position) -> Vector2<f64> {
        Vector2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add<Vector2<f64>> for Position {
    type Output = Position;

    fn add(self, rhs: Vector2<f64>) -> Position {
        Position::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub<Vector2<f64>> for Position {
    type Output = Position;

    fn sub(self, rhs: Vector2<f64>) -> Position {
        Position::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:.3}, {:.3})", self.x, self.y)
    }
}

/// An angle in radians, kept wrapped into `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Angle(f64);

impl Angle {
    /// Wraps `radians` into `(-pi, pi]`. Panics on non-finite input; use
    /// [`wrap_angle`] for checked construction.
    pub fn new(radians: f64) -> Self {
        wrap_angle(radians).expect("angle must be finite")
    }

    pub fn radians(&self) -> f64 {
        self.0
    }

    pub fn degrees(&self) -> f64 {
        self.0.to_degrees()
    }
}

/// Wraps an angle into the canonical `(-pi, pi]` interval.
pub fn wrap_angle(radians: f64) -> Result<Angle, GeomError> {
    if !radians.is_finite() {
        return Err(GeomError::NonFiniteAngle(radians));
    }
    if radians > -PI && radians <= PI {
        return Ok(Angle(radians)); // already canonical; avoid rounding
    }
    let mut r = radians.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    Ok(Angle(r))
}

/// Signed minimal difference `a - b`, wrapped into `(-pi, pi]`.
pub fn angular_error(a: Angle, b: Angle) -> f64 {
    let mut d = (a.0 - b.0).rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    d
}

/// Result of one EWMA smoothing step on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedAngle {
    pub angle: Angle,
    /// Set when the resultant vector collapsed (antipodal inputs with equal
    /// weight); the new angle is passed through in that case.
    pub degenerate: bool,
}

/// Exponentially weighted moving average of two angles, performed on unit
/// vectors so averaging across the `+-pi` seam stays correct.
pub fn ewma_angle(prev: Angle, new: Angle, alpha: f64) -> Result<SmoothedAngle, GeomError> {
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(GeomError::InvalidSmoothingFactor(alpha));
    }
    if alpha == 1.0 {
        return Ok(SmoothedAngle { angle: new, degenerate: false });
    }
    if alpha == 0.0 {
        return Ok(SmoothedAngle { angle: prev, degenerate: false });
    }
    let x = alpha * new.0.cos() + (1.0 - alpha) * prev.0.cos();
    let y = alpha * new.0.sin() + (1.0 - alpha) * prev.0.sin();
    if x.hypot(y) < 1e-12 {
        return Ok(SmoothedAngle { angle: new, degenerate: true });
    }
    Ok(SmoothedAngle { angle: Angle(y.atan2(x)), degenerate: false })
}

/// Axis-aligned rectangular workspace bounds in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Workspace {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, GeomError> {
        let ws = Self { x_min, x_max, y_min, y_max };
        if !(x_max > x_min && y_max > y_min)
            || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite())
        {
            return Err(GeomError::EmptyWorkspace);
        }
        Ok(ws)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn center(&self) -> Position {
        Position::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn contains(&self, p: Position) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn clamp(&self, p: Position) -> Position {
        Position::new(p.x.clamp(self.x_min, self.x_max), p.y.clamp(self.y_min, self.y_max))
    }
}

/// One static anchor node with a known position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub position: Position,
}

/// The set of static anchor nodes, their centroid, and their spacing.
///
/// For four nodes forming an axis-aligned rectangle the constructor reorders
/// them into the canonical corner order SW, NW, NE, SE (relative to the
/// centroid) that the rectangular gradient formula assumes, and records the
/// applied permutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeLayout {
    nodes: Vec<Node>,
    centroid: Position,
    delta_x: f64,
    delta_y: f64,
    sensing_range: f64,
    /// `permutation[k]` is the index the k-th canonical node had in the input.
    permutation: Option<[usize; 4]>,
}

impl NodeLayout {
    pub fn new(nodes: Vec<Node>, sensing_range: f64) -> Result<Self, GeomError> {
        if nodes.len() < 3 {
            return Err(GeomError::TooFewNodes(nodes.len()));
        }
        if sensing_range.is_nan() || sensing_range <= 0.0 {
            return Err(GeomError::InvalidSensingRange(sensing_range));
        }
        for node in &nodes {
            if !node.position.is_finite() {
                return Err(GeomError::NonFinitePosition);
            }
        }
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if nodes[i].position.distance_to(nodes[j].position) < 1e-9 {
                    return Err(GeomError::DuplicateNodePosition(i, j));
                }
            }
        }

        let centroid = mean_position(&nodes);
        let (nodes, permutation) = canonicalize_rectangle(nodes, centroid);

        let xs: Vec<f64> = nodes.iter().map(|n| n.position.x).collect();
        let ys: Vec<f64> = nodes.iter().map(|n| n.position.y).collect();
        let delta_x = max(&xs) - min(&xs);
        let delta_y = max(&ys) - min(&ys);
        if delta_x <= 0.0 || delta_y <= 0.0 {
            return Err(GeomError::DegenerateSpacing);
        }

        Ok(Self { nodes, centroid, delta_x, delta_y, sensing_range, permutation })
    }

    /// Four nodes on the corners of `workspace`, in canonical order.
    pub fn rectangular(workspace: &Workspace, sensing_range: f64) -> Result<Self, GeomError> {
        let corners = [
            (workspace.x_min, workspace.y_min),
            (workspace.x_min, workspace.y_max),
            (workspace.x_max, workspace.y_max),
            (workspace.x_max, workspace.y_min),
        ];
        let nodes = corners
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Node { id: format!("N{}", i + 1), position: Position::new(x, y) })
            .collect();
        Self::new(nodes, sensing_range)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.nodes.iter().map(|n| n.position)
    }

    pub fn centroid(&self) -> Position {
        self.centroid
    }

    pub fn delta_x(&self) -> f64 {
        self.delta_x
    }

    pub fn delta_y(&self) -> f64 {
        self.delta_y
    }

    pub fn sensing_range(&self) -> f64 {
        self.sensing_range
    }

    pub fn permutation(&self) -> Option<[usize; 4]> {
        self.permutation
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// True when the layout is four nodes on an axis-aligned rectangle in
    /// canonical SW, NW, NE, SE order.
    pub fn is_canonical_rectangle(&self) -> bool {
        if self.nodes.len() != 4 {
            return false;
        }
        let p: Vec<Position> = self.positions().collect();
        let tol = 1e-9 * self.delta_x.max(self.delta_y).max(1.0);
        let same = |a: f64, b: f64| (a - b).abs() <= tol;
        same(p[0].x, p[1].x)
            && same(p[2].x, p[3].x)
            && same(p[0].y, p[3].y)
            && same(p[1].y, p[2].y)
            && p[0].x < p[2].x
            && p[0].y < p[1].y
    }
}

fn mean_position(nodes: &[Node]) -> Position {
    let n = nodes.len() as f64;
    let sx: f64 = nodes.iter().map(|node| node.position.x).sum();
    let sy: f64 = nodes.iter().map(|node| node.position.y).sum();
    Position::new(sx / n, sy / n)
}

/// Reorders four rectangle-corner nodes into SW, NW, NE, SE order. Layouts
/// that are not an axis-aligned 4-node rectangle are kept as supplied.
fn canonicalize_rectangle(nodes: Vec<Node>, centroid: Position) -> (Vec<Node>, Option<[usize; 4]>) {
    if nodes.len() != 4 {
        return (nodes, None);
    }
    let mut slot = [usize::MAX; 4];
    for (i, node) in nodes.iter().enumerate() {
        let dx = node.position.x - centroid.x;
        let dy = node.position.y - centroid.y;
        if dx == 0.0 || dy == 0.0 {
            return (nodes, None); // on an axis through the centroid: not a rectangle corner
        }
        let quadrant = match (dx < 0.0, dy < 0.0) {
            (true, true) => 0,   // SW
            (true, false) => 1,  // NW
            (false, false) => 2, // NE
            (false, true) => 3,  // SE
        };
        if slot[quadrant] != usize::MAX {
            return (nodes, None); // two nodes in one quadrant: not a rectangle
        }
        slot[quadrant] = i;
    }
    // Require axis alignment; anything else is handled by the generic paths.
    let p = |q: usize| nodes[slot[q]].position;
    let tol = 1e-6 * (p(2).x - p(0).x).abs().max(1.0);
    let aligned = (p(0).x - p(1).x).abs() <= tol
        && (p(2).x - p(3).x).abs() <= tol
        && (p(0).y - p(3).y).abs() <= tol
        && (p(1).y - p(2).y).abs() <= tol;
    if !aligned {
        return (nodes, None);
    }
    let reordered = slot.iter().map(|&i| nodes[i].clone()).collect();
    (reordered, Some(slot))
}

fn min(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
