//! Range-based positioning by damped Gauss-Newton least squares.

use crate::channel::{ChannelModel, RssiSnapshot};
use crate::geom::{NodeLayout, Position, Workspace};

use super::wcl::{weighted_centroid, WeightMode};
use super::BaselineError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrilaterationResult {
    pub position: Position,
    pub converged: bool,
    pub iterations: usize,
    /// Sum of squared range residuals at the returned position.
    pub residual: f64,
}

/// Locates the transmitter from a snapshot: readings are inverted to
/// distances through the channel model and passed to the range solver,
/// initialized at the milliwatt-weighted centroid.
pub fn trilaterate(
    layout: &NodeLayout,
    snap: &RssiSnapshot,
    model: &ChannelModel,
    workspace: Option<&Workspace>,
) -> Result<TrilaterationResult, BaselineError> {
    let anchors: Vec<Position> = layout.positions().collect();
    let distances: Vec<f64> =
        snap.readings().iter().map(|&r| model.distance_from_rssi(r)).collect();
    let init = weighted_centroid(layout, snap, WeightMode::PowerMilliwatt)
        .map(|w| w.position)
        .unwrap_or_else(|_| layout.centroid());
    trilaterate_distances(&anchors, &distances, init, workspace)
}

/// Minimizes `sum_i (|p - a_i| - d_i)^2` by damped Gauss-Newton from `init`.
/// Converged when the step is below 1e-9 m, capped at 100 iterations. For
/// collinear anchors the mirror solution is disambiguated by restarting on
/// both sides of the anchor line and preferring the in-workspace candidate.
pub fn trilaterate_distances(
    anchors: &[Position],
    distances: &[f64],
    init: Position,
    workspace: Option<&Workspace>,
) -> Result<TrilaterationResult, BaselineError> {
    if anchors.len() < 3 {
        return Err(BaselineError::TooFewAnchors { needed: 3, got: anchors.len() });
    }
    if anchors.len() != distances.len() {
        return Err(BaselineError::MismatchedDistances {
            anchors: anchors.len(),
            distances: distances.len(),
        });
    }

    let solve = |start: Position| gauss_newton(anchors, distances, start);

    let result = if let Some(normal) = collinear_normal(anchors) {
        // Two mirror basins; seed one start on each side of the line.
        let scale = anchor_span(anchors).max(1.0);
        let a = solve(Position::new(init.x + normal.0 * scale, init.y + normal.1 * scale));
        let b = solve(Position::new(init.x - normal.0 * scale, init.y - normal.1 * scale));
        match workspace {
            Some(ws) => match (ws.contains(a.position), ws.contains(b.position)) {
                (true, false) => a,
                (false, true) => b,
                _ => best_of(a, b),
            },
            None => best_of(a, b),
        }
    } else {
        solve(init)
    };

    // Never return anything worse than the initial guess.
    let init_cost = cost(anchors, distances, init);
    if result.residual > init_cost {
        return Ok(TrilaterationResult {
            position: init,
            converged: false,
            iterations: result.iterations,
            residual: init_cost,
        });
    }
    Ok(result)
}

fn best_of(a: TrilaterationResult, b: TrilaterationResult) -> TrilaterationResult {
    if a.residual <= b.residual {
        a
    } else {
        b
    }
}

fn gauss_newton(anchors: &[Position], distances: &[f64], start: Position) -> TrilaterationResult {
    let mut p = start;
    let mut current = cost(anchors, distances, p);
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..100 {
        iterations = iter + 1;

        // Normal equations J^T J delta = -J^T r with J_i = (p - a_i)/|p - a_i|.
        let (mut jtj00, mut jtj01, mut jtj11) = (0.0, 0.0, 0.0);
        let (mut jtr0, mut jtr1) = (0.0, 0.0);
        for (a, &d) in anchors.iter().zip(distances) {
            let range = p.distance_to(*a).max(1e-12);
            let ux = (p.x - a.x) / range;
            let uy = (p.y - a.y) / range;
            let r = range - d;
            jtj00 += ux * ux;
            jtj01 += ux * uy;
            jtj11 += uy * uy;
            jtr0 += ux * r;
            jtr1 += uy * r;
        }
        let det = jtj00 * jtj11 - jtj01 * jtj01;
        if det.abs() < 1e-15 {
            break;
        }
        let mut dx = -(jtj11 * jtr0 - jtj01 * jtr1) / det;
        let mut dy = -(jtj00 * jtr1 - jtj01 * jtr0) / det;

        // Damping: halve the step until the cost decreases.
        let mut accepted = false;
        for _ in 0..25 {
            let trial = Position::new(p.x + dx, p.y + dy);
            let trial_cost = cost(anchors, distances, trial);
            if trial_cost < current {
                p = trial;
                current = trial_cost;
                accepted = true;
                break;
            }
            dx *= 0.5;
            dy *= 0.5;
        }
        if !accepted {
            break;
        }
        if dx.hypot(dy) < 1e-9 {
            converged = true;
            break;
        }
    }

    TrilaterationResult { position: p, converged, iterations, residual: current }
}

fn cost(anchors: &[Position], distances: &[f64], p: Position) -> f64 {
    anchors
        .iter()
        .zip(distances)
        .map(|(a, &d)| {
            let e = p.distance_to(*a) - d;
            e * e
        })
        .sum()
}

/// Unit normal of the anchor line when all anchors are collinear.
fn collinear_normal(anchors: &[Position]) -> Option<(f64, f64)> {
    let n = anchors.len() as f64;
    let cx = anchors.iter().map(|a| a.x).sum::<f64>() / n;
    let cy = anchors.iter().map(|a| a.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for a in anchors {
        let dx = a.x - cx;
        let dy = a.y - cy;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let det = sxx * syy - sxy * sxy;
    let scale = (sxx + syy).max(f64::MIN_POSITIVE);
    if det.abs() >= 1e-12 * scale * scale {
        return None;
    }
    // Direction of the line is the dominant eigenvector; normal is its perp.
    let (dir_x, dir_y) = if sxx >= syy { (sxx, sxy) } else { (sxy, syy) };
    let norm = dir_x.hypot(dir_y);
    if norm == 0.0 {
        return None;
    }
    Some((-dir_y / norm, dir_x / norm))
}

fn anchor_span(anchors: &[Position]) -> f64 {
    let mut span = 0.0f64;
    for i in 0..anchors.len() {
        for j in (i + 1)..anchors.len() {
            span = span.max(anchors[i].distance_to(anchors[j]));
        }
    }
    span
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exact_distances(anchors: &[Position], target: Position) -> Vec<f64> {
        anchors.iter().map(|a| a.distance_to(target)).collect()
    }

    #[test]
    fn zero_residual_geometry_recovers_target() {
        let anchors =
            [Position::new(0.0, 0.0), Position::new(4.0, 0.0), Position::new(0.0, 4.0)];
        let target = Position::new(1.0, 1.0);
        let d = exact_distances(&anchors, target);
        let r = trilaterate_distances(&anchors, &d, Position::new(2.0, 2.0), None).unwrap();
        assert!(r.position.distance_to(target) < 1e-6, "got {}", r.position);
    }

    #[test]
    fn recovers_random_interior_points_exactly() {
        let anchors = [
            Position::new(0.0, 0.0),
            Position::new(6.0, 0.0),
            Position::new(6.0, 6.0),
            Position::new(0.0, 6.0),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let target =
                Position::new(0.2 + 5.6 * rng.gen::<f64>(), 0.2 + 5.6 * rng.gen::<f64>());
            let d = exact_distances(&anchors, target);
            let r =
                trilaterate_distances(&anchors, &d, Position::new(3.0, 3.0), None).unwrap();
            assert!(
                r.position.distance_to(target) < 1e-6,
                "target {target} got {}",
                r.position
            );
        }
    }

    #[test]
    fn collinear_anchors_pick_in_workspace_mirror() {
        // Anchors on the x-axis: the target and its reflection across the
        // axis produce identical distances. Brute-force both basins and
        // confirm the solver lands on the in-workspace one.
        let anchors =
            [Position::new(0.0, 0.0), Position::new(3.0, 0.0), Position::new(6.0, 0.0)];
        let ws = Workspace::new(0.0, 6.0, 0.0, 6.0).unwrap();
        let target = Position::new(2.0, 2.5);
        let mirror = Position::new(2.0, -2.5);
        let d = exact_distances(&anchors, target);
        // Both basins have zero residual.
        assert!(cost(&anchors, &d, target) < 1e-18);
        assert!(cost(&anchors, &d, mirror) < 1e-18);
        let r =
            trilaterate_distances(&anchors, &d, Position::new(3.0, 0.0), Some(&ws)).unwrap();
        assert!(r.position.distance_to(target) < 1e-6, "got {}", r.position);
    }

    #[test]
    fn descent_property_never_worse_than_init() {
        let anchors = [
            Position::new(0.0, 0.0),
            Position::new(6.0, 0.0),
            Position::new(6.0, 6.0),
            Position::new(0.0, 6.0),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            // Inconsistent noisy distances.
            let d: Vec<f64> = (0..4).map(|_| 1.0 + 7.0 * rng.gen::<f64>()).collect();
            let init = Position::new(6.0 * rng.gen::<f64>(), 6.0 * rng.gen::<f64>());
            let r = trilaterate_distances(&anchors, &d, init, None).unwrap();
            assert!(r.residual <= cost(&anchors, &d, init) + 1e-12);
        }
    }

    #[test]
    fn from_snapshot_noiseless_channel() {
        let ws = Workspace::new(0.0, 6.0, 0.0, 6.0).unwrap();
        let layout = NodeLayout::rectangular(&ws, 40.0).unwrap();
        let model = ChannelModel::default();
        let target = Position::new(4.0, 2.5);
        let readings: Vec<f64> =
            layout.positions().map(|p| model.noiseless_rssi(target.distance_to(p))).collect();
        let snap = RssiSnapshot::new(&layout, readings, 0.0, 1).unwrap();
        let r = trilaterate(&layout, &snap, &model, Some(&ws)).unwrap();
        assert!(r.position.distance_to(target) < 1e-6, "got {}", r.position);
        assert!(r.converged);
    }

    #[test]
    fn rejects_too_few_anchors() {
        let anchors = [Position::new(0.0, 0.0), Position::new(1.0, 0.0)];
        let err = trilaterate_distances(&anchors, &[1.0, 1.0], Position::new(0.0, 0.0), None);
        assert!(matches!(err, Err(BaselineError::TooFewAnchors { .. })));
    }
}
