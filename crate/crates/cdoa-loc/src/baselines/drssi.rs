//! Differential-RSSI grid search: transmit power cancels out of differences
//! against the strongest reading, so the method needs no power calibration.

use crate::channel::{ChannelModel, RssiSnapshot};
use crate::geom::{NodeLayout, Position, Workspace};
use crate::localizers::Grid;

use super::BaselineError;

/// Locates the transmitter as the grid cell whose model-predicted
/// differential readings best match the measured ones (least squares).
/// Differences are taken against the node with the strongest measured
/// reading; ties in the scan break toward the lowest (row, col) cell.
pub fn drssi_locate(
    layout: &NodeLayout,
    snap: &RssiSnapshot,
    model: &ChannelModel,
    workspace: &Workspace,
    resolution: f64,
) -> Result<Position, BaselineError> {
    if layout.len() < 2 {
        return Err(BaselineError::TooFewAnchors { needed: 2, got: layout.len() });
    }
    let grid = Grid::new(*workspace, resolution)
        .map_err(|_| BaselineError::InvalidResolution(resolution))?;

    // Reference node: strongest measured reading, lowest index on ties.
    let mut reference = 0;
    for (i, &r) in snap.readings().iter().enumerate() {
        if r > snap.reading(reference) {
            reference = i;
        }
    }
    let measured: Vec<f64> =
        snap.readings().iter().map(|r| r - snap.reading(reference)).collect();

    let anchors: Vec<Position> = layout.positions().collect();
    let mut best = Position::new(f64::NAN, f64::NAN);
    let mut best_cost = f64::INFINITY;
    for row in 0..grid.rows() {
        for col in 0..grid.cols() {
            let center = grid.cell_center(row, col);
            let ref_rssi = model.noiseless_rssi(center.distance_to(anchors[reference]));
            let mut cost = 0.0;
            for (anchor, m) in anchors.iter().zip(&measured) {
                let theory = model.noiseless_rssi(center.distance_to(*anchor)) - ref_rssi;
                cost += (theory - m) * (theory - m);
            }
            if cost < best_cost {
                best_cost = cost;
                best = center;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Workspace, NodeLayout, ChannelModel) {
        let ws = Workspace::new(0.0, 6.0, 0.0, 6.0).unwrap();
        let layout = NodeLayout::rectangular(&ws, 40.0).unwrap();
        (ws, layout, ChannelModel::default())
    }

    fn noiseless_snap(layout: &NodeLayout, model: &ChannelModel, robot: Position) -> RssiSnapshot {
        let readings =
            layout.positions().map(|p| model.noiseless_rssi(robot.distance_to(p))).collect();
        RssiSnapshot::new(layout, readings, 0.0, 1).unwrap()
    }

    #[test]
    fn exact_grid_point_is_recovered() {
        let (ws, layout, model) = setup();
        // A cell center of the 0.05 grid: (0.025 + k * 0.05).
        let target = Position::new(2.025, 3.575);
        let snap = noiseless_snap(&layout, &model, target);
        let est = drssi_locate(&layout, &snap, &model, &ws, 0.05).unwrap();
        assert!(est.distance_to(target) < 1e-9, "got {est}");
    }

    #[test]
    fn off_grid_point_snaps_to_nearest_cell() {
        let (ws, layout, model) = setup();
        let target = Position::new(2.513, 4.038);
        let snap = noiseless_snap(&layout, &model, target);
        let resolution = 0.05;
        let est = drssi_locate(&layout, &snap, &model, &ws, resolution).unwrap();
        let cell_diagonal = resolution * 2f64.sqrt();
        assert!(est.distance_to(target) <= cell_diagonal, "got {est}");
    }

    #[test]
    fn constant_offset_cancels() {
        // Shifting every reading by a constant (unknown transmit power) must
        // not change the estimate.
        let (ws, layout, model) = setup();
        let target = Position::new(1.4, 4.9);
        let snap = noiseless_snap(&layout, &model, target);
        let shifted: Vec<f64> = snap.readings().iter().map(|r| r + 17.5).collect();
        let shifted_snap = RssiSnapshot::new(&layout, shifted, 0.0, 1).unwrap();
        let a = drssi_locate(&layout, &snap, &model, &ws, 0.1).unwrap();
        let b = drssi_locate(&layout, &shifted_snap, &model, &ws, 0.1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn matches_exhaustive_scan_oracle() {
        let (ws, layout, model) = setup();
        let target = Position::new(3.713, 1.912);
        let snap = noiseless_snap(&layout, &model, target);
        let resolution = 0.25;
        let est = drssi_locate(&layout, &snap, &model, &ws, resolution).unwrap();

        // Brute-force oracle over the same lattice.
        let reference = snap
            .readings()
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.total_cmp(b))
            .map(|(i, _)| i)
            .unwrap();
        let anchors: Vec<Position> = layout.positions().collect();
        let mut best = (f64::INFINITY, Position::new(0.0, 0.0));
        let n = (6.0f64 / resolution).round() as usize;
        for row in 0..n {
            for col in 0..n {
                let p = Position::new(
                    (col as f64 + 0.5) * resolution,
                    (row as f64 + 0.5) * resolution,
                );
                let ref_theory = model.noiseless_rssi(p.distance_to(anchors[reference]));
                let mut cost = 0.0;
                for (a, &r) in anchors.iter().zip(snap.readings()) {
                    let theory = model.noiseless_rssi(p.distance_to(*a)) - ref_theory;
                    let meas = r - snap.reading(reference);
                    cost += (theory - meas) * (theory - meas);
                }
                if cost < best.0 {
                    best = (cost, p);
                }
            }
        }
        assert_eq!(est, best.1);
    }
}
