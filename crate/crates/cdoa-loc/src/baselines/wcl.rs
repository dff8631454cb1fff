//! Weighted centroid localization.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelModel, RssiSnapshot};
use crate::geom::{NodeLayout, Position};

use super::BaselineError;

/// How anchor weights are derived from the readings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// dBm converted to milliwatts, `10^(rssi/10)`: stronger signal, larger
    /// weight.
    #[default]
    PowerMilliwatt,
    /// The textbook formula `w_i = rssi_i / sum(rssi)` applied to the raw dBm
    /// values. With negative readings this inverts the intended weighting and
    /// collapses toward the plain centroid; kept for faithful comparison.
    RawRssi,
    /// Reciprocal of the model-inverted distance.
    InverseDistance(ChannelModel),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WclResult {
    pub position: Position,
    /// Set when the weights summed to zero and the plain centroid was used.
    pub degenerate: bool,
}

/// Weighted average of the anchor positions.
pub fn weighted_centroid(
    layout: &NodeLayout,
    snap: &RssiSnapshot,
    mode: WeightMode,
) -> Result<WclResult, BaselineError> {
    if layout.is_empty() {
        return Err(BaselineError::TooFewAnchors { needed: 1, got: 0 });
    }
    let weights: Vec<f64> = snap
        .readings()
        .iter()
        .map(|&r| match mode {
            WeightMode::PowerMilliwatt => 10f64.powf(r / 10.0),
            WeightMode::RawRssi => r,
            WeightMode::InverseDistance(model) => {
                1.0 / model.distance_from_rssi(r).max(model.min_distance_m)
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if total.abs() < 1e-300 || !total.is_finite() {
        return Ok(WclResult { position: layout.centroid(), degenerate: true });
    }
    let mut x = 0.0;
    let mut y = 0.0;
    for (p, w) in layout.positions().zip(&weights) {
        x += p.x * w;
        y += p.y * w;
    }
    Ok(WclResult { position: Position::new(x / total, y / total), degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Workspace;
    use approx::assert_abs_diff_eq;

    fn layout6() -> NodeLayout {
        NodeLayout::rectangular(&Workspace::new(0.0, 6.0, 0.0, 6.0).unwrap(), 40.0).unwrap()
    }

    fn snap(layout: &NodeLayout, readings: Vec<f64>) -> RssiSnapshot {
        RssiSnapshot::new(layout, readings, 0.0, 1).unwrap()
    }

    #[test]
    fn equal_readings_give_plain_centroid() {
        let layout = layout6();
        for mode in [WeightMode::PowerMilliwatt, WeightMode::RawRssi] {
            let r = weighted_centroid(&layout, &snap(&layout, vec![-55.0; 4]), mode).unwrap();
            assert_abs_diff_eq!(r.position.x, 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.position.y, 3.0, epsilon = 1e-12);
            assert!(!r.degenerate);
        }
    }

    #[test]
    fn dominant_weight_pulls_to_that_node() {
        let layout = layout6();
        // Node 3 (NE) is at least 1e6 times heavier in milliwatt space.
        let s = snap(&layout, vec![-100.0, -100.0, -30.0, -100.0]);
        let r = weighted_centroid(&layout, &s, WeightMode::PowerMilliwatt).unwrap();
        assert!(r.position.distance_to(Position::new(6.0, 6.0)) < 1e-3);
    }

    #[test]
    fn matches_hand_evaluated_weighted_sum() {
        let layout = layout6();
        let model = ChannelModel::default();
        let robot = Position::new(4.0, 3.0);
        let readings: Vec<f64> =
            layout.positions().map(|p| model.noiseless_rssi(robot.distance_to(p))).collect();
        let weights: Vec<f64> = readings.iter().map(|&r| 10f64.powf(r / 10.0)).collect();
        let total: f64 = weights.iter().sum();
        let ex = layout.positions().zip(&weights).map(|(p, w)| p.x * w).sum::<f64>() / total;
        let ey = layout.positions().zip(&weights).map(|(p, w)| p.y * w).sum::<f64>() / total;
        let r =
            weighted_centroid(&layout, &snap(&layout, readings), WeightMode::PowerMilliwatt)
                .unwrap();
        assert_abs_diff_eq!(r.position.x, ex, epsilon = 1e-12);
        assert_abs_diff_eq!(r.position.y, ey, epsilon = 1e-12);
    }

    #[test]
    fn zero_total_weight_degenerates_to_centroid() {
        let layout = layout6();
        // Raw readings summing to zero.
        let s = snap(&layout, vec![10.0, -10.0, 5.0, -5.0]);
        let r = weighted_centroid(&layout, &s, WeightMode::RawRssi).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.position, layout.centroid());
    }

    #[test]
    fn output_stays_in_convex_hull() {
        let layout = layout6();
        let modes = [
            WeightMode::PowerMilliwatt,
            WeightMode::InverseDistance(ChannelModel::default()),
        ];
        for mode in modes {
            for readings in [
                vec![-30.0, -90.0, -60.0, -45.0],
                vec![-80.0, -20.0, -75.0, -72.0],
                vec![-55.0, -54.0, -53.0, -52.0],
            ] {
                let r = weighted_centroid(&layout, &snap(&layout, readings), mode).unwrap();
                assert!(r.position.x >= 0.0 && r.position.x <= 6.0);
                assert!(r.position.y >= 0.0 && r.position.y <= 6.0);
            }
        }
    }
}
