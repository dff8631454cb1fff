//! Sliding window of recent CDOA measurements and the Gaussian product
//! likelihood evaluated against it.
//!
//! Each window entry records the cumulative robot displacement at measurement
//! time. To score a candidate position, the candidate is back-propagated
//! through those displacements so every stored bearing is compared at the
//! geometry where it was taken; with no odometry the displacements are zero
//! and the robot is treated as quasi-static over the window.

use std::collections::VecDeque;

use nalgebra::Vector2;

use crate::cdoa::{cdoa_from_gradient, gradient, CdoaMeasurement, GradientMethod};
use crate::channel::{ChannelModel, RssiSnapshot};
use crate::geom::{angular_error, Angle, NodeLayout, Position};

use super::LocalizerError;

const SQRT_TAU: f64 = 2.5066282746310002; // sqrt(2*pi)

/// How the expected bearing of a candidate position is predicted.
#[derive(Debug, Clone)]
pub enum BearingModel {
    /// Geometric bearing from the anchor centroid to the candidate.
    Centroid(Position),
    /// The bearing the gradient pipeline itself would report for a noiseless
    /// transmitter at the candidate. Matches the measurement's
    /// finite-difference distortion, so a noiseless measurement scores its
    /// own position with zero error everywhere in the workspace.
    Forward(ForwardBearing),
    /// One error term per anchor, each against the bearing from that anchor
    /// to the candidate. Experimental alternative; not validated.
    PerAnchor(NodeLayout),
}

impl BearingModel {
    pub fn forward(layout: &NodeLayout, model: ChannelModel, method: GradientMethod) -> Self {
        BearingModel::Forward(ForwardBearing::new(layout, model, method))
    }
}

/// Forward predictor of the gradient-pipeline bearing at a position.
#[derive(Debug, Clone)]
pub struct ForwardBearing {
    layout: NodeLayout,
    model: ChannelModel,
    method: GradientMethod,
    rect4_fast: bool,
}

impl ForwardBearing {
    pub fn new(layout: &NodeLayout, model: ChannelModel, method: GradientMethod) -> Self {
        let rect4_fast =
            layout.is_canonical_rectangle() && matches!(method, GradientMethod::Rect4);
        Self { layout: layout.clone(), model, method, rect4_fast }
    }

    /// Bearing predicted at `p`; `None` where the gradient vanishes.
    pub fn bearing(&self, p: Position) -> Option<f64> {
        if self.rect4_fast {
            // The reference power cancels in the differences; work with
            // squared distances to avoid the square roots.
            let half_eta = 5.0 * self.model.path_loss_exponent;
            let min_sq = self.model.min_distance_m * self.model.min_distance_m;
            let nodes = self.layout.nodes();
            let mut t = [0.0f64; 4];
            for (i, node) in nodes.iter().enumerate() {
                let dx = p.x - node.position.x;
                let dy = p.y - node.position.y;
                let d_sq = (dx * dx + dy * dy).max(min_sq);
                t[i] = -half_eta * d_sq.log10();
            }
            let two_dx = 2.0 * self.layout.delta_x();
            let two_dy = 2.0 * self.layout.delta_y();
            let gx = (t[2] - t[1]) / two_dx + (t[3] - t[0]) / two_dx;
            let gy = (t[1] - t[0]) / two_dy + (t[2] - t[3]) / two_dy;
            if gx == 0.0 && gy == 0.0 {
                return None;
            }
            return Some(gy.atan2(gx));
        }
        let readings: Vec<f64> = self
            .layout
            .positions()
            .map(|node| self.model.noiseless_rssi(p.distance_to(node)))
            .collect();
        let snap = RssiSnapshot::new(&self.layout, readings, 0.0, 1).ok()?;
        let g = gradient(&self.layout, &snap, self.method).ok()?;
        cdoa_from_gradient(g).ok().map(|a| a.radians())
    }
}

#[derive(Debug, Clone)]
pub struct WindowEntry {
    pub measurement: CdoaMeasurement,
    /// Total robot displacement accumulated up to this measurement.
    pub cumulative_displacement: Vector2<f64>,
}

/// FIFO window of at most `capacity` measurements, oldest first.
#[derive(Debug, Clone)]
pub struct MeasurementWindow {
    entries: VecDeque<WindowEntry>,
    capacity: usize,
    sigma: f64,
    cumulative: Vector2<f64>,
}

impl MeasurementWindow {
    pub fn new(capacity: usize, sigma: f64) -> Result<Self, LocalizerError> {
        if capacity == 0 {
            return Err(LocalizerError::ZeroCapacityWindow);
        }
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(LocalizerError::InvalidSigma(sigma));
        }
        Ok(Self {
            entries: VecDeque::with_capacity(capacity),
            capacity,
            sigma,
            cumulative: Vector2::zeros(),
        })
    }

    /// Appends a measurement taken after moving by `displacement`; evicts the
    /// oldest entry once the capacity is reached.
    pub fn push(&mut self, measurement: CdoaMeasurement, displacement: Vector2<f64>) {
        self.cumulative += displacement;
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(WindowEntry {
            measurement,
            cumulative_displacement: self.cumulative,
        });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn entries(&self) -> impl Iterator<Item = &WindowEntry> {
        self.entries.iter()
    }

    pub fn latest_cumulative_displacement(&self) -> Vector2<f64> {
        self.entries.back().map_or(Vector2::zeros(), |e| e.cumulative_displacement)
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.cumulative = Vector2::zeros();
    }
}

/// Per-term breakdown of a log-domain likelihood evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikelihood {
    /// Sum of per-term log densities; `-inf` when no term contributed.
    pub log_sum: f64,
    pub terms_used: usize,
    /// Terms whose back-propagated candidate had no defined expected bearing.
    pub terms_skipped: usize,
}

/// Product of Gaussian bearing-error densities over the window, evaluated at
/// `candidate`. One factor per stored measurement (one per anchor and
/// measurement for the per-anchor model): the error is the wrapped
/// difference between the stored bearing and the bearing `model` expects at
/// the candidate back-propagated to that measurement's geometry.
pub fn cdoa_likelihood(
    candidate: Position,
    window: &MeasurementWindow,
    model: &BearingModel,
) -> Result<f64, LocalizerError> {
    if window.is_empty() {
        return Err(LocalizerError::EmptyWindow);
    }
    let sigma = window.sigma();
    let coeff = 1.0 / (sigma * SQRT_TAU);
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    let latest = window.latest_cumulative_displacement();
    let mut product = 1.0;
    let mut used = 0;
    for entry in window.entries() {
        let historical = candidate - (latest - entry.cumulative_displacement);
        for_each_error(model, historical, entry.measurement.angle, |err| {
            product *= coeff * (-err * err * inv_two_sigma_sq).exp();
            used += 1;
        });
    }
    if used == 0 {
        return Err(LocalizerError::DegenerateWindowGeometry);
    }
    Ok(product)
}

/// Log-domain counterpart of [`cdoa_likelihood`]; robust to underflow.
pub fn cdoa_log_likelihood(
    candidate: Position,
    window: &MeasurementWindow,
    model: &BearingModel,
) -> Result<LogLikelihood, LocalizerError> {
    if window.is_empty() {
        return Err(LocalizerError::EmptyWindow);
    }
    let sigma = window.sigma();
    let log_coeff = -(sigma * SQRT_TAU).ln();
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    let latest = window.latest_cumulative_displacement();
    let mut log_sum = 0.0;
    let mut used = 0;
    let mut skipped = 0;
    for entry in window.entries() {
        let historical = candidate - (latest - entry.cumulative_displacement);
        let before = used;
        for_each_error(model, historical, entry.measurement.angle, |err| {
            log_sum += log_coeff - err * err * inv_two_sigma_sq;
            used += 1;
        });
        if used == before {
            skipped += 1;
        }
    }
    if used == 0 {
        log_sum = f64::NEG_INFINITY;
    }
    Ok(LogLikelihood { log_sum, terms_used: used, terms_skipped: skipped })
}

/// Invokes `emit` with each defined bearing error of `historical` against
/// the measured angle; undefined expectations produce no call.
fn for_each_error<F: FnMut(f64)>(
    model: &BearingModel,
    historical: Position,
    measured: Angle,
    mut emit: F,
) {
    match model {
        BearingModel::Centroid(centroid) => {
            let dx = historical.x - centroid.x;
            let dy = historical.y - centroid.y;
            if dx.hypot(dy) >= 1e-12 {
                let expected = dy.atan2(dx);
                emit(angular_error(measured, Angle::new(expected)));
            }
        }
        BearingModel::Forward(forward) => {
            if let Some(expected) = forward.bearing(historical) {
                emit(angular_error(measured, Angle::new(expected)));
            }
        }
        BearingModel::PerAnchor(layout) => {
            for node in layout.positions() {
                let dx = historical.x - node.x;
                let dy = historical.y - node.y;
                if dx.hypot(dy) >= 1e-12 {
                    let expected = dy.atan2(dx);
                    emit(angular_error(measured, Angle::new(expected)));
                }
            }
        }
    }
}
