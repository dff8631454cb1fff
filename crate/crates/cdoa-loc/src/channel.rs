//! Simulated radio channel: log-distance path loss with additive Gaussian
//! noise, plus the synchronized windowed-averaging step the anchor nodes
//! perform before publishing a reading.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{NodeLayout, Position};

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("path loss exponent must lie in [2, 6], got {0}")]
    InvalidPathLossExponent(f64),
    #[error("noise standard deviation must be non-negative, got {0}")]
    InvalidNoiseStd(f64),
    #[error("minimum distance clamp must be positive, got {0}")]
    InvalidMinDistance(f64),
    #[error("averaging window must contain at least one sample")]
    EmptyWindow,
    #[error("snapshot needs one reading per node: layout has {layout}, got {got}")]
    ReadingCountMismatch { layout: usize, got: usize },
    #[error("snapshot readings must be finite")]
    NonFiniteReading,
}

/// Log-distance path loss model: `rssi = A - 10 * eta * log10(d) + noise`,
/// with `A` the received power at one meter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelModel {
    /// Received signal strength at the 1 m reference distance, in dBm.
    pub ref_rssi_dbm: f64,
    /// Path loss exponent; 2 in free space, up to 6 in cluttered interiors.
    pub path_loss_exponent: f64,
    /// Standard deviation of the zero-mean Gaussian measurement noise, in dBm.
    pub noise_std_dbm: f64,
    /// Distances are clamped below this floor to keep the log finite.
    pub min_distance_m: f64,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            ref_rssi_dbm: -40.0,
            path_loss_exponent: 3.0,
            noise_std_dbm: 0.0,
            min_distance_m: 0.1,
        }
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(2.0..=6.0).contains(&self.path_loss_exponent) {
            return Err(ChannelError::InvalidPathLossExponent(self.path_loss_exponent));
        }
        if self.noise_std_dbm.is_nan() || self.noise_std_dbm < 0.0 {
            return Err(ChannelError::InvalidNoiseStd(self.noise_std_dbm));
        }
        if self.min_distance_m.is_nan() || self.min_distance_m <= 0.0 {
            return Err(ChannelError::InvalidMinDistance(self.min_distance_m));
        }
        Ok(())
    }

    /// Noise-free RSSI at `distance` meters.
    pub fn noiseless_rssi(&self, distance: f64) -> f64 {
        let d = distance.max(self.min_distance_m);
        self.ref_rssi_dbm - 10.0 * self.path_loss_exponent * d.log10()
    }

    /// One noisy RSSI reading of the transmitter at `tx` as received at `rx`.
    pub fn rssi_at<R: Rng + ?Sized>(&self, tx: Position, rx: Position, rng: &mut R) -> f64 {
        let noise: f64 = rng.sample(StandardNormal);
        self.noiseless_rssi(tx.distance_to(rx)) + noise * self.noise_std_dbm
    }

    /// Inverts the noiseless model: distance in meters for a given RSSI.
    pub fn distance_from_rssi(&self, rssi: f64) -> f64 {
        10f64.powf((self.ref_rssi_dbm - rssi) / (10.0 * self.path_loss_exponent))
    }

    /// Draws `window_len` readings per node for a transmitter at `robot` and
    /// returns their per-node arithmetic means, emulating the synchronized
    /// averaging window the nodes run before publishing.
    pub fn sample_window<R: Rng + ?Sized>(
        &self,
        layout: &NodeLayout,
        robot: Position,
        window_len: usize,
        timestamp: f64,
        rng: &mut R,
    ) -> Result<RssiSnapshot, ChannelError> {
        if window_len == 0 {
            return Err(ChannelError::EmptyWindow);
        }
        let readings = layout
            .positions()
            .map(|node| {
                let mut acc = 0.0;
                for _ in 0..window_len {
                    acc += self.rssi_at(robot, node, rng);
                }
                acc / window_len as f64
            })
            .collect();
        RssiSnapshot::new(layout, readings, timestamp, window_len)
    }
}

/// One synchronized window of averaged RSSI readings, one per layout node,
/// stored in layout node order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RssiSnapshot {
    pub timestamp: f64,
    readings: Vec<f64>,
    pub window_len: usize,
}

impl RssiSnapshot {
    pub fn new(
        layout: &NodeLayout,
        readings: Vec<f64>,
        timestamp: f64,
        window_len: usize,
    ) -> Result<Self, ChannelError> {
        if window_len == 0 {
            return Err(ChannelError::EmptyWindow);
        }
        if readings.len() != layout.len() {
            return Err(ChannelError::ReadingCountMismatch {
                layout: layout.len(),
                got: readings.len(),
            });
        }
        if readings.iter().any(|r| !r.is_finite()) {
            return Err(ChannelError::NonFiniteReading);
        }
        Ok(Self { timestamp, readings, window_len })
    }

    /// Readings in layout node order, dBm.
    pub fn readings(&self) -> &[f64] {
        &self.readings
    }

    pub fn reading(&self, node_index: usize) -> f64 {
        self.readings[node_index]
    }
}
