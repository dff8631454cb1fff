//! Comparison localizers: trilateration, weighted centroid, differential
//! RSSI grid search, top-k differential-distance tracking, and a particle
//! filter smoothed by an extended Kalman filter. All of them share the
//! RSSI-to-distance inversion from the channel model.

mod drssi;
mod irssi;
mod pf_ekf;
mod trilateration;
mod wcl;

pub use drssi::drssi_locate;
pub use irssi::{IrssiLocalizer, IrssiUpdate};
pub use pf_ekf::{Mat2, PfEkfConfig, PfEkfLocalizer, PfEkfUpdate};
pub use trilateration::{trilaterate, trilaterate_distances, TrilaterationResult};
pub use wcl::{weighted_centroid, WclResult, WeightMode};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("need at least {needed} anchors, got {got}")]
    TooFewAnchors { needed: usize, got: usize },
    #[error("anchor and distance counts differ: {anchors} vs {distances}")]
    MismatchedDistances { anchors: usize, distances: usize },
    #[error("top-k must be at least 1 and no larger than the bag size")]
    InvalidTopK,
    #[error("reading bag for node {0} is empty")]
    EmptyBag(usize),
    #[error("bag count {got} does not match layout node count {layout}")]
    MismatchedBags { layout: usize, got: usize },
    #[error("grid resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("covariance matrices must be symmetric positive definite")]
    InvalidCovariance,
}

/// Configuration shared by the baseline localizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    /// Cell edge for the differential-RSSI grid search, meters.
    pub grid_resolution: f64,
    /// Readings kept from each sorted bag in the top-k average.
    pub irssi_top_k: usize,
    /// Readings collected per node per interval for the top-k average.
    pub irssi_bag: usize,
    pub pf_ekf: PfEkfConfig,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self { grid_resolution: 0.05, irssi_top_k: 13, irssi_bag: 30, pf_ekf: PfEkfConfig::default() }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.grid_resolution.is_nan() || self.grid_resolution <= 0.0 {
            return Err(BaselineError::InvalidResolution(self.grid_resolution));
        }
        if self.irssi_top_k == 0 || self.irssi_top_k > self.irssi_bag {
            return Err(BaselineError::InvalidTopK);
        }
        self.pf_ekf.validate()
    }
}
