//! The two CDOA estimators: a particle filter and an exhaustive grid scan,
//! both driven by the Gaussian product likelihood over a sliding window of
//! bearing measurements.

mod em;
mod pf;
mod window;

pub use em::{Grid, GridLocalizer, GridLocalizerConfig, GridUpdateMode};
pub use pf::{Particle, ParticleFilter, ParticleFilterConfig, ResamplingScheme};
pub use window::{
    cdoa_likelihood, cdoa_log_likelihood, BearingModel, ForwardBearing, LogLikelihood,
    MeasurementWindow, WindowEntry,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LocalizerError {
    #[error("measurement window capacity must be at least 1")]
    ZeroCapacityWindow,
    #[error("bearing-error sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("grid resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("measurement window is empty")]
    EmptyWindow,
    #[error("every window term was skipped; candidate geometry degenerate")]
    DegenerateWindowGeometry,
    #[error("all weights are zero")]
    DegenerateWeights,
    #[error("particle filter needs at least one particle")]
    NoParticles,
    #[error("no estimate available for this update")]
    EstimateUnavailable,
}

/// Normalizes non-negative weights to sum to one, preserving proportions.
pub fn normalize_weights(weights: &[f64]) -> Result<Vec<f64>, LocalizerError> {
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 || total.is_infinite() {
        return Err(LocalizerError::DegenerateWeights);
    }
    Ok(weights.iter().map(|w| w / total).collect())
}
