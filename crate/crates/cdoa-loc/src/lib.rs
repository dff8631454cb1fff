//! Wireless localization from collaborative direction-of-arrival (CDOA)
//! estimates.
//!
//! Static anchor nodes measure the RSSI of a mobile transmitter; the spatial
//! gradient of those readings yields a bearing from the anchor centroid to
//! the transmitter, and a particle filter or an exhaustive grid scan turns a
//! sliding window of bearings into a position estimate. The crate also ships
//! a log-distance channel simulator, five comparison localizers, coverage
//! planning formulas, and an experiment harness with deterministic seeding.
//!
//! Start with the `examples/` directory: each file exercises one capability
//! end to end. The `cdoa-loc` binary exposes the same flows as subcommands.

pub mod baselines;
pub mod channel;
pub mod cdoa;
mod cli;
pub mod coverage;
pub mod geom;
pub mod harness;
pub mod localizers;

pub use cli::run as cli_run;

pub use channel::{ChannelModel, RssiSnapshot};
pub use cdoa::{CdoaEstimator, CdoaMeasurement, GradientMethod};
pub use geom::{Angle, NodeLayout, Position, Workspace};
pub use localizers::{GridLocalizer, GridLocalizerConfig, ParticleFilter, ParticleFilterConfig};
