//! Experiment orchestration: trajectories, seeded trials, dataset I/O,
//! metrics, and ablations. Every run is fully determined by its config and
//! seed; timings are the only non-reproducible output.

mod ablation;
mod config;
mod dataset;
mod metrics;
mod trajectory;
mod trial;

pub mod output;

pub use ablation::{ablate_particles, AblationPoint};
pub use config::{
    ExperimentConfig, Hyperparams, LayoutConfig, LikelihoodModel, Method, NodeSpec, WclMode,
};
pub use dataset::{
    ingest_dataset, write_snapshot_csv, DatasetRecord, Diagnostic, IngestedDataset,
};
pub use metrics::{compute_metrics, mean_std, render_markdown, MethodSummary};
pub use trajectory::{generate_trajectory, Trajectory, TrajectoryConfig, TrajectoryKind};
pub use trial::{replay_snapshots, run_trial, run_trials, TrialResult, WaypointOutcome};

use thiserror::Error;

use crate::baselines::BaselineError;
use crate::cdoa::CdoaError;
use crate::channel::ChannelError;
use crate::geom::GeomError;
use crate::localizers::LocalizerError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("unknown method '{0}'")]
    UnknownMethod(String),
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(String),
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("unknown node id '{0}'")]
    UnknownNode(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Cdoa(#[from] CdoaError),
    #[error(transparent)]
    Localizer(#[from] LocalizerError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

/// Replays ingested snapshots through one method, deriving odometry from
/// consecutive ground-truth positions where available (the same protocol the
/// simulated trials use).
pub fn evaluate_dataset(
    method: Method,
    layout: &crate::geom::NodeLayout,
    model: &crate::channel::ChannelModel,
    snapshots: &[(crate::channel::RssiSnapshot, Option<crate::geom::Position>)],
    hyper: &Hyperparams,
    workspace: &crate::geom::Workspace,
    seed: u64,
) -> Result<TrialResult, HarnessError> {
    replay_snapshots(method, layout, model, snapshots, hyper, workspace, seed)
}
