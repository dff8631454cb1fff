//! Particle-count ablation for the CDOA particle filter, run with and
//! without the odometry motion model.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::geom::{NodeLayout, Workspace};

use super::config::{Hyperparams, Method};
use super::trajectory::Trajectory;
use super::trial::run_trial;
use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationPoint {
    pub particles: usize,
    /// Per-seed RMSE with the odometry motion model.
    pub rmse_odometry_on: Vec<f64>,
    /// Per-seed RMSE without it.
    pub rmse_odometry_off: Vec<f64>,
}

impl AblationPoint {
    pub fn mean_on(&self) -> f64 {
        mean(&self.rmse_odometry_on)
    }

    pub fn mean_off(&self) -> f64 {
        mean(&self.rmse_odometry_off)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sweeps the particle count; every count runs `seeds` paired trials, one
/// with odometry and one without, under identical seeds.
#[allow(clippy::too_many_arguments)]
pub fn ablate_particles(
    counts: &[usize],
    layout: &NodeLayout,
    model: &ChannelModel,
    trajectory: &Trajectory,
    hyper: &Hyperparams,
    workspace: &Workspace,
    base_seed: u64,
    seeds: usize,
) -> Result<Vec<AblationPoint>, HarnessError> {
    if counts.is_empty() || counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::InvalidConfig(
            "particle counts must be non-empty and strictly ascending".into(),
        ));
    }
    counts
        .par_iter()
        .map(|&n| {
            let run = |use_odometry: bool, seed: u64| {
                let hyper = Hyperparams { particles: n, use_odometry, ..hyper.clone() };
                run_trial(Method::CdoaPf, layout, model, trajectory, &hyper, workspace, seed)
                    .map(|t| t.rmse)
            };
            let mut on = Vec::with_capacity(seeds);
            let mut off = Vec::with_capacity(seeds);
            for i in 0..seeds {
                let seed = base_seed.wrapping_add(i as u64);
                on.push(run(true, seed)?);
                off.push(run(false, seed)?);
            }
            Ok(AblationPoint { particles: n, rmse_odometry_on: on, rmse_odometry_off: off })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;
    use crate::harness::trajectory::{generate_trajectory, TrajectoryKind};

    #[test]
    fn single_count_single_seed_runs() {
        let config = ExperimentConfig::default();
        let layout = config.layout.build(&config.workspace).unwrap();
        let trajectory =
            generate_trajectory(&config.workspace, &TrajectoryKind::Diagonal, 0.5).unwrap();
        let model = ChannelModel { noise_std_dbm: 2.0, ..ChannelModel::default() };
        let points = ablate_particles(
            &[50],
            &layout,
            &model,
            &trajectory,
            &config.hyperparams,
            &config.workspace,
            1,
            1,
        )
        .unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].rmse_odometry_on.len(), 1);
        assert!(points[0].mean_on().is_finite());
    }

    #[test]
    fn rejects_unsorted_counts() {
        let config = ExperimentConfig::default();
        let layout = config.layout.build(&config.workspace).unwrap();
        let trajectory =
            generate_trajectory(&config.workspace, &TrajectoryKind::Diagonal, 0.5).unwrap();
        let err = ablate_particles(
            &[100, 50],
            &layout,
            &config.channel,
            &trajectory,
            &config.hyperparams,
            &config.workspace,
            1,
            1,
        );
        assert!(err.is_err());
    }
}
