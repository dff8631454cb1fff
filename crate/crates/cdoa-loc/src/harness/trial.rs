//! Trial execution: walk a trajectory, sample the channel, feed a localizer,
//! record estimates and per-iteration timings.

use std::time::Instant;

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    drssi_locate, trilaterate, weighted_centroid, IrssiLocalizer, PfEkfLocalizer, WeightMode,
};
use crate::cdoa::CdoaEstimator;
use crate::channel::{ChannelModel, RssiSnapshot};
use crate::geom::{NodeLayout, Position, Workspace};
use crate::localizers::{
    BearingModel, GridLocalizer, GridLocalizerConfig, ParticleFilter, ParticleFilterConfig,
};

use super::config::{Hyperparams, LikelihoodModel, Method, WclMode};
use super::trajectory::Trajectory;
use super::HarnessError;

/// One waypoint outcome. `estimate` is `None` when the method could not
/// produce one (counted, excluded from RMSE).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaypointOutcome {
    pub truth: Position,
    pub estimate: Option<Position>,
    /// Wall-clock duration of the localizer call only, seconds.
    pub iter_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub method: String,
    pub seed: u64,
    pub estimates: Vec<WaypointOutcome>,
    pub rmse: f64,
    pub mean_tpi_seconds: f64,
    pub median_tpi_seconds: f64,
    pub missing: usize,
}

impl TrialResult {
    /// Root mean squared Euclidean error over the available estimates.
    pub fn recompute_rmse(&self) -> f64 {
        rmse_of(&self.estimates)
    }
}

fn rmse_of(estimates: &[WaypointOutcome]) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for e in estimates {
        if let Some(est) = e.estimate {
            let d = est.distance_to(e.truth);
            sum += d * d;
            n += 1;
        }
    }
    if n == 0 {
        f64::NAN
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Per-trial state of one method under test.
enum MethodState {
    CdoaPf { estimator: CdoaEstimator, filter: ParticleFilter },
    CdoaEm { estimator: CdoaEstimator, grid: GridLocalizer },
    Trilateration,
    Wcl,
    DRssi,
    IRssi(IrssiLocalizer),
    PfEkf(PfEkfLocalizer),
}

struct MethodRunner<'a> {
    method: Method,
    state: MethodState,
    layout: &'a NodeLayout,
    model: &'a ChannelModel,
    workspace: &'a Workspace,
    hyper: &'a Hyperparams,
}

impl<'a> MethodRunner<'a> {
    fn new(
        method: Method,
        layout: &'a NodeLayout,
        model: &'a ChannelModel,
        workspace: &'a Workspace,
        hyper: &'a Hyperparams,
        seed: u64,
    ) -> Result<Self, HarnessError> {
        let bearing_model = || match hyper.likelihood_model {
            LikelihoodModel::Forward => {
                BearingModel::forward(layout, *model, hyper.gradient_method)
            }
            LikelihoodModel::Centroid => BearingModel::Centroid(layout.centroid()),
            LikelihoodModel::PerAnchor => BearingModel::PerAnchor(layout.clone()),
        };
        let state = match method {
            Method::CdoaPf => MethodState::CdoaPf {
                estimator: CdoaEstimator::new(hyper.gradient_method, hyper.ewma_alpha)?
                    .with_min_gradient(hyper.min_gradient_dbm_per_m),
                filter: ParticleFilter::new(
                    ParticleFilterConfig {
                        n_particles: hyper.particles,
                        sigma: hyper.sigma,
                        window_capacity: hyper.window_capacity,
                        resolution: hyper.pf_resolution,
                        motion_std: hyper.motion_std,
                        resampling: hyper.resampling,
                    },
                    *workspace,
                    bearing_model(),
                    seed,
                )?,
            },
            Method::CdoaEm => MethodState::CdoaEm {
                estimator: CdoaEstimator::new(hyper.gradient_method, hyper.ewma_alpha)?
                    .with_min_gradient(hyper.min_gradient_dbm_per_m),
                grid: GridLocalizer::new(
                    GridLocalizerConfig {
                        resolution: hyper.em_resolution,
                        sigma: hyper.sigma,
                        window_capacity: hyper.window_capacity,
                        mode: hyper.em_mode,
                        motion_std: hyper.motion_std,
                    },
                    *workspace,
                    bearing_model(),
                )?,
            },
            Method::Trilateration => MethodState::Trilateration,
            Method::Wcl => MethodState::Wcl,
            Method::DRssi => MethodState::DRssi,
            Method::IRssi => MethodState::IRssi(IrssiLocalizer::new(
                layout,
                *model,
                hyper.baseline.irssi_top_k,
                Some(*workspace),
            )?),
            Method::PfEkf => MethodState::PfEkf(PfEkfLocalizer::new(
                hyper.baseline.pf_ekf,
                *model,
                *workspace,
                seed,
            )?),
        };
        Ok(Self { method, state, layout, model, workspace, hyper })
    }

    /// Readings drawn per waypoint before the localizer runs; channel
    /// simulation cost stays outside the timed section.
    fn sense<R: Rng>(&self, robot: Position, timestamp: f64, rng: &mut R) -> Sensed {
        match self.method {
            Method::CdoaPf | Method::CdoaEm => Sensed::Snapshot(
                self.model
                    .sample_window(
                        self.layout,
                        robot,
                        self.hyper.cdoa_rssi_window,
                        timestamp,
                        rng,
                    )
                    .expect("valid layout and window"),
            ),
            Method::IRssi => {
                let bags = self
                    .layout
                    .positions()
                    .map(|node| {
                        (0..self.hyper.baseline.irssi_bag)
                            .map(|_| self.model.rssi_at(robot, node, rng))
                            .collect()
                    })
                    .collect();
                Sensed::Bags(bags)
            }
            _ => Sensed::Snapshot(
                self.model
                    .sample_window(
                        self.layout,
                        robot,
                        self.hyper.baseline_rssi_window,
                        timestamp,
                        rng,
                    )
                    .expect("valid layout and window"),
            ),
        }
    }

    /// One localizer update. `Ok(None)` means no estimate was available.
    /// `truth_hint` is logged into the CDOA measurement tuple when ground
    /// truth is being recorded.
    fn update(
        &mut self,
        sensed: &Sensed,
        odometry: Option<Vector2<f64>>,
        truth_hint: Option<Position>,
    ) -> Result<Option<Position>, HarnessError> {
        match (&mut self.state, sensed) {
            (MethodState::CdoaPf { estimator, filter }, Sensed::Snapshot(snap)) => {
                let mut measurement = match estimator.process(self.layout, snap) {
                    Ok(m) => m,
                    Err(crate::cdoa::CdoaError::NoSignalDirection) => return Ok(None),
                    Err(e) => return Err(e.into()),
                };
                measurement.robot_hint = truth_hint;
                match filter.step(&measurement, odometry) {
                    Ok(p) => Ok(Some(p)),
                    Err(crate::localizers::LocalizerError::EstimateUnavailable) => Ok(None),
                    Err(e) => Err(e.into()),
                }
            }
            (MethodState::CdoaEm { estimator, grid }, Sensed::Snapshot(snap)) => {
                let mut measurement = match estimator.process(self.layout, snap) {
                    Ok(m) => m,
                    Err(crate::cdoa::CdoaError::NoSignalDirection) => return Ok(None),
                    Err(e) => return Err(e.into()),
                };
                measurement.robot_hint = truth_hint;
                Ok(Some(grid.step(&measurement, odometry)?))
            }
            (MethodState::Trilateration, Sensed::Snapshot(snap)) => {
                let r = trilaterate(self.layout, snap, self.model, Some(self.workspace))?;
                Ok(Some(r.position))
            }
            (MethodState::Wcl, Sensed::Snapshot(snap)) => {
                let mode = match self.hyper.wcl_mode {
                    WclMode::RawRssi => WeightMode::RawRssi,
                    WclMode::PowerMilliwatt => WeightMode::PowerMilliwatt,
                    WclMode::InverseDistance => WeightMode::InverseDistance(*self.model),
                };
                Ok(Some(weighted_centroid(self.layout, snap, mode)?.position))
            }
            (MethodState::DRssi, Sensed::Snapshot(snap)) => Ok(Some(drssi_locate(
                self.layout,
                snap,
                self.model,
                self.workspace,
                self.hyper.baseline.grid_resolution,
            )?)),
            (MethodState::IRssi(tracker), Sensed::Bags(bags)) => {
                Ok(Some(tracker.step(bags)?.position))
            }
            (MethodState::PfEkf(filter), Sensed::Snapshot(snap)) => {
                Ok(Some(filter.step(self.layout, snap)?.position))
            }
            _ => unreachable!("sensing mode always matches the method"),
        }
    }
}

enum Sensed {
    Snapshot(RssiSnapshot),
    Bags(Vec<Vec<f64>>),
}

/// Runs one method along one trajectory. Estimates are fully determined by
/// `seed`; only the timings vary between runs.
#[allow(clippy::too_many_arguments)]
pub fn run_trial(
    method: Method,
    layout: &NodeLayout,
    model: &ChannelModel,
    trajectory: &Trajectory,
    hyper: &Hyperparams,
    workspace: &Workspace,
    seed: u64,
) -> Result<TrialResult, HarnessError> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let channel_seed: u64 = master.gen();
    let method_seed: u64 = master.gen();
    let mut channel_rng = ChaCha8Rng::seed_from_u64(channel_seed);

    let mut runner = MethodRunner::new(method, layout, model, workspace, hyper, method_seed)?;
    let mut estimates = Vec::with_capacity(trajectory.waypoints.len());
    let mut missing = 0usize;
    let mut previous: Option<Position> = None;

    for (i, &truth) in trajectory.waypoints.iter().enumerate() {
        let timestamp = i as f64;
        let odometry = match (hyper.use_odometry, previous) {
            (true, Some(prev)) => Some(truth - prev),
            _ => None,
        };
        let sensed = runner.sense(truth, timestamp, &mut channel_rng);

        let started = Instant::now();
        let estimate = runner.update(&sensed, odometry, Some(truth))?;
        let iter_seconds = started.elapsed().as_secs_f64();

        if estimate.is_none() {
            missing += 1;
        }
        estimates.push(WaypointOutcome { truth, estimate, iter_seconds });
        previous = Some(truth);
    }

    let rmse = rmse_of(&estimates);
    let mut times: Vec<f64> = estimates.iter().map(|e| e.iter_seconds).collect();
    times.sort_by(f64::total_cmp);
    let mean_tpi_seconds = times.iter().sum::<f64>() / times.len() as f64;
    let median_tpi_seconds = times[times.len() / 2];

    Ok(TrialResult {
        method: method.name().to_string(),
        seed,
        estimates,
        rmse,
        mean_tpi_seconds,
        median_tpi_seconds,
        missing,
    })
}

/// Replays recorded snapshots through one method, the protocol used for
/// dataset evaluation. Odometry comes from ground-truth deltas when both
/// consecutive truths are present. Snapshots without truth still advance the
/// method state but contribute no RMSE row. For the top-k tracker each
/// recorded reading forms a single-element bag.
#[allow(clippy::too_many_arguments)]
pub fn replay_snapshots(
    method: Method,
    layout: &NodeLayout,
    model: &ChannelModel,
    snapshots: &[(RssiSnapshot, Option<Position>)],
    hyper: &Hyperparams,
    workspace: &Workspace,
    seed: u64,
) -> Result<TrialResult, HarnessError> {
    if snapshots.is_empty() {
        return Err(HarnessError::InvalidConfig("no snapshots to replay".into()));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let _channel_seed: u64 = master.gen();
    let method_seed: u64 = master.gen();
    let mut runner = MethodRunner::new(method, layout, model, workspace, hyper, method_seed)?;

    let mut estimates = Vec::new();
    let mut missing = 0usize;
    let mut previous: Option<Position> = None;
    for (snap, truth) in snapshots {
        let odometry = match (hyper.use_odometry, previous, truth) {
            (true, Some(prev), Some(t)) => Some(*t - prev),
            _ => None,
        };
        let sensed = match method {
            Method::IRssi => {
                Sensed::Bags(snap.readings().iter().map(|&r| vec![r]).collect())
            }
            _ => Sensed::Snapshot(snap.clone()),
        };
        let started = Instant::now();
        let estimate = runner.update(&sensed, odometry, *truth)?;
        let iter_seconds = started.elapsed().as_secs_f64();
        if let Some(t) = truth {
            if estimate.is_none() {
                missing += 1;
            }
            estimates.push(WaypointOutcome { truth: *t, estimate, iter_seconds });
        }
        if truth.is_some() {
            previous = *truth;
        }
    }
    if estimates.is_empty() {
        return Err(HarnessError::InvalidConfig(
            "dataset has no ground-truth rows to score against".into(),
        ));
    }

    let rmse = rmse_of(&estimates);
    let mut times: Vec<f64> = estimates.iter().map(|e| e.iter_seconds).collect();
    times.sort_by(f64::total_cmp);
    Ok(TrialResult {
        method: method.name().to_string(),
        seed,
        rmse,
        mean_tpi_seconds: times.iter().sum::<f64>() / times.len() as f64,
        median_tpi_seconds: times[times.len() / 2],
        estimates,
        missing,
    })
}

/// Runs `trials` seeds of one method in parallel (seed + 0, +1, ...).
/// Results arrive in seed order regardless of scheduling.
#[allow(clippy::too_many_arguments)]
pub fn run_trials(
    method: Method,
    layout: &NodeLayout,
    model: &ChannelModel,
    trajectory: &Trajectory,
    hyper: &Hyperparams,
    workspace: &Workspace,
    base_seed: u64,
    trials: usize,
) -> Result<Vec<TrialResult>, HarnessError> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            run_trial(
                method,
                layout,
                model,
                trajectory,
                hyper,
                workspace,
                base_seed.wrapping_add(i as u64),
            )
        })
        .collect()
}
