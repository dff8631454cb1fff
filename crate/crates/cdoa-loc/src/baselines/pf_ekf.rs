//! Particle filter over raw RSSI likelihoods feeding an extended Kalman
//! filter: the weighted particle mean is the EKF observation, and the EKF
//! carries the temporal state.

use nalgebra::{Matrix2, Vector2};
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelModel, RssiSnapshot};
use crate::geom::{NodeLayout, Position, Workspace};

use super::BaselineError;

/// Row-major 2x2 matrix as it appears in config files.
pub type Mat2 = [[f64; 2]; 2];

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

fn scaled(m: Mat2, s: f64) -> Mat2 {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

fn to_matrix(m: Mat2) -> Matrix2<f64> {
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PfEkfConfig {
    pub n_particles: usize,
    /// Random-walk jitter applied to the particles each step, meters.
    pub jitter_std: f64,
    /// Lower bound on the RSSI likelihood sigma so noiseless channels do not
    /// collapse the weights, dBm.
    pub rssi_sigma_floor: f64,
    /// State transition model.
    pub f: Mat2,
    /// Observation model.
    pub h: Mat2,
    /// Process noise covariance.
    pub q: Mat2,
    /// Observation noise covariance.
    pub r: Mat2,
    /// Initial state covariance.
    pub init_cov: Mat2,
}

impl Default for PfEkfConfig {
    fn default() -> Self {
        Self {
            n_particles: 200,
            jitter_std: 0.25,
            rssi_sigma_floor: 0.5,
            f: IDENTITY,
            h: IDENTITY,
            q: scaled(IDENTITY, 0.02),
            r: scaled(IDENTITY, 0.1),
            init_cov: IDENTITY,
        }
    }
}

impl PfEkfConfig {
    pub fn validate(&self) -> Result<(), BaselineError> {
        for m in [self.q, self.r, self.init_cov] {
            let sym = (m[0][1] - m[1][0]).abs() <= 1e-9 * (1.0 + m[0][1].abs());
            // 2x2 positive definiteness: positive diagonal and determinant.
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if !sym || m[0][0] <= 0.0 || det <= 0.0 {
                return Err(BaselineError::InvalidCovariance);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfEkfUpdate {
    pub position: Position,
    /// Set when the innovation covariance needed diagonal regularization.
    pub regularized: bool,
}

/// Stateful PF-EKF localizer; one instance per trial.
#[derive(Debug, Clone)]
pub struct PfEkfLocalizer {
    config: PfEkfConfig,
    model: ChannelModel,
    workspace: Workspace,
    particles: Vec<Position>,
    state: Option<Vector2<f64>>,
    covariance: Matrix2<f64>,
    rng: ChaCha8Rng,
}

impl PfEkfLocalizer {
    pub fn new(
        config: PfEkfConfig,
        model: ChannelModel,
        workspace: Workspace,
        seed: u64,
    ) -> Result<Self, BaselineError> {
        config.validate()?;
        if config.n_particles == 0 {
            return Err(BaselineError::TooFewAnchors { needed: 1, got: 0 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let particles = (0..config.n_particles)
            .map(|_| {
                Position::new(
                    workspace.x_min + rng.gen::<f64>() * workspace.width(),
                    workspace.y_min + rng.gen::<f64>() * workspace.height(),
                )
            })
            .collect();
        Ok(Self {
            covariance: to_matrix(config.init_cov),
            config,
            model,
            workspace,
            particles,
            state: None,
            rng,
        })
    }

    pub fn covariance(&self) -> Matrix2<f64> {
        self.covariance
    }

    /// One measurement update: weight particles by the RSSI likelihood of the
    /// snapshot, feed their weighted mean to the EKF as the observation, and
    /// return the filtered state.
    pub fn step(
        &mut self,
        layout: &NodeLayout,
        snap: &RssiSnapshot,
    ) -> Result<PfEkfUpdate, BaselineError> {
        let sigma = self.model.noise_std_dbm.max(self.config.rssi_sigma_floor);

        // Particle transition: random walk clamped to the workspace.
        for p in &mut self.particles {
            let jx: f64 = self.rng.sample(StandardNormal);
            let jy: f64 = self.rng.sample(StandardNormal);
            *p = self.workspace.clamp(Position::new(
                p.x + jx * self.config.jitter_std,
                p.y + jy * self.config.jitter_std,
            ));
        }

        // Log-domain RSSI likelihood per particle, shifted by the max.
        let anchors: Vec<Position> = layout.positions().collect();
        let logs: Vec<f64> = self
            .particles
            .iter()
            .map(|p| {
                let mut log_sum = 0.0;
                for (a, &reading) in anchors.iter().zip(snap.readings()) {
                    let predicted = self.model.noiseless_rssi(p.distance_to(*a));
                    let err = reading - predicted;
                    log_sum -= err * err / (2.0 * sigma * sigma);
                }
                log_sum
            })
            .collect();
        let max_log = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logs.iter().map(|&l| (l - max_log).exp()).collect();
        let total: f64 = weights.iter().sum();

        // PF observation: weighted mean of the particle set.
        let mut ox = 0.0;
        let mut oy = 0.0;
        for (p, w) in self.particles.iter().zip(&weights) {
            ox += p.x * w;
            oy += p.y * w;
        }
        let observation = Vector2::new(ox / total, oy / total);

        // Multinomial resampling keeps the particle cloud on the posterior.
        let dist = WeightedIndex::new(&weights).expect("positive weights");
        self.particles =
            (0..self.config.n_particles).map(|_| self.particles[dist.sample(&mut self.rng)]).collect();

        let regularized = self.ekf_update(observation);
        let state = self.state.expect("state set by ekf_update");
        Ok(PfEkfUpdate { position: Position::new(state.x, state.y), regularized })
    }

    /// Predict plus update with `observation`; returns whether the innovation
    /// covariance was regularized. Exposed so the filter recursion can be
    /// checked directly against an independent implementation.
    pub fn ekf_update(&mut self, observation: Vector2<f64>) -> bool {
        let f = to_matrix(self.config.f);
        let h = to_matrix(self.config.h);
        let q = to_matrix(self.config.q);
        let r = to_matrix(self.config.r);

        let prior = match self.state {
            // First observation initializes the state directly.
            None => {
                self.state = Some(observation);
                return false;
            }
            Some(y) => y,
        };

        // Predict.
        let predicted = f * prior;
        let predicted_cov = f * self.covariance * f.transpose() + q;

        // Update.
        let mut innovation_cov = h * predicted_cov * h.transpose() + r;
        let mut regularized = false;
        let inverse = match innovation_cov.try_inverse() {
            Some(inv) => inv,
            None => {
                innovation_cov += Matrix2::identity() * 1e-9;
                regularized = true;
                innovation_cov.try_inverse().expect("regularized covariance invertible")
            }
        };
        let gain = predicted_cov * h.transpose() * inverse;
        let state = predicted + gain * (observation - h * predicted);
        let cov = predicted_cov * (Matrix2::identity() - gain * h);
        // Keep the covariance symmetric against floating-point drift.
        self.covariance = (cov + cov.transpose()) * 0.5;
        self.state = Some(state);
        regularized
    }
}
