//! Particle filter over CDOA measurements.

use nalgebra::Vector2;
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cdoa::CdoaMeasurement;
use crate::geom::{Position, Workspace};

use super::window::{cdoa_likelihood, cdoa_log_likelihood, BearingModel, MeasurementWindow};
use super::{normalize_weights, LocalizerError};

/// One weighted position hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub position: Position,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ResamplingScheme {
    /// Independent draws with replacement, proportional to weight.
    #[default]
    Multinomial,
    /// Low-variance systematic resampling.
    Systematic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParticleFilterConfig {
    pub n_particles: usize,
    /// Bearing-error standard deviation of the window likelihood, radians.
    pub sigma: f64,
    /// Number of measurements kept in the sliding window.
    pub window_capacity: usize,
    /// Spread resolution: accuracy granularity of the particle set, meters.
    pub resolution: f64,
    /// Random-walk jitter applied in the transition step, meters.
    pub motion_std: f64,
    pub resampling: ResamplingScheme,
}

impl Default for ParticleFilterConfig {
    fn default() -> Self {
        Self {
            n_particles: 200,
            sigma: 0.3,
            window_capacity: 10,
            resolution: 0.08,
            motion_std: 0.03,
            resampling: ResamplingScheme::Multinomial,
        }
    }
}

/// CDOA particle filter. Single writer; one instance per trial.
#[derive(Debug, Clone)]
pub struct ParticleFilter {
    config: ParticleFilterConfig,
    workspace: Workspace,
    bearing_model: BearingModel,
    particles: Vec<Particle>,
    window: MeasurementWindow,
    rng: ChaCha8Rng,
    reseeds: usize,
}

impl ParticleFilter {
    pub fn new(
        config: ParticleFilterConfig,
        workspace: Workspace,
        bearing_model: BearingModel,
        seed: u64,
    ) -> Result<Self, LocalizerError> {
        if config.n_particles == 0 {
            return Err(LocalizerError::NoParticles);
        }
        let window = MeasurementWindow::new(config.window_capacity, config.sigma)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let particles = spread_uniform(&workspace, config.n_particles, &mut rng);
        Ok(Self { config, workspace, bearing_model, particles, window, rng, reseeds: 0 })
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn window(&self) -> &MeasurementWindow {
        &self.window
    }

    pub fn config(&self) -> &ParticleFilterConfig {
        &self.config
    }

    /// Times the particle set was re-spread after a degenerate update.
    pub fn reseeds(&self) -> usize {
        self.reseeds
    }

    /// One filter iteration: transition, window update, weighting, estimate
    /// extraction, resampling. The estimate is the maximum-weight particle of
    /// the weighted (pre-resampling) set.
    pub fn step(
        &mut self,
        measurement: &CdoaMeasurement,
        odometry: Option<Vector2<f64>>,
    ) -> Result<Position, LocalizerError> {
        let shift = odometry.unwrap_or_else(Vector2::zeros);

        // Transition model: odometry plus Gaussian random walk, clamped to
        // the workspace.
        for p in &mut self.particles {
            let jx: f64 = self.rng.sample(StandardNormal);
            let jy: f64 = self.rng.sample(StandardNormal);
            let moved = p.position
                + shift
                + Vector2::new(jx * self.config.motion_std, jy * self.config.motion_std);
            p.position = self.workspace.clamp(moved);
        }

        self.window.push(measurement.clone(), shift);

        // Direct product weights first; fall back to the log domain shifted
        // by the max when everything underflows.
        let mut weights: Vec<f64> = self
            .particles
            .iter()
            .map(|p| cdoa_likelihood(p.position, &self.window, &self.bearing_model).unwrap_or(0.0))
            .collect();
        if weights.iter().all(|&w| w <= 0.0) {
            let logs: Vec<f64> = self
                .particles
                .iter()
                .map(|p| {
                    cdoa_log_likelihood(p.position, &self.window, &self.bearing_model)
                        .map_or(f64::NEG_INFINITY, |l| l.log_sum)
                })
                .collect();
            let max_log = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max_log.is_finite() {
                weights = logs.iter().map(|&l| (l - max_log).exp()).collect();
            } else {
                // Still degenerate: re-spread and signal no estimate.
                self.particles =
                    spread_uniform(&self.workspace, self.config.n_particles, &mut self.rng);
                self.reseeds += 1;
                return Err(LocalizerError::EstimateUnavailable);
            }
        }

        let normalized = normalize_weights(&weights)?;
        for (p, w) in self.particles.iter_mut().zip(&normalized) {
            p.weight = *w;
        }

        // Estimate before resampling so the weight information is intact.
        let best = self
            .particles
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.weight.total_cmp(&b.weight))
            .map(|(i, _)| i)
            .expect("non-empty particle set");
        let estimate = self.particles[best].position;

        self.resample(&normalized);
        Ok(estimate)
    }

    fn resample(&mut self, weights: &[f64]) {
        let n = self.config.n_particles;
        let uniform = 1.0 / n as f64;
        let indices: Vec<usize> = match self.config.resampling {
            ResamplingScheme::Multinomial => {
                let dist = WeightedIndex::new(weights).expect("normalized weights");
                (0..n).map(|_| dist.sample(&mut self.rng)).collect()
            }
            ResamplingScheme::Systematic => {
                let start: f64 = self.rng.gen::<f64>() * uniform;
                let mut indices = Vec::with_capacity(n);
                let mut cum = weights[0];
                let mut i = 0;
                for k in 0..n {
                    let target = start + k as f64 * uniform;
                    while cum < target && i + 1 < weights.len() {
                        i += 1;
                        cum += weights[i];
                    }
                    indices.push(i);
                }
                indices
            }
        };
        self.particles = indices
            .into_iter()
            .map(|i| Particle { position: self.particles[i].position, weight: uniform })
            .collect();
    }
}

fn spread_uniform(workspace: &Workspace, n: usize, rng: &mut ChaCha8Rng) -> Vec<Particle> {
    let weight = 1.0 / n as f64;
    (0..n)
        .map(|_| Particle {
            position: Position::new(
                workspace.x_min + rng.gen::<f64>() * workspace.width(),
                workspace.y_min + rng.gen::<f64>() * workspace.height(),
            ),
            weight,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Angle;

    fn measurement(angle: f64) -> CdoaMeasurement {
        CdoaMeasurement {
            timestamp: 0.0,
            angle: Angle::new(angle),
            raw_angle: Angle::new(angle),
            robot_hint: None,
        }
    }

    fn workspace6() -> Workspace {
        Workspace::new(0.0, 6.0, 0.0, 6.0).unwrap()
    }

    fn center_model() -> BearingModel {
        BearingModel::Centroid(Position::new(3.0, 3.0))
    }

    #[test]
    fn single_particle_no_jitter_returns_itself() {
        let config = ParticleFilterConfig {
            n_particles: 1,
            motion_std: 0.0,
            ..Default::default()
        };
        let mut pf =
            ParticleFilter::new(config, workspace6(), center_model(), 1).unwrap();
        let fixed = pf.particles()[0].position;
        for angle in [0.0, 1.0, -2.0] {
            let est = pf.step(&measurement(angle), None).unwrap();
            assert_eq!(est, fixed);
        }
    }

    #[test]
    fn particle_count_conserved_across_steps() {
        let config = ParticleFilterConfig { n_particles: 64, ..Default::default() };
        let mut pf =
            ParticleFilter::new(config, workspace6(), center_model(), 2).unwrap();
        for i in 0..40 {
            let _ = pf.step(&measurement(i as f64 * 0.1), Some(Vector2::new(0.05, 0.0)));
            assert_eq!(pf.particles().len(), 64);
        }
    }

    #[test]
    fn weights_normalized_after_step() {
        let config = ParticleFilterConfig { n_particles: 128, ..Default::default() };
        let mut pf =
            ParticleFilter::new(config, workspace6(), center_model(), 3).unwrap();
        pf.step(&measurement(0.4), None).unwrap();
        // After resampling weights are uniform; they still sum to one.
        let total: f64 = pf.particles().iter().map(|p| p.weight).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn particles_stay_inside_workspace() {
        let ws = workspace6();
        let config = ParticleFilterConfig {
            n_particles: 64,
            motion_std: 0.5,
            ..Default::default()
        };
        let mut pf = ParticleFilter::new(config, ws, center_model(), 4).unwrap();
        for i in 0..30 {
            let _ = pf.step(&measurement(i as f64 * 0.2), Some(Vector2::new(1.0, 1.0)));
            for p in pf.particles() {
                assert!(ws.contains(p.position), "escaped: {}", p.position);
            }
        }
    }

    #[test]
    fn multinomial_resampling_frequencies_match_weights() {
        // Selection statistics oracle: weights (0.5, 0.3, 0.2) over 1e5 draws.
        let weights = [0.5, 0.3, 0.2];
        let dist = WeightedIndex::new(weights).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let draws = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            counts[dist.sample(&mut rng)] += 1;
        }
        for (count, weight) in counts.iter().zip(weights) {
            let freq = *count as f64 / draws as f64;
            assert!((freq - weight).abs() < 0.01, "freq={freq} weight={weight}");
        }
    }

    #[test]
    fn same_seed_replays_bit_for_bit() {
        let run = |seed: u64| {
            let mut pf = ParticleFilter::new(
                ParticleFilterConfig::default(),
                workspace6(),
                center_model(),
                seed,
            )
            .unwrap();
            let mut estimates = Vec::new();
            for i in 0..25 {
                let m = measurement((i as f64 * 0.37).sin());
                if let Ok(e) = pf.step(&m, Some(Vector2::new(0.1, 0.05))) {
                    estimates.push((e.x.to_bits(), e.y.to_bits()));
                }
            }
            estimates
        };
        assert_eq!(run(77), run(77));
        assert_ne!(run(77), run(78));
    }

    #[test]
    fn scale_invariance_of_argmax() {
        // Scaling all likelihoods by a constant must not change the argmax;
        // normalize_weights preserves proportions exactly.
        let weights: Vec<f64> = (0..100).map(|i| ((i * 37 % 101) as f64) + 0.5).collect();
        let argmax = |ws: &[f64]| {
            ws.iter().enumerate().max_by(|(_, a), (_, b)| a.total_cmp(b)).map(|(i, _)| i)
        };
        let base = normalize_weights(&weights).unwrap();
        for scale in [1e-9, 0.5, 3.0, 1e9] {
            let scaled: Vec<f64> = weights.iter().map(|w| w * scale).collect();
            let normalized = normalize_weights(&scaled).unwrap();
            assert_eq!(argmax(&normalized), argmax(&base));
        }
    }

    #[test]
    fn degenerate_update_reseeds_and_reports() {
        // Quasi-static window with the candidate set collapsed onto the
        // centroid: every term is skipped, so no estimate is available.
        let config = ParticleFilterConfig {
            n_particles: 16,
            motion_std: 0.0,
            ..Default::default()
        };
        let ws = Workspace::new(3.0 - 1e-13, 3.0 + 1e-13, 3.0 - 1e-13, 3.0 + 1e-13).unwrap();
        let mut pf = ParticleFilter::new(config, ws, BearingModel::Centroid(Position::new(3.0, 3.0)), 5).unwrap();
        let err = pf.step(&measurement(0.3), None);
        assert!(matches!(err, Err(LocalizerError::EstimateUnavailable)));
        assert_eq!(pf.reseeds(), 1);
        assert_eq!(pf.particles().len(), 16);
    }
}
