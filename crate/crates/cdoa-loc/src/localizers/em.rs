//! Grid localizer over CDOA measurements. Deterministic; ties break toward
//! the lowest (row, col) index.
//!
//! Two update modes share the grid and the argmax extraction:
//!
//! * [`GridUpdateMode::WindowScan`] re-evaluates the sliding-window product
//!   likelihood at every cell, fresh each step. Memoryless beyond the
//!   window.
//! * [`GridUpdateMode::BayesFilter`] keeps the cell weights as a persistent
//!   posterior: each step shifts them by the odometry displacement, diffuses
//!   them by the motion uncertainty, and multiplies in the newest
//!   measurement's bearing density. The persistent prior carries range
//!   information across stretches where a bearing-only update is flat (for
//!   example radial motion, where every cell along the measured ray scores
//!   identically).

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::cdoa::CdoaMeasurement;
use crate::geom::{Position, Workspace};

use super::window::{cdoa_likelihood, cdoa_log_likelihood, BearingModel, MeasurementWindow};
use super::LocalizerError;

/// Dense cell-centered grid tiling a workspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    workspace: Workspace,
    resolution: f64,
    nx: usize,
    ny: usize,
}

impl Grid {
    pub fn new(workspace: Workspace, resolution: f64) -> Result<Self, LocalizerError> {
        if resolution.is_nan() || resolution <= 0.0 {
            return Err(LocalizerError::InvalidResolution(resolution));
        }
        Ok(Self {
            workspace,
            resolution,
            nx: cells_along(workspace.width(), resolution),
            ny: cells_along(workspace.height(), resolution),
        })
    }

    pub fn rows(&self) -> usize {
        self.ny
    }

    pub fn cols(&self) -> usize {
        self.nx
    }

    pub fn num_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Center of the cell at (row, col); rows index y, cols index x.
    pub fn cell_center(&self, row: usize, col: usize) -> Position {
        Position::new(
            self.workspace.x_min + (col as f64 + 0.5) * self.resolution,
            self.workspace.y_min + (row as f64 + 0.5) * self.resolution,
        )
    }
}

/// Number of `resolution`-sized cells covering `extent`, tiling exactly when
/// the extent is an integer multiple of the resolution.
fn cells_along(extent: f64, resolution: f64) -> usize {
    let ratio = extent / resolution;
    let cells = if (ratio - ratio.round()).abs() < 1e-6 { ratio.round() } else { ratio.ceil() };
    (cells as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GridUpdateMode {
    #[default]
    BayesFilter,
    WindowScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridLocalizerConfig {
    /// Cell edge length, meters.
    pub resolution: f64,
    /// Bearing-error standard deviation of the measurement density, radians.
    pub sigma: f64,
    /// Sliding-window capacity (used by the window-scan mode).
    pub window_capacity: usize,
    pub mode: GridUpdateMode,
    /// Per-step diffusion of the persistent posterior, meters.
    pub motion_std: f64,
}

impl Default for GridLocalizerConfig {
    fn default() -> Self {
        Self {
            resolution: 0.05,
            sigma: 0.3,
            window_capacity: 10,
            mode: GridUpdateMode::BayesFilter,
            motion_std: 0.03,
        }
    }
}

/// Exhaustive grid localizer over CDOA measurements. No randomness:
/// identical inputs produce identical estimates bit for bit.
#[derive(Debug, Clone)]
pub struct GridLocalizer {
    grid: Grid,
    config: GridLocalizerConfig,
    bearing_model: BearingModel,
    window: MeasurementWindow,
    weights: Vec<f64>,
    scratch: Vec<f64>,
    /// Sub-cell odometry not yet applied as an integer shift.
    shift_residual: Vector2<f64>,
    has_measurement: bool,
}

impl GridLocalizer {
    pub fn new(
        config: GridLocalizerConfig,
        workspace: Workspace,
        bearing_model: BearingModel,
    ) -> Result<Self, LocalizerError> {
        let grid = Grid::new(workspace, config.resolution)?;
        let window = MeasurementWindow::new(config.window_capacity, config.sigma)?;
        let uniform = 1.0 / grid.num_cells() as f64;
        Ok(Self {
            weights: vec![uniform; grid.num_cells()],
            scratch: vec![0.0; grid.num_cells()],
            grid,
            config,
            bearing_model,
            window,
            shift_residual: Vector2::zeros(),
            has_measurement: false,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn window(&self) -> &MeasurementWindow {
        &self.window
    }

    /// Cell weights after the latest update, row-major.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// One update with the newest measurement and the displacement since the
    /// previous one.
    pub fn step(
        &mut self,
        measurement: &CdoaMeasurement,
        odometry: Option<Vector2<f64>>,
    ) -> Result<Position, LocalizerError> {
        let shift = odometry.unwrap_or_else(Vector2::zeros);
        self.window.push(measurement.clone(), shift);
        self.has_measurement = true;
        match self.config.mode {
            GridUpdateMode::WindowScan => self.scan(),
            GridUpdateMode::BayesFilter => {
                self.shift_posterior(shift);
                self.diffuse();
                self.multiply_measurement(measurement);
                Ok(self.argmax())
            }
        }
    }

    /// Window-scan update: evaluates the window likelihood at every cell
    /// center and returns the argmax cell center.
    pub fn scan(&mut self) -> Result<Position, LocalizerError> {
        if self.window.is_empty() {
            return Err(LocalizerError::EmptyWindow);
        }
        for row in 0..self.grid.rows() {
            for col in 0..self.grid.cols() {
                let center = self.grid.cell_center(row, col);
                self.weights[row * self.grid.cols() + col] =
                    cdoa_likelihood(center, &self.window, &self.bearing_model).unwrap_or(0.0);
            }
        }
        Ok(self.argmax())
    }

    fn argmax(&self) -> Position {
        let mut best = (0usize, 0usize);
        let mut best_weight = f64::NEG_INFINITY;
        for row in 0..self.grid.rows() {
            for col in 0..self.grid.cols() {
                let w = self.weights[row * self.grid.cols() + col];
                if w > best_weight {
                    best_weight = w;
                    best = (row, col);
                }
            }
        }
        self.grid.cell_center(best.0, best.1)
    }

    /// Translates the posterior by the accumulated odometry, whole cells at
    /// a time; the sub-cell remainder stays pending and is covered by the
    /// diffusion step. Mass shifted past the boundary is dropped (the robot
    /// cannot leave the workspace).
    fn shift_posterior(&mut self, displacement: Vector2<f64>) {
        self.shift_residual += displacement;
        let shift_cols = (self.shift_residual.x / self.grid.resolution()).trunc() as isize;
        let shift_rows = (self.shift_residual.y / self.grid.resolution()).trunc() as isize;
        if shift_cols == 0 && shift_rows == 0 {
            return;
        }
        self.shift_residual.x -= shift_cols as f64 * self.grid.resolution();
        self.shift_residual.y -= shift_rows as f64 * self.grid.resolution();

        let (rows, cols) = (self.grid.rows() as isize, self.grid.cols() as isize);
        self.scratch.fill(0.0);
        for row in 0..rows {
            let src_row = row - shift_rows;
            if src_row < 0 || src_row >= rows {
                continue;
            }
            for col in 0..cols {
                let src_col = col - shift_cols;
                if src_col < 0 || src_col >= cols {
                    continue;
                }
                self.scratch[(row * cols + col) as usize] =
                    self.weights[(src_row * cols + src_col) as usize];
            }
        }
        std::mem::swap(&mut self.weights, &mut self.scratch);
        self.renormalize();
    }

    /// Separable 3-tap blur approximating Gaussian motion noise of
    /// `motion_std` meters per step; repeated when one pass cannot carry the
    /// variance.
    fn diffuse(&mut self) {
        let var_cells =
            (self.config.motion_std / self.grid.resolution()).powi(2).max(0.0);
        if var_cells == 0.0 {
            return;
        }
        // One [a, 1-2a, a] pass has variance 2a <= 0.9.
        let passes = (var_cells / 0.9).ceil().max(1.0) as usize;
        let a = (var_cells / passes as f64) / 2.0;
        for _ in 0..passes {
            self.blur_pass(a);
        }
    }

    fn blur_pass(&mut self, a: f64) {
        let rows = self.grid.rows();
        let cols = self.grid.cols();
        let center = 1.0 - 2.0 * a;
        // Horizontal.
        for row in 0..rows {
            let base = row * cols;
            for col in 0..cols {
                let mid = self.weights[base + col] * center;
                let left = if col > 0 { self.weights[base + col - 1] * a } else { 0.0 };
                let right =
                    if col + 1 < cols { self.weights[base + col + 1] * a } else { 0.0 };
                self.scratch[base + col] = mid + left + right;
            }
        }
        std::mem::swap(&mut self.weights, &mut self.scratch);
        // Vertical.
        for row in 0..rows {
            let base = row * cols;
            for col in 0..cols {
                let mid = self.weights[base + col] * center;
                let below =
                    if row > 0 { self.weights[base - cols + col] * a } else { 0.0 };
                let above = if row + 1 < rows {
                    self.weights[base + cols + col] * a
                } else {
                    0.0
                };
                self.scratch[base + col] = mid + below + above;
            }
        }
        std::mem::swap(&mut self.weights, &mut self.scratch);
        self.renormalize();
    }

    /// Multiplies the newest measurement's bearing density into the
    /// posterior. Cells with no defined expected bearing keep their prior
    /// mass (the measurement says nothing about them).
    fn multiply_measurement(&mut self, measurement: &CdoaMeasurement) {
        let mut one_shot = MeasurementWindow::new(1, self.window.sigma())
            .expect("validated at construction");
        one_shot.push(measurement.clone(), Vector2::zeros());
        for row in 0..self.grid.rows() {
            for col in 0..self.grid.cols() {
                let center = self.grid.cell_center(row, col);
                let idx = row * self.grid.cols() + col;
                if let Ok(ll) = cdoa_log_likelihood(center, &one_shot, &self.bearing_model) {
                    if ll.terms_used > 0 {
                        self.weights[idx] *= ll.log_sum.exp();
                    }
                }
            }
        }
        self.renormalize();
    }

    fn renormalize(&mut self) {
        let total: f64 = self.weights.iter().sum();
        if total > 0.0 && total.is_finite() {
            let inv = 1.0 / total;
            for w in &mut self.weights {
                *w *= inv;
            }
        } else {
            // Posterior collapsed (all mass shifted out or underflowed);
            // restart from uniform.
            let uniform = 1.0 / self.weights.len() as f64;
            self.weights.fill(uniform);
        }
    }
}
