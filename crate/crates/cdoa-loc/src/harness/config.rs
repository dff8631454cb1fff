//! Experiment configuration: everything a run needs, serializable so the
//! effective config can be echoed next to the results and replayed.

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineConfig;
use crate::cdoa::GradientMethod;
use crate::channel::ChannelModel;
use crate::geom::{GeomError, Node, NodeLayout, Position, Workspace};
use crate::localizers::{GridUpdateMode, ResamplingScheme};

use super::trajectory::TrajectoryConfig;
use super::HarnessError;

/// A localization method runnable by the harness, keyed by its CLI name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    CdoaPf,
    CdoaEm,
    Trilateration,
    Wcl,
    DRssi,
    IRssi,
    PfEkf,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::CdoaPf,
        Method::CdoaEm,
        Method::Trilateration,
        Method::Wcl,
        Method::DRssi,
        Method::IRssi,
        Method::PfEkf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::CdoaPf => "cdoa-pf",
            Method::CdoaEm => "cdoa-em",
            Method::Trilateration => "trilateration",
            Method::Wcl => "wcl",
            Method::DRssi => "d-rssi",
            Method::IRssi => "i-rssi",
            Method::PfEkf => "pf-ekf",
        }
    }

    pub fn from_name(name: &str) -> Result<Method, HarnessError> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == name)
            .ok_or_else(|| HarnessError::UnknownMethod(name.to_string()))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Weighting mode name for the weighted-centroid method in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WclMode {
    /// The literal published formula over raw dBm readings; with negative
    /// readings it degrades toward the plain centroid, which is exactly how
    /// the method behaves in the comparison studies this harness mirrors.
    #[default]
    RawRssi,
    PowerMilliwatt,
    InverseDistance,
}

/// Expected-bearing model used by the window likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LikelihoodModel {
    /// Predict the bearing the gradient pipeline itself would measure at a
    /// candidate; compensates the finite-difference distortion.
    #[default]
    Forward,
    /// Geometric bearing from the anchor centroid.
    Centroid,
    /// One term per anchor (experimental).
    PerAnchor,
}

/// Estimator and sampling knobs, one flat section in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    /// Particle count for CDOA-PF.
    pub particles: usize,
    /// Bearing-error standard deviation of the window likelihood, radians.
    pub sigma: f64,
    /// Sliding-window capacity (measurements kept).
    pub window_capacity: usize,
    /// CDOA-PF spread resolution, meters.
    pub pf_resolution: f64,
    /// CDOA-EM grid resolution, meters.
    pub em_resolution: f64,
    /// CDOA-PF transition jitter, meters.
    pub motion_std: f64,
    /// EWMA smoothing factor for CDOA bearings.
    pub ewma_alpha: f64,
    pub gradient_method: GradientMethod,
    /// Feed ground-truth step displacements to the estimators as odometry.
    pub use_odometry: bool,
    /// Readings averaged per snapshot by the CDOA collaboration window.
    pub cdoa_rssi_window: usize,
    /// Readings per snapshot for the baseline methods (they consume raw
    /// RSSI; the published comparisons give them single draws).
    pub baseline_rssi_window: usize,
    pub resampling: ResamplingScheme,
    /// Gradients weaker than this (dBm/m) are skipped as direction-free.
    pub min_gradient_dbm_per_m: f64,
    pub em_mode: GridUpdateMode,
    pub likelihood_model: LikelihoodModel,
    pub wcl_mode: WclMode,
    pub baseline: BaselineConfig,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            particles: 200,
            sigma: 0.3,
            window_capacity: 10,
            pf_resolution: 0.08,
            em_resolution: 0.05,
            motion_std: 0.03,
            ewma_alpha: 0.7,
            gradient_method: GradientMethod::Rect4,
            use_odometry: true,
            cdoa_rssi_window: 20,
            baseline_rssi_window: 1,
            resampling: ResamplingScheme::Multinomial,
            min_gradient_dbm_per_m: 0.0,
            em_mode: GridUpdateMode::BayesFilter,
            likelihood_model: LikelihoodModel::Forward,
            wcl_mode: WclMode::RawRssi,
            baseline: BaselineConfig::default(),
        }
    }
}

/// Anchor layout: either the workspace corners or explicit nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LayoutConfig {
    Corners { sensing_range: f64 },
    Explicit { sensing_range: f64, nodes: Vec<NodeSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig::Corners { sensing_range: 40.0 }
    }
}

impl LayoutConfig {
    pub fn build(&self, workspace: &Workspace) -> Result<NodeLayout, GeomError> {
        match self {
            LayoutConfig::Corners { sensing_range } => {
                NodeLayout::rectangular(workspace, *sensing_range)
            }
            LayoutConfig::Explicit { sensing_range, nodes } => {
                let nodes = nodes
                    .iter()
                    .map(|n| Node { id: n.id.clone(), position: Position::new(n.x, n.y) })
                    .collect();
                NodeLayout::new(nodes, *sensing_range)
            }
        }
    }
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub workspace: Workspace,
    pub layout: LayoutConfig,
    pub channel: ChannelModel,
    /// Method name, or "all" for every registered method.
    pub method: String,
    pub hyperparams: Hyperparams,
    pub trajectory: TrajectoryConfig,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            workspace: Workspace::new(0.0, 6.0, 0.0, 6.0).expect("static bounds"),
            layout: LayoutConfig::default(),
            channel: ChannelModel { noise_std_dbm: 2.0, ..ChannelModel::default() },
            method: "cdoa-pf".to_string(),
            hyperparams: Hyperparams::default(),
            trajectory: TrajectoryConfig::default(),
            trials: 20,
            seed: 42,
        }
    }
}

impl ExperimentConfig {
    /// Desk-scale preset matching the hardware testbed footprint
    /// (2.34 m x 1.75 m; its published error figures quote a nominal 4 m^2
    /// region, slightly larger than the testbed itself).
    pub fn hardware_scale() -> Self {
        Self {
            workspace: Workspace::new(0.0, 2.34, 0.0, 1.75).expect("static bounds"),
            trajectory: super::trajectory::TrajectoryConfig {
                kind: super::trajectory::TrajectoryKind::Diagonal,
                step: 0.1,
            },
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        // Workspace arrives via serde, so its invariant is re-checked here.
        Workspace::new(
            self.workspace.x_min,
            self.workspace.x_max,
            self.workspace.y_min,
            self.workspace.y_max,
        )?;
        self.channel.validate()?;
        self.layout.build(&self.workspace)?;
        self.hyperparams.baseline.validate()?;
        if self.trials == 0 {
            return Err(HarnessError::InvalidConfig("trials must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.hyperparams.ewma_alpha) {
            return Err(HarnessError::InvalidConfig(format!(
                "ewma_alpha must lie in [0, 1], got {}",
                self.hyperparams.ewma_alpha
            )));
        }
        let methods = self.methods()?;
        if methods.is_empty() {
            return Err(HarnessError::InvalidConfig("no method selected".into()));
        }
        Ok(())
    }

    /// Methods selected by the `method` field ("all" expands the registry).
    pub fn methods(&self) -> Result<Vec<Method>, HarnessError> {
        if self.method == "all" {
            Ok(Method::ALL.to_vec())
        } else {
            Ok(vec![Method::from_name(&self.method)?])
        }
    }
}
