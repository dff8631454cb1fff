//! Collaborative direction-of-arrival estimation from one RSSI snapshot.
//!
//! The anchor readings are treated as samples of the radio field; a central
//! finite difference (or least-squares plane fit) gives the field gradient,
//! whose direction is the bearing from the layout centroid to the
//! transmitter. Since RSSI grows toward the transmitter, the gradient points
//! at the robot.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::RssiSnapshot;
use crate::geom::{ewma_angle, Angle, GeomError, NodeLayout, Position};

#[derive(Debug, Error, PartialEq)]
pub enum CdoaError {
    #[error("rectangular gradient needs a canonical 4-node rectangle layout")]
    NotRectangular,
    #[error("no node within tolerance of offset corner ({0:.3}, {1:.3})")]
    UnresolvedOffset(f64, f64),
    #[error("least-squares gradient needs at least 3 non-collinear nodes")]
    CollinearNodes,
    #[error("gradient is zero; signal direction undefined")]
    NoSignalDirection,
    #[error("gradient is not finite")]
    NonFiniteGradient,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Spatial gradient of the RSSI field, in dBm per meter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RssiGradient {
    pub x: f64,
    pub y: f64,
}

/// How the gradient is extracted from a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMethod {
    /// Central finite difference on the canonical 4-corner rectangle.
    #[default]
    Rect4,
    /// Offset-corner finite difference; equals `Rect4` on rectangles.
    General,
    /// Least-squares plane fit, usable on any non-collinear layout.
    LeastSquares,
}

impl std::fmt::Display for GradientMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GradientMethod::Rect4 => write!(f, "rect4"),
            GradientMethod::General => write!(f, "general"),
            GradientMethod::LeastSquares => write!(f, "lsq"),
        }
    }
}

/// Central finite difference over the canonical SW, NW, NE, SE corner order.
pub fn gradient_rect4(
    layout: &NodeLayout,
    snap: &RssiSnapshot,
) -> Result<RssiGradient, CdoaError> {
    if !layout.is_canonical_rectangle() {
        return Err(CdoaError::NotRectangular);
    }
    let s = snap.readings();
    let (sw, nw, ne, se) = (s[0], s[1], s[2], s[3]);
    let two_dx = 2.0 * layout.delta_x();
    let two_dy = 2.0 * layout.delta_y();
    finite(RssiGradient {
        x: (ne - nw) / two_dx + (se - sw) / two_dx,
        y: (nw - sw) / two_dy + (ne - se) / two_dy,
    })
}

/// Finite difference over the four offset corners `(xc +- dx/2, yc +- dy/2)`,
/// resolving each corner to the nearest node within a tenth of the spacing.
/// Reduces exactly to [`gradient_rect4`] on rectangular layouts.
pub fn gradient_general(
    layout: &NodeLayout,
    snap: &RssiSnapshot,
) -> Result<RssiGradient, CdoaError> {
    let c = layout.centroid();
    let half_dx = 0.5 * layout.delta_x();
    let half_dy = 0.5 * layout.delta_y();
    let tol = 0.1 * layout.delta_x().min(layout.delta_y());

    let reading_near = |x: f64, y: f64| -> Result<f64, CdoaError> {
        let corner = Position::new(x, y);
        let mut best: Option<(f64, usize)> = None;
        for (i, p) in layout.positions().enumerate() {
            let d = p.distance_to(corner);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, i));
            }
        }
        match best {
            Some((d, i)) if d <= tol => Ok(snap.reading(i)),
            _ => Err(CdoaError::UnresolvedOffset(x, y)),
        }
    };

    let sw = reading_near(c.x - half_dx, c.y - half_dy)?;
    let nw = reading_near(c.x - half_dx, c.y + half_dy)?;
    let ne = reading_near(c.x + half_dx, c.y + half_dy)?;
    let se = reading_near(c.x + half_dx, c.y - half_dy)?;
    let two_dx = 2.0 * layout.delta_x();
    let two_dy = 2.0 * layout.delta_y();
    finite(RssiGradient {
        x: (se - sw) / two_dx + (ne - nw) / two_dx,
        y: (nw - sw) / two_dy + (ne - se) / two_dy,
    })
}

/// Least-squares fit of the plane `s = a*x + b*y + c` to the node readings;
/// returns `(a, b)`. Exact on linear fields for any non-collinear layout.
pub fn gradient_lsq(layout: &NodeLayout, snap: &RssiSnapshot) -> Result<RssiGradient, CdoaError> {
    let n = layout.len() as f64;
    let cx = layout.centroid().x;
    let cy = layout.centroid().y;
    let s_mean = snap.readings().iter().sum::<f64>() / n;

    // Centered normal equations: the intercept drops out and the 2x2 system
    // below is singular exactly when the nodes are collinear.
    let (mut sxx, mut sxy, mut syy, mut sxs, mut sys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (p, &s) in layout.positions().zip(snap.readings()) {
        let dx = p.x - cx;
        let dy = p.y - cy;
        let ds = s - s_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        sxs += dx * ds;
        sys += dy * ds;
    }
    let det = sxx * syy - sxy * sxy;
    let scale = (sxx + syy).max(f64::MIN_POSITIVE);
    if det.abs() < 1e-12 * scale * scale {
        return Err(CdoaError::CollinearNodes);
    }
    finite(RssiGradient {
        x: (syy * sxs - sxy * sys) / det,
        y: (sxx * sys - sxy * sxs) / det,
    })
}

pub fn gradient(
    layout: &NodeLayout,
    snap: &RssiSnapshot,
    method: GradientMethod,
) -> Result<RssiGradient, CdoaError> {
    match method {
        GradientMethod::Rect4 => gradient_rect4(layout, snap),
        GradientMethod::General => gradient_general(layout, snap),
        GradientMethod::LeastSquares => gradient_lsq(layout, snap),
    }
}

fn finite(g: RssiGradient) -> Result<RssiGradient, CdoaError> {
    if g.x.is_finite() && g.y.is_finite() {
        Ok(g)
    } else {
        Err(CdoaError::NonFiniteGradient)
    }
}

/// Bearing of the gradient via the two-argument arctangent, preserving the
/// quadrant. A zero gradient carries no direction and is rejected so callers
/// can skip the update instead of ingesting a fabricated bearing.
pub fn cdoa_from_gradient(g: RssiGradient) -> Result<Angle, CdoaError> {
    if !(g.x.is_finite() && g.y.is_finite()) {
        return Err(CdoaError::NonFiniteGradient);
    }
    if g.x == 0.0 && g.y == 0.0 {
        return Err(CdoaError::NoSignalDirection);
    }
    Ok(Angle::new(g.y.atan2(g.x)))
}

/// One smoothed direction-of-arrival measurement with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdoaMeasurement {
    pub timestamp: f64,
    /// EWMA-smoothed bearing used by the localizers.
    pub angle: Angle,
    /// Bearing straight from the gradient, before smoothing.
    pub raw_angle: Angle,
    /// Ground-truth transmitter position, when the caller logs it.
    pub robot_hint: Option<Position>,
}

/// Turns snapshots into smoothed CDOA measurements. Owns the EWMA state;
/// one instance per estimation stream.
#[derive(Debug, Clone)]
pub struct CdoaEstimator {
    method: GradientMethod,
    alpha: f64,
    min_gradient: f64,
    smoothed: Option<Angle>,
    degenerate_events: usize,
}

impl CdoaEstimator {
    pub fn new(method: GradientMethod, alpha: f64) -> Result<Self, CdoaError> {
        if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
            return Err(GeomError::InvalidSmoothingFactor(alpha).into());
        }
        Ok(Self { method, alpha, min_gradient: 0.0, smoothed: None, degenerate_events: 0 })
    }

    /// Gradients weaker than `threshold` (dBm/m) are treated as carrying no
    /// usable direction and skipped like exact zeros. Near the anchor
    /// centroid the field flattens out and the bearing is pure noise; the
    /// gate keeps those samples out of the smoother and the likelihood.
    pub fn with_min_gradient(mut self, threshold: f64) -> Self {
        self.min_gradient = threshold.max(0.0);
        self
    }

    /// Processes one snapshot. Zero- and below-threshold-gradient snapshots
    /// propagate an error and leave the smoother untouched.
    pub fn process(
        &mut self,
        layout: &NodeLayout,
        snap: &RssiSnapshot,
    ) -> Result<CdoaMeasurement, CdoaError> {
        let g = gradient(layout, snap, self.method)?;
        if g.x.hypot(g.y) < self.min_gradient {
            return Err(CdoaError::NoSignalDirection);
        }
        let raw = cdoa_from_gradient(g)?;
        let angle = match self.smoothed {
            None => raw,
            Some(prev) => {
                let s = ewma_angle(prev, raw, self.alpha)?;
                if s.degenerate {
                    self.degenerate_events += 1;
                }
                s.angle
            }
        };
        self.smoothed = Some(angle);
        Ok(CdoaMeasurement { timestamp: snap.timestamp, angle, raw_angle: raw, robot_hint: None })
    }

    pub fn reset(&mut self) {
        self.smoothed = None;
    }

    pub fn degenerate_events(&self) -> usize {
        self.degenerate_events
    }
}
