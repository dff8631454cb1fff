//! Result emission: per-waypoint CSV, summary tables, ablation curves, and
//! the effective-config echo that makes every run replayable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ablation::AblationPoint;
use super::metrics::{render_markdown, MethodSummary};
use super::trial::TrialResult;
use super::HarnessError;

/// One row of `results.csv`: one waypoint of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub trial: usize,
    pub seed: u64,
    pub waypoint: usize,
    pub truth_x: f64,
    pub truth_y: f64,
    pub est_x: Option<f64>,
    pub est_y: Option<f64>,
    pub error_m: Option<f64>,
    pub iter_seconds: f64,
}

pub fn write_results_csv(path: &Path, results: &[TrialResult]) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    let mut trial_index = 0usize;
    let mut last_method = String::new();
    for r in results {
        if r.method != last_method {
            trial_index = 0;
            last_method = r.method.clone();
        }
        for (w, outcome) in r.estimates.iter().enumerate() {
            writer
                .serialize(ResultRow {
                    method: r.method.clone(),
                    trial: trial_index,
                    seed: r.seed,
                    waypoint: w,
                    truth_x: outcome.truth.x,
                    truth_y: outcome.truth.y,
                    est_x: outcome.estimate.map(|p| p.x),
                    est_y: outcome.estimate.map(|p| p.y),
                    error_m: outcome.estimate.map(|p| p.distance_to(outcome.truth)),
                    iter_seconds: outcome.iter_seconds,
                })
                .map_err(|e| HarnessError::Io(e.to_string()))?;
        }
        trial_index += 1;
    }
    writer.flush().map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(())
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>, HarnessError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, row) in reader.deserialize::<ResultRow>().enumerate() {
        rows.push(row.map_err(|e| HarnessError::MalformedRow {
            line: i as u64 + 2,
            message: e.to_string(),
        })?);
    }
    Ok(rows)
}

/// Rebuilds per-trial RMSE and TPI summaries from raw result rows, so a
/// summary can be regenerated without rerunning anything.
pub fn summaries_from_rows(rows: &[ResultRow]) -> Result<Vec<MethodSummary>, HarnessError> {
    use super::trial::{TrialResult, WaypointOutcome};
    use crate::geom::Position;

    let mut trials: Vec<TrialResult> = Vec::new();
    let mut key: Option<(String, usize)> = None;
    let mut estimates: Vec<WaypointOutcome> = Vec::new();
    let mut seed = 0u64;

    let flush = |key: &Option<(String, usize)>,
                     estimates: &mut Vec<WaypointOutcome>,
                     seed: u64,
                     trials: &mut Vec<TrialResult>| {
        if let Some((method, _)) = key {
            let outcomes = std::mem::take(estimates);
            let mut times: Vec<f64> = outcomes.iter().map(|e| e.iter_seconds).collect();
            times.sort_by(f64::total_cmp);
            let missing = outcomes.iter().filter(|e| e.estimate.is_none()).count();
            let mut sum = 0.0;
            let mut n = 0usize;
            for e in &outcomes {
                if let Some(est) = e.estimate {
                    sum += est.distance_to(e.truth).powi(2);
                    n += 1;
                }
            }
            trials.push(TrialResult {
                method: method.clone(),
                seed,
                rmse: if n == 0 { f64::NAN } else { (sum / n as f64).sqrt() },
                mean_tpi_seconds: times.iter().sum::<f64>() / times.len() as f64,
                median_tpi_seconds: times[times.len() / 2],
                estimates: outcomes,
                missing,
            });
        }
    };

    for row in rows {
        let row_key = Some((row.method.clone(), row.trial));
        if row_key != key {
            flush(&key, &mut estimates, seed, &mut trials);
            key = row_key;
        }
        seed = row.seed;
        estimates.push(WaypointOutcome {
            truth: Position::new(row.truth_x, row.truth_y),
            estimate: match (row.est_x, row.est_y) {
                (Some(x), Some(y)) => Some(Position::new(x, y)),
                _ => None,
            },
            iter_seconds: row.iter_seconds,
        });
    }
    flush(&key, &mut estimates, seed, &mut trials);
    super::metrics::compute_metrics(&trials)
}

pub fn write_summary_csv(path: &Path, summaries: &[MethodSummary]) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    for s in summaries {
        writer.serialize(s).map_err(|e| HarnessError::Io(e.to_string()))?;
    }
    writer.flush().map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(())
}

pub fn write_summary_markdown(
    path: &Path,
    summaries: &[MethodSummary],
) -> Result<(), HarnessError> {
    std::fs::write(path, render_markdown(summaries))
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

/// Ablation curves as plot-ready CSV: one row per (count, odometry) pair.
pub fn write_ablation_csv(path: &Path, points: &[AblationPoint]) -> Result<(), HarnessError> {
    #[derive(Serialize)]
    struct Row {
        particles: usize,
        odometry: bool,
        mean_rmse_m: f64,
        seeds: usize,
    }
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    for p in points {
        for (odometry, values) in
            [(true, &p.rmse_odometry_on), (false, &p.rmse_odometry_off)]
        {
            writer
                .serialize(Row {
                    particles: p.particles,
                    odometry,
                    mean_rmse_m: values.iter().sum::<f64>() / values.len() as f64,
                    seeds: values.len(),
                })
                .map_err(|e| HarnessError::Io(e.to_string()))?;
        }
    }
    writer.flush().map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(())
}
