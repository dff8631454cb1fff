//! Aggregation of trial results into per-method summary statistics.

use serde::{Deserialize, Serialize};

use super::trial::TrialResult;
use super::HarnessError;

/// Accuracy/efficiency summary of one method across trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub trials: usize,
    pub mean_rmse_m: f64,
    pub std_rmse_m: f64,
    pub mean_tpi_ms: f64,
    pub std_tpi_ms: f64,
    pub median_tpi_ms: f64,
    pub missing_waypoints: usize,
}

/// Groups results by method (in first-seen order) and reduces each group to
/// mean and population standard deviation of RMSE and TPI.
pub fn compute_metrics(results: &[TrialResult]) -> Result<Vec<MethodSummary>, HarnessError> {
    if results.is_empty() {
        return Err(HarnessError::InvalidConfig("no trial results to summarize".into()));
    }
    let mut order: Vec<&str> = Vec::new();
    for r in results {
        if !order.contains(&r.method.as_str()) {
            order.push(&r.method);
        }
    }
    let summaries = order
        .iter()
        .map(|name| {
            let group: Vec<&TrialResult> =
                results.iter().filter(|r| r.method == *name).collect();
            let rmses: Vec<f64> =
                group.iter().map(|r| r.rmse).filter(|r| r.is_finite()).collect();
            let tpis: Vec<f64> =
                group.iter().map(|r| r.mean_tpi_seconds * 1e3).collect();
            let mut medians: Vec<f64> =
                group.iter().map(|r| r.median_tpi_seconds * 1e3).collect();
            medians.sort_by(f64::total_cmp);
            let (mean_rmse, std_rmse) = mean_std(&rmses);
            let (mean_tpi, std_tpi) = mean_std(&tpis);
            MethodSummary {
                method: name.to_string(),
                trials: group.len(),
                mean_rmse_m: mean_rmse,
                std_rmse_m: std_rmse,
                mean_tpi_ms: mean_tpi,
                std_tpi_ms: std_tpi,
                median_tpi_ms: medians[medians.len() / 2],
                missing_waypoints: group.iter().map(|r| r.missing).sum(),
            }
        })
        .collect();
    Ok(summaries)
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aligned-text Markdown table in the accuracy/efficiency comparison layout.
pub fn render_markdown(summaries: &[MethodSummary]) -> String {
    let mut rows: Vec<[String; 5]> = vec![[
        "Method".into(),
        "RMSE (m)".into(),
        "TPI mean (ms)".into(),
        "TPI median (ms)".into(),
        "Trials".into(),
    ]];
    for s in summaries {
        rows.push([
            s.method.clone(),
            format!("{:.3} ± {:.3}", s.mean_rmse_m, s.std_rmse_m),
            format!("{:.3} ± {:.3}", s.mean_tpi_ms, s.std_tpi_ms),
            format!("{:.3}", s.median_tpi_ms),
            s.trials.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..5)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        out.push('|');
        for (cell, width) in row.iter().zip(&widths) {
            out.push_str(&format!(" {cell:<width$} |"));
        }
        out.push('\n');
        if i == 0 {
            out.push('|');
            for width in &widths {
                out.push_str(&format!("{:-<w$}|", "", w = width + 2));
            }
            out.push('\n');
        }
    }
    out
}
