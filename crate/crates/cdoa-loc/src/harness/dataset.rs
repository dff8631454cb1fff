//! Dataset ingestion and export.
//!
//! Canonical CSV schema, header required, UTF-8, '.' decimal separator:
//!
//! ```text
//! timestamp,node_id,rssi_dbm,gt_x,gt_y
//! ```
//!
//! `gt_x`/`gt_y` may be empty when no ground truth is available. Rows are
//! grouped by timestamp into snapshots; a timestamp missing any layout node
//! is rejected with one diagnostic per affected row, so every input row is
//! either used or diagnosed.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::RssiSnapshot;
use crate::geom::{NodeLayout, Position};

use super::HarnessError;

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub timestamp: f64,
    pub node_id: String,
    pub rssi_dbm: f64,
    pub gt_x: Option<f64>,
    pub gt_y: Option<f64>,
}

/// Why a row was not used.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    /// 1-based CSV line (header is line 1).
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestedDataset {
    /// Snapshots in first-seen timestamp order, with truth when present.
    pub snapshots: Vec<(RssiSnapshot, Option<Position>)>,
    pub diagnostics: Vec<Diagnostic>,
    pub rows_total: usize,
    pub rows_used: usize,
}

/// Reads the canonical CSV and groups complete timestamps into snapshots.
/// Malformed rows and unknown node ids are hard errors; incomplete
/// timestamps are skipped with diagnostics.
pub fn ingest_dataset(path: &Path, layout: &NodeLayout) -> Result<IngestedDataset, HarnessError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;

    // Group rows by timestamp bits, preserving first-seen order.
    struct Group {
        timestamp: f64,
        readings: Vec<Option<(f64, u64)>>, // (rssi, line) per layout node
        truth: Option<Position>,
        lines: Vec<u64>,
    }
    let mut order: Vec<u64> = Vec::new();
    let mut groups: std::collections::HashMap<u64, Group> = std::collections::HashMap::new();

    let mut rows_total = 0usize;
    for (i, row) in reader.deserialize::<DatasetRecord>().enumerate() {
        let line = i as u64 + 2; // header occupies line 1
        let record = row.map_err(|e| HarnessError::MalformedRow { line, message: e.to_string() })?;
        rows_total += 1;

        let node_index = layout
            .index_of(&record.node_id)
            .ok_or_else(|| HarnessError::UnknownNode(record.node_id.clone()))?;
        if !record.rssi_dbm.is_finite() || !record.timestamp.is_finite() {
            return Err(HarnessError::MalformedRow {
                line,
                message: "non-finite timestamp or rssi".into(),
            });
        }

        let key = record.timestamp.to_bits();
        let group = groups.entry(key).or_insert_with(|| {
            order.push(key);
            Group {
                timestamp: record.timestamp,
                readings: vec![None; layout.len()],
                truth: None,
                lines: Vec::new(),
            }
        });
        if group.readings[node_index].is_some() {
            return Err(HarnessError::MalformedRow {
                line,
                message: format!(
                    "duplicate reading for node {} at timestamp {}",
                    record.node_id, record.timestamp
                ),
            });
        }
        group.readings[node_index] = Some((record.rssi_dbm, line));
        group.lines.push(line);
        if let (Some(x), Some(y)) = (record.gt_x, record.gt_y) {
            group.truth.get_or_insert(Position::new(x, y));
        }
    }

    let mut snapshots = Vec::new();
    let mut diagnostics = Vec::new();
    let mut rows_used = 0usize;
    for key in order {
        let group = groups.remove(&key).expect("keyed by order");
        if group.readings.iter().all(Option::is_some) {
            let readings = group.readings.iter().map(|r| r.unwrap().0).collect();
            let snapshot = RssiSnapshot::new(layout, readings, group.timestamp, 1)
                .expect("grouped readings are complete and finite");
            rows_used += group.lines.len();
            snapshots.push((snapshot, group.truth));
        } else {
            let missing: Vec<&str> = layout
                .nodes()
                .iter()
                .zip(&group.readings)
                .filter(|(_, r)| r.is_none())
                .map(|(n, _)| n.id.as_str())
                .collect();
            for line in group.lines {
                diagnostics.push(Diagnostic {
                    line,
                    reason: format!(
                        "timestamp {} missing node(s): {}",
                        group.timestamp,
                        missing.join(", ")
                    ),
                });
            }
        }
    }

    Ok(IngestedDataset { snapshots, diagnostics, rows_total, rows_used })
}

/// Writes snapshots (with optional truth) in the canonical schema, one row
/// per node per timestamp, in layout node order.
pub fn write_snapshot_csv(
    path: &Path,
    layout: &NodeLayout,
    snapshots: &[(RssiSnapshot, Option<Position>)],
) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    for (snap, truth) in snapshots {
        for (node, &rssi) in layout.nodes().iter().zip(snap.readings()) {
            writer
                .serialize(DatasetRecord {
                    timestamp: snap.timestamp,
                    node_id: node.id.clone(),
                    rssi_dbm: rssi,
                    gt_x: truth.map(|t| t.x),
                    gt_y: truth.map(|t| t.y),
                })
                .map_err(|e| HarnessError::Io(e.to_string()))?;
        }
    }
    writer.flush().map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(())
}
