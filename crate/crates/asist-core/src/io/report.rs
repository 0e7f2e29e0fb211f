//! Evaluation report file: UTF-8 JSON with fixed key names, self-describing
//! (weights and tool version echoed so a run can be reproduced from the file).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{AogmWeights, MetricsReport, OpCounts};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub det: f64,
    pub seg: f64,
    pub tra: f64,
    pub aogm_cost: f64,
    pub aogm_empty_cost: f64,
    pub aogm_d_cost: f64,
    pub aogm_d_empty_cost: f64,
    pub op_counts: OpCounts,
    pub weights: AogmWeights,
    pub version: String,
}

impl ReportFile {
    pub fn new(report: &MetricsReport, weights: &AogmWeights) -> Self {
        ReportFile {
            det: report.det,
            seg: report.seg,
            tra: report.tra,
            aogm_cost: report.aogm_cost,
            aogm_empty_cost: report.aogm_empty_cost,
            aogm_d_cost: report.aogm_d_cost,
            aogm_d_empty_cost: report.aogm_d_empty_cost,
            op_counts: report.op_counts,
            weights: *weights,
            version: TOOL_VERSION.to_string(),
        }
    }
}

pub fn write_report(report: &ReportFile, dest: &Path) -> Result<()> {
    let staged = super::staging_path(dest);
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::format(format!("serializing report: {e}")))?;
    std::fs::write(&staged, text + "\n")?;
    super::commit_dir(&staged, dest)
}

pub fn read_report(path: &Path) -> Result<ReportFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::format(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let file = ReportFile {
            det: 0.9,
            seg: 0.8,
            tra: 0.7,
            aogm_cost: 3.0,
            aogm_empty_cost: 30.0,
            aogm_d_cost: 2.0,
            aogm_d_empty_cost: 20.0,
            op_counts: OpCounts::default(),
            weights: AogmWeights::default(),
            version: TOOL_VERSION.into(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        write_report(&file, &path).unwrap();
        let back = read_report(&path).unwrap();
        assert_eq!(back.tra, 0.7);
        assert_eq!(back.weights.w_fn, 10.0);
        // Fixed key names are part of the format contract.
        let text = std::fs::read_to_string(&path).unwrap();
        for key in ["\"det\"", "\"seg\"", "\"tra\"", "\"op_counts\"", "\"weights\"", "\"version\""] {
            assert!(text.contains(key), "missing {key}");
        }
    }
}
