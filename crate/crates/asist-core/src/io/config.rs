//! Optional TOML config mirroring the CLI flags. Every field is optional;
//! explicit CLI flags take precedence over config values.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub simulate: SimSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub meanshift: MeanShiftSection,
    #[serde(default)]
    pub weights: WeightsSection,
    /// Physical pixel size in micrometers; recorded metadata, unused by any
    /// computation.
    pub pixel_resolution_um: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub n_objects: Option<u32>,
    pub canvas_size: Option<u32>,
    pub out_size: Option<u32>,
    pub n_frames: Option<u32>,
    pub min_length: Option<f64>,
    pub max_length: Option<f64>,
    pub min_width: Option<f64>,
    pub max_width: Option<f64>,
    pub move_prob: Option<f64>,
    pub rotate_prob: Option<f64>,
    pub resize_prob: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub dim: Option<u32>,
    pub noise_sigma: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanShiftSection {
    pub bandwidth: Option<f64>,
    pub seed_fraction: Option<f64>,
    pub max_iters: Option<u32>,
    pub convergence_tol: Option<f64>,
    pub merge_tol: Option<f64>,
    pub fg_norm_threshold: Option<f64>,
    pub min_cluster_pixels: Option<usize>,
    pub assoc_threshold: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub w_ns: Option<f64>,
    pub w_fn: Option<f64>,
    pub w_fp: Option<f64>,
    pub w_ed: Option<f64>,
    pub w_ea: Option<f64>,
    pub w_ec: Option<f64>,
}

pub fn read_config(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}
