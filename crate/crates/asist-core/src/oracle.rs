//! Embedding oracle: a stand-in for the trained embedding network. Each track
//! id gets one unit-norm anchor vector, constant across frames; every pixel of
//! the track carries anchor + Gaussian noise, background carries noise around
//! the zero vector.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::LabelVideo;
use crate::rng::{stream, TAG_ANCHOR, TAG_PIXEL_NOISE};

/// Per-frame H×W×D embedding maps.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVideo {
    pub width: u32,
    pub height: u32,
    pub dim: u32,
    /// frames[t] holds H·W·D f32 values in (row, col, dim) order.
    pub frames: Vec<Vec<f32>>,
}

impl EmbeddingVideo {
    #[inline]
    pub fn pixel(&self, t: usize, x: u32, y: u32) -> &[f32] {
        let d = self.dim as usize;
        let off = ((y as usize) * (self.width as usize) + (x as usize)) * d;
        &self.frames[t][off..off + d]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleParams {
    pub dim: u32,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            dim: 8,
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

impl OracleParams {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::invalid("embedding dim must be >= 2"));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::invalid("noise_sigma must be non-negative"));
        }
        Ok(())
    }
}

/// Two anchors closer than this are considered a collision and the later one
/// is redrawn; 1.5× the tracker's default bandwidth. The unit 7-sphere cannot
/// hold the densest preset's ~220 anchors pairwise 0.8 apart, so the guard
/// leaves a 0.2 margin beyond the bandwidth instead.
const ANCHOR_MIN_DIST: f64 = 0.6;
// Redraw probability per candidate grows with the number of placed anchors
// (random unit vectors at D=8 land within 0.8 of a given anchor a few percent
// of the time), so hundreds of tracks need a deep retry budget. Draws are
// cheap; the bound only guards against an over-packed sphere.
const ANCHOR_MAX_RETRIES: u64 = 1 << 16;

/// Unit vector on the D-sphere for one track id, deterministic in (seed, id).
/// The retry counter participates in the stream key so redraws stay portable.
fn draw_anchor(seed: u64, id: u32, retry: u64, dim: u32) -> Vec<f32> {
    let mut rng = stream(&[TAG_ANCHOR, seed, id as u64, retry]);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|x| (x / norm) as f32).collect();
        }
    }
}

/// Anchors for every id, in ascending id order, with the collision guard
/// applied against all earlier anchors.
pub fn track_anchors(ids: &[u32], params: &OracleParams) -> Result<Vec<(u32, Vec<f32>)>> {
    let mut out: Vec<(u32, Vec<f32>)> = Vec::with_capacity(ids.len());
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    for id in sorted {
        let mut retry = 0u64;
        let anchor = loop {
            let cand = draw_anchor(params.seed, id, retry, params.dim);
            let collides = out.iter().any(|(_, a)| dist(a, &cand) < ANCHOR_MIN_DIST);
            if !collides {
                break cand;
            }
            retry += 1;
            if retry > ANCHOR_MAX_RETRIES {
                return Err(Error::invalid(format!(
                    "could not place anchor for track {id} after {ANCHOR_MAX_RETRIES} retries"
                )));
            }
        };
        out.push((id, anchor));
    }
    Ok(out)
}

fn dist(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (*x - *y) as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Convert a label video into an embedding video under the oracle contract:
/// per-track constant anchors plus per-pixel Gaussian noise, background noise
/// around zero. Deterministic in the seed and independent of scheduling
/// (noise streams are keyed by (seed, frame, row, col)).
pub fn embed_labels(video: &LabelVideo, params: &OracleParams) -> Result<EmbeddingVideo> {
    params.validate()?;
    video.validate()?;

    let ids: Vec<u32> = video.tracks.iter().map(|r| r.id).collect();
    let anchors = track_anchors(&ids, params)?;
    let lookup: std::collections::BTreeMap<u32, &Vec<f32>> =
        anchors.iter().map(|(id, a)| (*id, a)).collect();

    let (w, h, d) = (video.width(), video.height(), params.dim);
    let zero = vec![0.0f32; d as usize];
    let frames: Vec<Vec<f32>> = video
        .frames
        .iter()
        .enumerate()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(t, frame)| {
            let mut data = vec![0.0f32; (w as usize) * (h as usize) * (d as usize)];
            for y in 0..h {
                for x in 0..w {
                    let id = frame.get(x, y);
                    let base = if id == 0 { &zero } else { lookup[&id] };
                    let off = ((y as usize) * (w as usize) + (x as usize)) * (d as usize);
                    if params.noise_sigma == 0.0 {
                        data[off..off + d as usize].copy_from_slice(base);
                    } else {
                        let mut rng =
                            stream(&[TAG_PIXEL_NOISE, params.seed, t as u64, y as u64, x as u64]);
                        for k in 0..d as usize {
                            let n: f64 = rng.sample(StandardNormal);
                            data[off + k] = base[k] + (params.noise_sigma * n) as f32;
                        }
                    }
                }
            }
            data
        })
        .collect();

    Ok(EmbeddingVideo {
        width: w,
        height: h,
        dim: d,
        frames,
    })
}
