//! Simulation of instance-annotation videos: N rod-shaped instances placed on
//! an oversized canvas, stepped frame-by-frame with unit translation/rotation/
//! resize moves, rasterized, then center-cropped so objects move in and out.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{rebuild_tracks, LabelFrame, LabelVideo};
use crate::rng::{stream, TAG_ROD};

/// Which way a rod's length drifts. Fixed per rod for a whole video.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthDirection {
    Grow,
    Shrink,
}

/// Geometric state of one simulated instance on the oversized canvas.
#[derive(Debug, Clone, PartialEq)]
pub struct Rod {
    pub id: u32,
    pub center: (f64, f64),
    /// Degrees in [0, 360).
    pub orientation: f64,
    pub length: f64,
    pub width: f64,
    pub length_direction: LengthDirection,
}

/// Simulation parameters. `canvas_size` is the oversized generation canvas;
/// `out_size` the cropped output.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub n_objects: u32,
    pub canvas_size: u32,
    pub out_size: u32,
    pub n_frames: u32,
    pub min_length: f64,
    pub max_length: f64,
    pub min_width: f64,
    pub max_width: f64,
    pub move_prob: f64,
    pub rotate_prob: f64,
    pub resize_prob: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            n_objects: 110,
            canvas_size: 550,
            out_size: 512,
            n_frames: 10,
            min_length: 15.0,
            max_length: 60.0,
            min_width: 2.0,
            max_width: 5.0,
            move_prob: 0.5,
            rotate_prob: 0.5,
            resize_prob: 0.5,
            seed: 0,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_objects == 0 {
            return Err(Error::invalid("n_objects must be positive"));
        }
        if self.n_frames == 0 {
            return Err(Error::invalid("n_frames must be positive"));
        }
        if self.canvas_size <= self.out_size {
            return Err(Error::invalid(format!(
                "canvas_size {} must exceed out_size {}",
                self.canvas_size, self.out_size
            )));
        }
        if !(self.max_length >= self.min_length && self.min_length >= 2.0) {
            return Err(Error::invalid("need max_length >= min_length >= 2"));
        }
        if !(self.max_width >= self.min_width && self.min_width >= 1.0) {
            return Err(Error::invalid("need max_width >= min_width >= 1"));
        }
        for (name, p) in [
            ("move_prob", self.move_prob),
            ("rotate_prob", self.rotate_prob),
            ("resize_prob", self.resize_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} must be in [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Per-rod stream derived from (seed, id); trajectories are invariant to N.
pub fn rod_stream(seed: u64, id: u32) -> ChaCha8Rng {
    stream(&[TAG_ROD, seed, id as u64])
}

fn init_rod(params: &SimParams, id: u32, rng: &mut ChaCha8Rng) -> Rod {
    let cx = rng.gen::<f64>() * params.canvas_size as f64;
    let cy = rng.gen::<f64>() * params.canvas_size as f64;
    let orientation = rng.gen::<f64>() * 360.0;
    let length = params.min_length + rng.gen::<f64>() * (params.max_length - params.min_length);
    let width = params.min_width + rng.gen::<f64>() * (params.max_width - params.min_width);
    let length_direction = if rng.gen::<bool>() {
        LengthDirection::Grow
    } else {
        LengthDirection::Shrink
    };
    Rod {
        id,
        center: (cx, cy),
        orientation,
        length,
        width,
        length_direction,
    }
}

/// Place the initial population: uniform centers over the oversized canvas,
/// uniform orientation and geometry ranges, ids 1..=N.
pub fn init_first_frame(params: &SimParams) -> Result<Vec<Rod>> {
    params.validate()?;
    Ok((1..=params.n_objects)
        .map(|id| {
            let mut rng = rod_stream(params.seed, id);
            init_rod(params, id, &mut rng)
        })
        .collect())
}

/// Advance one rod by one frame. Sub-steps run in fixed order
/// translate → rotate → resize, each an independent coin flip:
/// translation moves the center by exactly 1 pixel in a uniform direction,
/// rotation changes the orientation by ±1 degree, resizing changes the length
/// by 1 pixel in the rod's fixed drift direction (clamped at min_length).
pub fn step_rod(rod: &Rod, params: &SimParams, rng: &mut ChaCha8Rng) -> Rod {
    let mut out = rod.clone();

    if rng.gen::<f64>() < params.move_prob {
        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
        out.center.0 += theta.cos();
        out.center.1 += theta.sin();
    }
    if rng.gen::<f64>() < params.rotate_prob {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        out.orientation = (out.orientation + sign).rem_euclid(360.0);
    }
    if rng.gen::<f64>() < params.resize_prob {
        match out.length_direction {
            LengthDirection::Grow => out.length += 1.0,
            LengthDirection::Shrink => out.length = (out.length - 1.0).max(params.min_length),
        }
    }
    out
}

/// Paint rods onto an all-zero frame. A pixel belongs to a rod iff its center
/// point falls inside the rotated length × width rectangle (half-open on the
/// far edges, which makes an axis-aligned L×W rod cover exactly L·W pixel
/// centers when aligned to the half-pixel grid). Overlaps resolve by z-order:
/// the higher id wins.
pub fn rasterize(rods: &[Rod], canvas_size: u32) -> LabelFrame {
    let mut frame = LabelFrame::zeros(canvas_size, canvas_size);
    let mut order: Vec<&Rod> = rods.iter().collect();
    order.sort_unstable_by_key(|r| r.id);
    for rod in order {
        paint_rod(&mut frame, rod);
    }
    frame
}

fn paint_rod(frame: &mut LabelFrame, rod: &Rod) {
    let (cx, cy) = rod.center;
    let half_l = rod.length / 2.0;
    let half_w = rod.width / 2.0;
    let theta = rod.orientation.to_radians();
    let (sin_t, cos_t) = theta.sin_cos();

    // Conservative bounding box around the rotated rectangle.
    let reach = half_l.hypot(half_w) + 1.0;
    let x0 = ((cx - reach).floor().max(0.0)) as i64;
    let y0 = ((cy - reach).floor().max(0.0)) as i64;
    let x1 = ((cx + reach).ceil()).min(frame.width as f64 - 1.0) as i64;
    let y1 = ((cy + reach).ceil()).min(frame.height as f64 - 1.0) as i64;
    if x1 < x0 || y1 < y0 {
        return;
    }

    for y in y0..=y1 {
        for x in x0..=x1 {
            let dx = (x as f64 + 0.5) - cx;
            let dy = (y as f64 + 0.5) - cy;
            // Rotate the pixel center into the rod's frame.
            let u = dx * cos_t + dy * sin_t;
            let v = -dx * sin_t + dy * cos_t;
            if u >= -half_l && u < half_l && v >= -half_w && v < half_w {
                frame.set(x as u32, y as u32, rod.id);
            }
        }
    }
}

/// Run the full simulation on the oversized canvas. Deterministic in the seed;
/// per-rod trajectories are independent streams, so the result does not depend
/// on scheduling.
pub fn simulate_video(params: &SimParams) -> Result<LabelVideo> {
    params.validate()?;

    // Trajectory per rod, each driven by its own stream.
    let trajectories: Vec<Vec<Rod>> = (1..=params.n_objects)
        .into_par_iter()
        .map(|id| {
            let mut rng = rod_stream(params.seed, id);
            let mut states = Vec::with_capacity(params.n_frames as usize);
            let mut rod = init_rod(params, id, &mut rng);
            states.push(rod.clone());
            for _ in 1..params.n_frames {
                rod = step_rod(&rod, params, &mut rng);
                states.push(rod.clone());
            }
            states
        })
        .collect();

    let frames: Vec<LabelFrame> = (0..params.n_frames as usize)
        .into_par_iter()
        .map(|t| {
            let rods: Vec<Rod> = trajectories.iter().map(|traj| traj[t].clone()).collect();
            rasterize(&rods, params.canvas_size)
        })
        .collect();

    Ok(rebuild_tracks(frames))
}

/// Crop every frame to the centered `out_size` window and rebuild the track
/// table: tracks losing all in-window pixels are trimmed or dropped, and
/// re-entries get fresh ids so contiguity holds.
pub fn center_crop(video: &LabelVideo, out_size: u32) -> Result<LabelVideo> {
    let (w, h) = (video.width(), video.height());
    if out_size > w || out_size > h {
        return Err(Error::invalid(format!(
            "out_size {out_size} exceeds canvas {w}x{h}"
        )));
    }
    let ox = (w - out_size) / 2;
    let oy = (h - out_size) / 2;
    let frames = video
        .frames
        .iter()
        .map(|f| {
            let mut out = LabelFrame::zeros(out_size, out_size);
            for y in 0..out_size {
                for x in 0..out_size {
                    out.set(x, y, f.get(x + ox, y + oy));
                }
            }
            out
        })
        .collect();
    Ok(rebuild_tracks(frames))
}

/// Split a video into a rows × cols grid of spatial quadrants, each with its
/// own rebuilt track table.
pub fn split_video(video: &LabelVideo, rows: u32, cols: u32) -> Result<Vec<LabelVideo>> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("grid must be positive"));
    }
    let (w, h) = (video.width(), video.height());
    if w % cols != 0 || h % rows != 0 {
        return Err(Error::invalid(format!(
            "dimensions {w}x{h} not divisible by grid {rows}x{cols}"
        )));
    }
    let (tw, th) = (w / cols, h / rows);
    let mut out = Vec::with_capacity((rows * cols) as usize);
    for r in 0..rows {
        for c in 0..cols {
            let frames = video
                .frames
                .iter()
                .map(|f| {
                    let mut tile = LabelFrame::zeros(tw, th);
                    for y in 0..th {
                        for x in 0..tw {
                            tile.set(x, y, f.get(c * tw + x, r * th + y));
                        }
                    }
                    tile
                })
                .collect();
            out.push(rebuild_tracks(frames));
        }
    }
    Ok(out)
}

/// Object counts of the five-video benchmark preset.
pub const SIMU5_OBJECT_COUNTS: [u32; 5] = [80, 110, 160, 200, 220];

/// Named preset: how many videos, with which object counts, at which sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// One 512×512 video, 110 objects.
    Simu1,
    /// Five 512×512 videos: 80, 110, 160, 200, 220 objects.
    Simu5,
    /// Simu-5 videos each split into four 256×256 quadrants.
    Simu20,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Preset> {
        match name {
            "simu-1" => Ok(Preset::Simu1),
            "simu-5" => Ok(Preset::Simu5),
            "simu-20" => Ok(Preset::Simu20),
            other => Err(Error::invalid(format!(
                "unknown preset '{other}' (expected simu-1, simu-5, or simu-20)"
            ))),
        }
    }

    pub fn object_counts(&self) -> &'static [u32] {
        match self {
            Preset::Simu1 => &SIMU5_OBJECT_COUNTS[1..2],
            Preset::Simu5 | Preset::Simu20 => &SIMU5_OBJECT_COUNTS,
        }
    }
}

/// Generate all cropped videos of a preset. Video k runs with seed `seed + k`.
pub fn generate_preset(preset: Preset, base: &SimParams) -> Result<Vec<LabelVideo>> {
    let mut videos = Vec::new();
    for (k, &n) in preset.object_counts().iter().enumerate() {
        let params = SimParams {
            n_objects: n,
            seed: base.seed.wrapping_add(k as u64),
            ..base.clone()
        };
        let full = simulate_video(&params)?;
        let cropped = center_crop(&full, params.out_size)?;
        if preset == Preset::Simu20 {
            videos.extend(split_video(&cropped, 2, 2)?);
        } else {
            videos.push(cropped);
        }
    }
    Ok(videos)
}
