//! Deterministic colorized rendering of label videos for visual inspection.
//! Hues step around the circle by the golden ratio so nearby ids stay
//! distinguishable; background is black.

use std::path::Path;

use image::{ImageBuffer, Rgb};

use crate::error::{Error, Result};
use crate::model::{LabelFrame, LabelVideo};

use super::{commit_dir, staging_path};

const GOLDEN_RATIO_CONJUGATE: f64 = 0.618_033_988_749_895;

/// Fixed id → RGB map: hue = fract(id · φ⁻¹), saturation 0.75, value 1.
pub fn id_color(id: u32) -> [u8; 3] {
    if id == 0 {
        return [0, 0, 0];
    }
    let h = (id as f64 * GOLDEN_RATIO_CONJUGATE).fract() * 6.0;
    let (s, v) = (0.75f64, 1.0f64);
    let c = v * s;
    let x = c * (1.0 - ((h % 2.0) - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [
        ((r + m) * 255.0).round() as u8,
        ((g + m) * 255.0).round() as u8,
        ((b + m) * 255.0).round() as u8,
    ]
}

pub fn render_frame(frame: &LabelFrame) -> ImageBuffer<Rgb<u8>, Vec<u8>> {
    let mut data = Vec::with_capacity(frame.labels.len() * 3);
    for &id in &frame.labels {
        data.extend_from_slice(&id_color(id));
    }
    ImageBuffer::from_raw(frame.width, frame.height, data).expect("sized from frame")
}

/// Render every frame of a video as `frame_t%04d.png` under `dest`.
pub fn write_colorized(video: &LabelVideo, dest: &Path) -> Result<()> {
    video.validate()?;
    let staged = staging_path(dest);
    if staged.exists() {
        std::fs::remove_dir_all(&staged)?;
    }
    std::fs::create_dir_all(&staged)?;
    let out: Result<()> = (|| {
        for (t, f) in video.frames.iter().enumerate() {
            render_frame(f)
                .save(staged.join(format!("frame_t{t:04}.png")))
                .map_err(|e| Error::format(format!("writing frame {t}: {e}")))?;
        }
        Ok(())
    })();
    if let Err(e) = out {
        let _ = std::fs::remove_dir_all(&staged);
        return Err(e);
    }
    commit_dir(&staged, dest)
}
