//! Label videos on disk: one 16-bit single-channel PNG per frame named
//! `mask_t%04d.png` plus a `tracks.txt` table with lines
//! `id first_frame last_frame parent`. TIFF frames are accepted on ingest.

use std::io::Write;
use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};

use crate::error::{Error, Result};
use crate::model::{LabelFrame, LabelVideo, TrackRecord};

use super::{commit_dir, staging_path};

pub fn frame_file_name(t: usize) -> String {
    format!("mask_t{t:04}.png")
}

/// Write a label video as a mask directory. Fails before touching the
/// destination; the staged directory only replaces it on success.
pub fn write_label_video(video: &LabelVideo, dest: &Path) -> Result<()> {
    video.validate()?;
    for f in &video.frames {
        if let Some(&id) = f.labels.iter().find(|&&id| id > u16::MAX as u32) {
            return Err(Error::invalid(format!(
                "track id {id} exceeds 16-bit mask range"
            )));
        }
    }

    let staged = staging_path(dest);
    if staged.exists() {
        std::fs::remove_dir_all(&staged)?;
    }
    std::fs::create_dir_all(&staged)?;
    let out: Result<()> = (|| {
        for (t, f) in video.frames.iter().enumerate() {
            let buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_raw(
                f.width,
                f.height,
                f.labels.iter().map(|&v| v as u16).collect(),
            )
            .expect("grid size checked by validate");
            buf.save(staged.join(frame_file_name(t)))
                .map_err(|e| Error::format(format!("writing frame {t}: {e}")))?;
        }
        let mut table = std::fs::File::create(staged.join("tracks.txt"))?;
        for rec in &video.tracks {
            writeln!(
                table,
                "{} {} {} {}",
                rec.id, rec.first_frame, rec.last_frame, rec.parent
            )?;
        }
        Ok(())
    })();
    if let Err(e) = out {
        let _ = std::fs::remove_dir_all(&staged);
        return Err(e);
    }
    commit_dir(&staged, dest)
}

fn decode_frame(path: &Path) -> Result<LabelFrame> {
    let img = image::open(path)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    let (width, height, labels) = match img {
        DynamicImage::ImageLuma16(buf) => {
            let (w, h) = buf.dimensions();
            (w, h, buf.into_raw().into_iter().map(u32::from).collect())
        }
        // 8-bit masks carry ids directly; do not rescale.
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            (w, h, buf.into_raw().into_iter().map(u32::from).collect())
        }
        other => {
            return Err(Error::format(format!(
                "{}: expected single-channel 8/16-bit mask, got {:?}",
                path.display(),
                other.color()
            )))
        }
    };
    Ok(LabelFrame {
        width,
        height,
        labels,
    })
}

/// Read a mask directory back into a LabelVideo and check its invariants.
pub fn read_label_video(dir: &Path) -> Result<LabelVideo> {
    let mut frame_paths: Vec<std::path::PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned());
            let ext = p
                .extension()
                .map(|e| e.to_string_lossy().to_ascii_lowercase());
            name.is_some_and(|n| n.starts_with("mask_t"))
                && matches!(ext.as_deref(), Some("png" | "tif" | "tiff"))
        })
        .collect();
    if frame_paths.is_empty() {
        return Err(Error::format(format!(
            "{}: no mask_t*.png frames found",
            dir.display()
        )));
    }
    frame_paths.sort();
    let frames = frame_paths
        .iter()
        .map(|p| decode_frame(p))
        .collect::<Result<Vec<_>>>()?;

    let table_path = dir.join("tracks.txt");
    let text = std::fs::read_to_string(&table_path)
        .map_err(|e| Error::format(format!("{}: {e}", table_path.display())))?;
    let mut tracks = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::format(format!(
                "tracks.txt line {}: expected 4 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| Error::format(format!("tracks.txt line {}: bad {what} '{s}'", lineno + 1)))
        };
        tracks.push(TrackRecord {
            id: parse(fields[0], "id")? as u32,
            first_frame: parse(fields[1], "first_frame")? as usize,
            last_frame: parse(fields[2], "last_frame")? as usize,
            parent: parse(fields[3], "parent")? as u32,
        });
    }

    let video = LabelVideo { frames, tracks };
    video.validate()?;
    Ok(video)
}
