//! ASEMB binary container for embedding videos.
//!
//! Layout: magic `ASEMB\x01`, four little-endian u32 (T, H, W, D), then
//! T·H·W·D IEEE-754 f32 values in (t, row, col, dim) order.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::oracle::EmbeddingVideo;

pub const MAGIC: &[u8; 6] = b"ASEMB\x01";

/// Refuse to encode payloads beyond this many bytes (default 4 GiB).
pub const DEFAULT_SIZE_LIMIT: u64 = 4 << 30;

pub fn write_embedding(video: &EmbeddingVideo, dest: &Path, size_limit: u64) -> Result<()> {
    let t = video.frames.len() as u64;
    let per_frame = (video.height as u64) * (video.width as u64) * (video.dim as u64);
    let payload = t * per_frame * 4;
    if payload > size_limit {
        return Err(Error::invalid(format!(
            "embedding payload {payload} bytes exceeds limit {size_limit}"
        )));
    }
    for f in &video.frames {
        if f.len() as u64 != per_frame {
            return Err(Error::invalid("frame size inconsistent with header"));
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("embedding values must be finite"));
        }
    }

    let staged = super::staging_path(dest);
    let out: Result<()> = (|| {
        let mut w = std::io::BufWriter::new(std::fs::File::create(&staged)?);
        w.write_all(MAGIC)?;
        for v in [t as u32, video.height, video.width, video.dim] {
            w.write_all(&v.to_le_bytes())?;
        }
        for frame in &video.frames {
            for v in frame {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    })();
    if let Err(e) = out {
        let _ = std::fs::remove_file(&staged);
        return Err(e);
    }
    super::commit_dir(&staged, dest)
}

pub fn read_embedding(path: &Path) -> Result<EmbeddingVideo> {
    let mut r = std::io::BufReader::new(
        std::fs::File::open(path).map_err(|e| Error::format(format!("{}: {e}", path.display())))?,
    );
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)
        .map_err(|_| Error::format("truncated ASEMB header".to_string()))?;
    if &magic != MAGIC {
        return Err(Error::format(format!(
            "bad magic {:?}: not an ASEMB v1 file",
            &magic
        )));
    }
    let mut u32le = || -> Result<u32> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)
            .map_err(|_| Error::format("truncated ASEMB header".to_string()))?;
        Ok(u32::from_le_bytes(b))
    };
    let (t, h, w, d) = (u32le()?, u32le()?, u32le()?, u32le()?);
    if d < 2 {
        return Err(Error::format(format!("embedding dim {d} < 2")));
    }
    let per_frame = (h as usize) * (w as usize) * (d as usize);
    let mut frames = Vec::with_capacity(t as usize);
    let mut bytes = vec![0u8; per_frame * 4];
    for ti in 0..t {
        r.read_exact(&mut bytes)
            .map_err(|_| Error::format(format!("truncated payload at frame {ti}")))?;
        let frame: Vec<f32> = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        frames.push(frame);
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::format("trailing bytes after payload".to_string()));
    }
    Ok(EmbeddingVideo {
        width: w,
        height: h,
        dim: d,
        frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EmbeddingVideo {
        EmbeddingVideo {
            width: 3,
            height: 2,
            dim: 2,
            frames: vec![(0..12).map(|i| i as f32 * 0.25 - 1.0).collect(); 2],
        }
    }

    #[test]
    fn round_trip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.asemb");
        let v = sample();
        write_embedding(&v, &path, DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(read_embedding(&path).unwrap(), v);
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.asemb");
        std::fs::write(&path, b"NOTANEMBEDDING").unwrap();
        assert!(matches!(read_embedding(&path), Err(Error::Format(_))));
    }

    #[test]
    fn truncation_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.asemb");
        write_embedding(&sample(), &path, DEFAULT_SIZE_LIMIT).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(read_embedding(&path), Err(Error::Format(_))));
    }

    #[test]
    fn size_limit_enforced() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.asemb");
        assert!(matches!(
            write_embedding(&sample(), &path, 8),
            Err(Error::InvalidInput(_))
        ));
        assert!(!path.exists());
    }
}
