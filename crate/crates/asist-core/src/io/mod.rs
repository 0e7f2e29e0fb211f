//! File formats: 16-bit PNG mask sequences with a CTC-style track table,
//! the ASEMB binary embedding container, JSON reports, TOML configs, and the
//! colorized inspection renderer.

pub mod colorize;
pub mod config;
pub mod embedding;
pub mod masks;
pub mod report;

use std::path::Path;

use crate::error::Result;

/// Stage outputs into a temp sibling, then atomically swap into place.
/// An existing destination is replaced, so reruns are idempotent.
pub(crate) fn commit_dir(staged: &Path, dest: &Path) -> Result<()> {
    if dest.exists() {
        if dest.is_dir() {
            std::fs::remove_dir_all(dest)?;
        } else {
            std::fs::remove_file(dest)?;
        }
    }
    if let Some(parent) = dest.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::rename(staged, dest)?;
    Ok(())
}

/// Temp staging path next to the destination (same filesystem, so the final
/// rename is atomic).
pub(crate) fn staging_path(dest: &Path) -> std::path::PathBuf {
    let name = dest
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    dest.with_file_name(format!(".{name}.tmp-{}", std::process::id()))
}
