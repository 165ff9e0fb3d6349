//! Atomic file output: write to a temp sibling, rename into place, so a
//! failed run never leaves a partial file behind.

use std::fs;
use std::io;
use std::path::Path;

pub fn atomic_write(path: &Path, content: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| format!("{e}.tmp"))
        .unwrap_or_else(|| "tmp".to_string());
    let tmp = path.with_extension(ext);
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)
}
