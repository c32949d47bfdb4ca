//! Small filesystem helpers: path-tagged errors and atomic writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{CareError, Result};

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CareError::io(path.display().to_string(), e))
}

/// Writes `contents` to `path` via a sibling temp file plus rename, so a
/// crash mid-write never leaves a truncated file at the destination.
pub fn write_atomic(path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CareError::io(parent.display().to_string(), e))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let io_err = |e| CareError::io(tmp.display().to_string(), e);
    {
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(contents).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(|e| CareError::io(path.display().to_string(), e))
}
