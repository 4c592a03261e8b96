use std::env;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use hornex_core::io::{load_context, ContextDocument};

pub const DATA_DIR_VAR: &str = "HORNEX_DATA_DIR";

/// `path` itself if it exists, else the same relative path under
/// `$HORNEX_DATA_DIR` if that exists.
pub fn locate(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    match env::var_os(DATA_DIR_VAR) {
        Some(dir) => {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                candidate
            } else {
                path.to_path_buf()
            }
        }
        None => path.to_path_buf(),
    }
}

/// `<dir>/<stem>.scaling.toml` beside a CSV file, if present.
fn sibling_scaling(data: &Path) -> Option<PathBuf> {
    let stem = data.file_stem()?.to_str()?;
    let candidate = data.with_file_name(format!("{stem}.scaling.toml"));
    candidate.exists().then_some(candidate)
}

pub fn load(data: &Path, scaling: Option<&Path>) -> Result<ContextDocument> {
    let data = locate(data);
    let scaling = match scaling {
        Some(s) => Some(locate(s)),
        None => sibling_scaling(&data),
    };
    load_context(&data, scaling.as_deref()).with_context(|| format!("loading {}", data.display()))
}

/// Dataset name used by the service: the file stem.
pub fn name_of(data: &Path) -> String {
    data.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| data.display().to_string())
}
