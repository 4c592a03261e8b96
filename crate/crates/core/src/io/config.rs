use std::path::Path;

use crate::learner::LearnerConfig;

use super::{read_file, IoError, ScalingSpec};

pub fn load_scaling_spec(path: &Path) -> Result<ScalingSpec, IoError> {
    let text = read_file(path)?;
    toml::from_str(&text).map_err(|e| IoError::Invalid(format!("{}: {e}", path.display())))
}

/// Reads a learner configuration from TOML and validates it.
pub fn load_learner_config(path: &Path) -> Result<LearnerConfig, IoError> {
    let text = read_file(path)?;
    let config: LearnerConfig =
        toml::from_str(&text).map_err(|e| IoError::Invalid(format!("{}: {e}", path.display())))?;
    config
        .validate()
        .map_err(|e| IoError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(config)
}
