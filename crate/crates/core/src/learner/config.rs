use serde::{Deserialize, Serialize};

use super::LearnerError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Samples are checked for membership only.
    #[default]
    Approx,
    /// Samples are also checked for the hypothesis closure being a domain model.
    #[serde(alias = "strong")]
    StrongApprox,
}

/// Parameters of one learning run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    pub epsilon: f64,
    pub delta: f64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub cache_counterexamples: bool,
    #[serde(default)]
    pub cache_confirmed: bool,
    /// Conclusions are computed through the oracle so every implication of
    /// the hypothesis is valid in the domain.
    #[serde(default)]
    pub valid_hypothesis: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_counterexamples: Option<u64>,
}

impl LearnerConfig {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            mode: Mode::Approx,
            cache_counterexamples: false,
            cache_confirmed: false,
            valid_hypothesis: false,
            seed: 0,
            max_counterexamples: None,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), LearnerError> {
        let in_range = |x: f64| x > 0.0 && x <= 1.0;
        if !in_range(self.epsilon) {
            return Err(LearnerError::InvalidConfig(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        if !in_range(self.delta) {
            return Err(LearnerError::InvalidConfig(format!(
                "delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        Ok(())
    }

    pub(crate) fn caching(&self) -> bool {
        self.cache_counterexamples || self.cache_confirmed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(LearnerConfig::new(1.0, 1.0).validate().is_ok());
        assert!(LearnerConfig::new(0.0, 0.5).validate().is_err());
        assert!(LearnerConfig::new(0.5, 1.5).validate().is_err());
        assert!(LearnerConfig::new(f64::NAN, 0.5).validate().is_err());
    }

    #[test]
    fn toml_defaults() {
        let c: LearnerConfig =
            toml::from_str("epsilon = 0.01\ndelta = 0.1\nmode = \"strong\"\n").unwrap();
        assert_eq!(c.mode, Mode::StrongApprox);
        assert_eq!(c.seed, 0);
        assert!(!c.valid_hypothesis);
        assert!(
            toml::from_str::<LearnerConfig>("epsilon = 0.1\ndelta = 0.1\ncolour = 1\n").is_err()
        );
    }
}
