use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MterError, Result};
use crate::inverse::{even_inverse_spectral, DEFAULT_GUARD_THRESHOLD};
use crate::laurent::Mask;
use crate::transform::DecimationMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Exact,
    Kernel,
}

impl FromStr for ModeName {
    type Err = MterError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_periodic" => Ok(ModeName::Exact),
            "kernel" => Ok(ModeName::Kernel),
            other => Err(MterError::Parameter(format!(
                "unknown decimation mode {other:?}"
            ))),
        }
    }
}

impl fmt::Display for ModeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeName::Exact => "exact",
            ModeName::Kernel => "kernel",
        })
    }
}

/// Run-wide numerical settings, read from a JSON file with every field
/// optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub circle_samples: usize,
    pub guard_threshold: f64,
    pub inverse_tol: f64,
    pub seed: u64,
    pub mode: ModeName,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            circle_samples: 1 << 14,
            guard_threshold: DEFAULT_GUARD_THRESHOLD,
            inverse_tol: 1e-12,
            seed: 0,
            mode: ModeName::Exact,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| MterError::Format(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.circle_samples.is_power_of_two() || self.circle_samples < 1024 {
            return Err(MterError::Samples {
                samples: self.circle_samples,
                min: 1024,
            });
        }
        if self.guard_threshold.is_nan() || self.guard_threshold <= 0.0 {
            return Err(MterError::Parameter(format!(
                "guard_threshold must be positive, got {}",
                self.guard_threshold
            )));
        }
        if self.inverse_tol.is_nan() || self.inverse_tol <= 0.0 {
            return Err(MterError::Parameter(format!(
                "inverse_tol must be positive, got {}",
                self.inverse_tol
            )));
        }
        Ok(())
    }

    /// The configured decimation; kernel mode runs the spectral inversion.
    pub fn decimation_mode(&self, alpha: &Mask<f64>) -> Result<DecimationMode> {
        self.decimation_mode_named(self.mode, alpha)
    }

    pub fn decimation_mode_named(
        &self,
        mode: ModeName,
        alpha: &Mask<f64>,
    ) -> Result<DecimationMode> {
        match mode {
            ModeName::Exact => Ok(DecimationMode::ExactPeriodic {
                guard: self.guard_threshold,
            }),
            ModeName::Kernel => Ok(DecimationMode::Kernel(even_inverse_spectral(
                alpha,
                self.inverse_tol,
                self.guard_threshold,
            )?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_files() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.circle_samples, 16384);
        let c = RunConfig::from_json(r#"{"seed": 7, "mode": "kernel"}"#).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.mode, ModeName::Kernel);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_json(r#"{"circle_samples": 512}"#).is_err());
        assert!(RunConfig::from_json(r#"{"circle_samples": 3000}"#).is_err());
        assert!(RunConfig::from_json(r#"{"inverse_tol": 0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(RunConfig::from_json("not json").is_err());
    }

    #[test]
    fn mode_names() {
        assert_eq!("exact".parse::<ModeName>().unwrap(), ModeName::Exact);
        assert_eq!("kernel".parse::<ModeName>().unwrap().to_string(), "kernel");
        assert!("fast".parse::<ModeName>().is_err());
    }
}
