use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SscParams;
use crate::regcore::{smoothing_sigma, DisplacementSet};

pub const DEFAULT_MEMORY_BUDGET: u64 = 512 * 1024 * 1024;

/// Which per-voxel feature drives the cost volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureSpec {
    Intensity,
    Edge,
    Ssc,
    /// Precomputed feature volumes on the fixed and moving grids.
    External { fixed: PathBuf, moving: PathBuf },
}

impl FeatureSpec {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureSpec::Intensity => "intensity",
            FeatureSpec::Edge => "edge",
            FeatureSpec::Ssc => "ssc",
            FeatureSpec::External { .. } => "external",
        }
    }
}

/// Intensity standardization applied before feature extraction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Standardize {
    #[default]
    None,
    /// Map the moving image onto the fixed image's intensity scale.
    ToFixed,
    /// Map both images onto a shared reference volume.
    ToReference(PathBuf),
}

/// Search and regularization settings of one resolution level.
///
/// Lengths are in voxels of the level's own grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelParams {
    pub factor: usize,
    pub q: f64,
    pub l_max: f64,
    pub patch_radius: usize,
    pub alpha: f64,
}

impl LevelParams {
    pub fn smooth_sigma(&self) -> f64 {
        smoothing_sigma(self.alpha)
    }

    pub fn displacement_set(&self) -> Result<DisplacementSet> {
        DisplacementSet::new(self.q, self.l_max)
    }

    /// Smallest grid extent this level can search: `2 l_max + 1`.
    pub fn min_extent(&self) -> usize {
        2 * self.l_max.ceil() as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegistrationConfig {
    pub feature: FeatureSpec,
    /// Coarse to fine; the last level must run at full resolution.
    pub levels: Vec<LevelParams>,
    pub standardize: Standardize,
    /// Per-channel zero-mean, unit-variance rescaling of external features.
    pub zscore_external: bool,
    pub intensity_percentiles: [f64; 2],
    pub ssc: SscParams,
    /// Upper bound on cost-volume bytes held at once.
    pub memory_budget_bytes: Option<u64>,
}

impl Default for RegistrationConfig {
    fn default() -> Self {
        Self {
            feature: FeatureSpec::Ssc,
            levels: vec![
                LevelParams {
                    factor: 2,
                    q: 1.0,
                    l_max: 4.0,
                    patch_radius: 2,
                    alpha: 2.0,
                },
                LevelParams {
                    factor: 1,
                    q: 1.0,
                    l_max: 2.0,
                    patch_radius: 2,
                    alpha: 2.0,
                },
            ],
            standardize: Standardize::None,
            zscore_external: false,
            intensity_percentiles: [1.0, 99.0],
            ssc: SscParams::default(),
            memory_budget_bytes: None,
        }
    }
}

impl RegistrationConfig {
    /// One full-resolution level.
    pub fn single_level(feature: FeatureSpec, q: f64, l_max: f64, patch_radius: usize, alpha: f64) -> Self {
        Self {
            feature,
            levels: vec![LevelParams {
                factor: 1,
                q,
                l_max,
                patch_radius,
                alpha,
            }],
            ..Self::default()
        }
    }

    pub fn with_feature(mut self, feature: FeatureSpec) -> Self {
        self.feature = feature;
        self
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| {
            Error::InvalidParameter(format!("config {}: {e}", path.display()))
        })
    }

    pub fn memory_budget(&self) -> u64 {
        self.memory_budget_bytes.unwrap_or(DEFAULT_MEMORY_BUDGET)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        let Some(last) = self.levels.last() else {
            return invalid("at least one level is required".into());
        };
        if last.factor != 1 {
            return invalid(format!("the last level must have factor 1, got {}", last.factor));
        }
        for (i, level) in self.levels.iter().enumerate() {
            if level.factor == 0 {
                return invalid(format!("level {i}: factor must be >= 1"));
            }
            if !(level.alpha.is_finite() && level.alpha >= 0.0) {
                return invalid(format!("level {i}: alpha must be >= 0, got {}", level.alpha));
            }
            level.displacement_set()?;
        }
        for (i, pair) in self.levels.windows(2).enumerate() {
            let (coarse, fine) = (pair[0].factor, pair[1].factor);
            if coarse < fine || coarse % fine != 0 {
                return invalid(format!(
                    "level factors must be non-increasing and divide evenly ({coarse} then {fine} at level {})",
                    i + 1
                ));
            }
        }
        let [lo, hi] = self.intensity_percentiles;
        if !(0.0 <= lo && lo < hi && hi <= 100.0) {
            return invalid(format!("invalid intensity percentiles {lo}, {hi}"));
        }
        self.ssc.validate()?;
        if self.memory_budget_bytes == Some(0) {
            return invalid("memory budget must be positive".into());
        }
        Ok(())
    }
}
