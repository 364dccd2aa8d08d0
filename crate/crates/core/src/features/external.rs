use std::path::Path;

use crate::error::{Error, Result};
use crate::volume::{load_features, Dims, FeatureVolume};

/// Loads an externally computed feature volume (e.g. network outputs).
///
/// With `zscore` set every channel is rescaled to zero mean and unit
/// variance, which puts channels of arbitrary scale on an equal footing
/// under a sum of absolute differences.
pub fn load_external_features(path: impl AsRef<Path>, zscore: bool) -> Result<FeatureVolume> {
    let f = load_features(path)?;
    Ok(if zscore { f.zscore_channels() } else { f })
}

/// Checks that features line up with the image grid they describe.
pub fn check_feature_grid(features: &FeatureVolume, image_dims: Dims) -> Result<()> {
    if features.dims() != image_dims {
        return Err(Error::DimMismatch {
            expected: image_dims,
            actual: features.dims(),
        });
    }
    Ok(())
}
