use super::intensity::IntensityRange;
use crate::error::{Error, Result};
use crate::volume::{FeatureVolume, ScalarVolume};

/// Gradient magnitude of the min-max normalized volume.
pub fn edge_features(vol: &ScalarVolume) -> Result<FeatureVolume> {
    edge_features_in_range(vol, IntensityRange::from_min_max(vol))
}

/// Gradient magnitude after mapping `vol` through an explicit intensity window.
///
/// Registering two images with a shared window keeps their edge strengths comparable.
pub fn edge_features_in_range(vol: &ScalarVolume, range: IntensityRange) -> Result<FeatureVolume> {
    let dims = vol.dims();
    if dims.min_axis() < 3 {
        return Err(Error::VolumeTooSmall { dims, min: 3 });
    }
    let norm = range.apply(vol);
    let v = norm.data();
    let strides = [1, dims.x, dims.x * dims.y];
    let extents = dims.as_array();
    let out = dims
        .iter()
        .map(|p| {
            let i = dims.index(p[0], p[1], p[2]);
            let mut sq = 0.0f32;
            for axis in 0..3 {
                let s = strides[axis];
                let g = if p[axis] == 0 {
                    v[i + s] - v[i]
                } else if p[axis] + 1 == extents[axis] {
                    v[i] - v[i - s]
                } else {
                    (v[i + s] - v[i - s]) * 0.5
                };
                sq += g * g;
            }
            sq.sqrt()
        })
        .collect();
    FeatureVolume::new(dims, vol.spacing(), 1, out)
}
