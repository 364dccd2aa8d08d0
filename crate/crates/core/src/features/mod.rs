//! Per-voxel feature descriptors.

mod edge;
mod external;
mod intensity;
mod ssc;

pub use edge::{edge_features, edge_features_in_range};
pub use external::{check_feature_grid, load_external_features};
pub use intensity::{
    foreground_deciles, intensity_standardize, normalize_intensity, percentile_sorted,
    IntensityRange, NormalizedIntensity, StandardizationMap, LANDMARK_COUNT,
};
pub use ssc::{ssc_features, SscParams, NEIGHBOURS, PAIRS, SSC_CHANNELS};
