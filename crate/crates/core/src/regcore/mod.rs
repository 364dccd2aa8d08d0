//! Discrete optimization over a quantized displacement space.
//!
//! The pipeline is: build the displacement-space cost volume from two feature
//! volumes, sum costs over a local window, smooth each label's cost map, and
//! pick the cheapest displacement per voxel.

mod cost;
mod displacement;
mod energy;
mod wta;

pub use cost::{aggregate_costs, build_dsv, regularize_dsv, sad, CostVolume};
pub(crate) use cost::build_dsv_labels;
pub use displacement::{build_displacement_set, DisplacementSet};
pub use energy::{data_term, energy, smoothness_term};
pub use wta::{winner_takes_all, WinnerAccumulator};

/// Smoothing strength of the cost-map regularizer: `sigma = sqrt(alpha)`.
pub fn smoothing_sigma(alpha: f64) -> f64 {
    alpha.max(0.0).sqrt()
}
