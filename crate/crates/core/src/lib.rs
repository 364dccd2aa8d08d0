//! Deformable registration of 3-D volumes by discrete optimization over a
//! quantized displacement space, with pluggable per-voxel features and
//! Jaccard-overlap evaluation.

pub mod error;
pub mod eval;
pub mod features;
mod filter;
pub mod pipeline;
pub mod regcore;
pub mod synth;
pub mod volume;

pub use error::{Error, Result};
