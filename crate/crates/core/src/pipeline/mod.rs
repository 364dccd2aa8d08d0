//! Multi-resolution registration driver.

mod chunked;
mod config;
mod register;

pub use chunked::{chunked_dsv_execution, CostFilter};
pub use config::{FeatureSpec, LevelParams, RegistrationConfig, Standardize, DEFAULT_MEMORY_BUDGET};
pub use register::{compose_fields, register, Registration};
