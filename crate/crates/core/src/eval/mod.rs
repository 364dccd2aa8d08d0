//! Jaccard overlap scoring and report assembly.
//!
//! Scores are averaged first over the structures of one registered pair and
//! then over pairs; voxels are never pooled across pairs.

mod jaccard;
mod report;

pub use jaccard::{jaccard, mean_jc_dataset, mean_jc_pair, structure_labels, PairJc};
pub use report::{FailedPair, JcReport, PairReport, N_POLICY, REPORT_SCHEMA};
