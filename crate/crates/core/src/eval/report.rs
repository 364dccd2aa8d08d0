use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::jaccard::{mean_jc_dataset, PairJc};
use crate::error::{Error, Result};

pub const REPORT_SCHEMA: u32 = 1;
pub const N_POLICY: &str = "skip-empty";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub fixed: String,
    pub moving: String,
    pub per_structure: BTreeMap<u32, f64>,
    pub mean: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl PairReport {
    pub fn new(fixed: impl Into<String>, moving: impl Into<String>, jc: PairJc) -> Self {
        Self {
            fixed: fixed.into(),
            moving: moving.into(),
            n: jc.structure_count(),
            per_structure: jc.per_structure,
            mean: jc.mean,
        }
    }
}

/// A pair that could not be registered or scored; excluded from M.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedPair {
    pub fixed: String,
    pub moving: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JcReport {
    pub schema: u32,
    pub pairs: Vec<PairReport>,
    pub dataset_mean: f64,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N_policy")]
    pub n_policy: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed: Vec<FailedPair>,
}

impl JcReport {
    /// Assembles a report with pairs sorted by (fixed, moving) id.
    pub fn new(mut pairs: Vec<PairReport>, mut failed: Vec<FailedPair>) -> Result<Self> {
        pairs.sort_by(|a, b| (&a.fixed, &a.moving).cmp(&(&b.fixed, &b.moving)));
        failed.sort_by(|a, b| (&a.fixed, &a.moving).cmp(&(&b.fixed, &b.moving)));
        let means: Vec<f64> = pairs.iter().map(|p| p.mean).collect();
        Ok(Self {
            schema: REPORT_SCHEMA,
            dataset_mean: mean_jc_dataset(&means)?,
            m: pairs.len(),
            pairs,
            n_policy: N_POLICY.to_string(),
            failed,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("report: {e}")))
    }

    /// One row per (pair, structure), then the pair mean, then the dataset mean.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fixed,moving,structure,jc\n");
        for p in &self.pairs {
            for (label, jc) in &p.per_structure {
                let _ = writeln!(out, "{},{},{},{}", p.fixed, p.moving, label, jc);
            }
            let _ = writeln!(out, "{},{},mean,{}", p.fixed, p.moving, p.mean);
        }
        let _ = writeln!(out, ",,dataset_mean,{}", self.dataset_mean);
        out
    }

    /// Writes `<stem>.json` and `<stem>.csv`, returning both paths.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let path = path.as_ref();
        let json = path.with_extension("json");
        let csv = path.with_extension("csv");
        std::fs::write(&json, self.to_json()).map_err(|e| Error::io(&json, e))?;
        std::fs::write(&csv, self.to_csv()).map_err(|e| Error::io(&csv, e))?;
        Ok((json, csv))
    }
}
