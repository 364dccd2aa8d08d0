//! Batch manifest: explicit pairs and/or a volume list expanded into all ordered pairs.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use discreg::pipeline::RegistrationConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairEntry {
    pub id: String,
    pub fixed: PathBuf,
    pub moving: PathBuf,
    pub fixed_labels: PathBuf,
    pub moving_labels: PathBuf,
    /// Names used in the report; default to the image file stems.
    #[serde(default)]
    pub fixed_id: Option<String>,
    #[serde(default)]
    pub moving_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeEntry {
    pub id: String,
    pub image: PathBuf,
    pub labels: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Manifest {
    pub pairs: Vec<PairEntry>,
    pub volumes: Vec<VolumeEntry>,
    /// Count self-pairs when expanding `volumes`.
    pub include_self: bool,
    pub config: Option<RegistrationConfig>,
    /// Path to a config file; ignored when `config` is given inline.
    pub config_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

/// One unit of batch work with resolved paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub id: String,
    pub fixed_id: String,
    pub moving_id: String,
    pub fixed: PathBuf,
    pub moving: PathBuf,
    pub fixed_labels: PathBuf,
    pub moving_labels: PathBuf,
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        let mut m: Manifest = serde_json::from_str(&text)
            .with_context(|| format!("parsing manifest {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        m.rebase(base);
        Ok(m)
    }

    /// Makes relative paths relative to `base`.
    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in &mut self.pairs {
            fix(&mut p.fixed);
            fix(&mut p.moving);
            fix(&mut p.fixed_labels);
            fix(&mut p.moving_labels);
        }
        for v in &mut self.volumes {
            fix(&mut v.image);
            fix(&mut v.labels);
        }
        if let Some(c) = &mut self.config_path {
            fix(c);
        }
        if let Some(o) = &mut self.output_dir {
            fix(o);
        }
    }

    /// Explicit pairs followed by the expansion of `volumes`, with unique ids.
    pub fn jobs(&self, include_self: bool) -> Result<Vec<Job>> {
        let include_self = include_self || self.include_self;
        let mut jobs: Vec<Job> = self
            .pairs
            .iter()
            .map(|p| Job {
                id: p.id.clone(),
                fixed_id: p.fixed_id.clone().unwrap_or_else(|| stem(&p.fixed)),
                moving_id: p.moving_id.clone().unwrap_or_else(|| stem(&p.moving)),
                fixed: p.fixed.clone(),
                moving: p.moving.clone(),
                fixed_labels: p.fixed_labels.clone(),
                moving_labels: p.moving_labels.clone(),
            })
            .collect();
        let mut vol_ids = HashSet::new();
        for v in &self.volumes {
            if !vol_ids.insert(&v.id) {
                bail!("duplicate volume id {:?}", v.id);
            }
        }
        for f in &self.volumes {
            for m in &self.volumes {
                if f.id == m.id && !include_self {
                    continue;
                }
                jobs.push(Job {
                    id: format!("{}__{}", f.id, m.id),
                    fixed_id: f.id.clone(),
                    moving_id: m.id.clone(),
                    fixed: f.image.clone(),
                    moving: m.image.clone(),
                    fixed_labels: f.labels.clone(),
                    moving_labels: m.labels.clone(),
                });
            }
        }
        let mut seen = HashSet::new();
        for j in &jobs {
            if !seen.insert(&j.id) {
                bail!("duplicate pair id {:?}", j.id);
            }
        }
        if jobs.is_empty() {
            bail!("manifest lists no pairs");
        }
        Ok(jobs)
    }
}
