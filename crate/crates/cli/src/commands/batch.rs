use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use discreg::eval::{mean_jc_pair, structure_labels, FailedPair, JcReport, PairReport};
use discreg::pipeline::{register, RegistrationConfig};
use discreg::volume::{load_labels, load_scalar, save_volume, warp_labels};
use log::{info, warn};
use rayon::prelude::*;

use crate::args::BatchArgs;
use crate::config::apply_overrides;
use crate::manifest::{Job, Manifest};

fn run_job(job: &Job, cfg: &RegistrationConfig, fields: Option<&Path>) -> discreg::Result<PairReport> {
    let fixed = load_scalar(&job.fixed)?;
    let moving = load_scalar(&job.moving)?;
    let fixed_labels = load_labels(&job.fixed_labels)?;
    let moving_labels = load_labels(&job.moving_labels)?;
    let reg = register(&fixed, &moving, cfg)?;
    if let Some(dir) = fields {
        save_volume(&reg.field, dir.join(format!("{}_field.raw", job.id)))?;
    }
    let warped = warp_labels(&moving_labels, &reg.field)?;
    let labels = structure_labels(&fixed_labels, &moving_labels);
    let jc = mean_jc_pair(&fixed_labels, &warped, &labels)?;
    Ok(PairReport::new(job.fixed_id.clone(), job.moving_id.clone(), jc))
}

pub fn cmd_batch(args: &BatchArgs) -> Result<()> {
    let manifest = Manifest::load(&args.manifest)?;
    let jobs = manifest.jobs(args.include_self)?;
    let base = match (&manifest.config, &manifest.config_path) {
        (Some(c), _) => c.clone(),
        (None, Some(p)) => RegistrationConfig::from_json_file(p)?,
        (None, None) => RegistrationConfig::default(),
    };
    let cfg = apply_overrides(base, &args.overrides)?;

    let out_dir: PathBuf = args
        .out_dir
        .clone()
        .or_else(|| manifest.output_dir.clone())
        .context("no output directory: set output_dir in the manifest or pass --out-dir")?;
    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let fields = args.save_fields.then_some(out_dir.as_path());
    info!("batch of {} pairs", jobs.len());

    let outcomes: Vec<_> = jobs
        .par_iter()
        .map(|job| (job, run_job(job, &cfg, fields)))
        .collect();
    let mut pairs = Vec::new();
    let mut failed = Vec::new();
    for (job, outcome) in outcomes {
        match outcome {
            Ok(p) => pairs.push(p),
            Err(e) => {
                warn!("pair {} skipped: {e}", job.id);
                failed.push(FailedPair {
                    fixed: job.fixed_id.clone(),
                    moving: job.moving_id.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }
    let report = JcReport::new(pairs, failed).context("every pair failed")?;
    let (json, csv) = report.write(out_dir.join("report.json"))?;
    println!(
        "dataset mean JC {:.4} over {} pairs ({} failed) -> {}, {}",
        report.dataset_mean,
        report.m,
        report.failed.len(),
        json.display(),
        csv.display()
    );
    Ok(())
}
