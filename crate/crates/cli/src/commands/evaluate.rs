use std::path::Path;

use anyhow::{Context, Result};
use discreg::eval::{mean_jc_pair, structure_labels, JcReport, PairReport};
use discreg::volume::{load_field, load_labels, save_volume, warp_labels};

use super::ensure_parent;
use crate::args::EvaluateArgs;

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let fixed = load_labels(&args.fixed_labels)?;
    let (warped, moving_id) = match (&args.warped_labels, &args.moving_labels) {
        (Some(w), _) => (load_labels(w)?, stem(w)),
        (None, Some(m)) => {
            let field_path = args.field.as_ref().context("--moving-labels needs --field")?;
            let field = load_field(field_path)?;
            (warp_labels(&load_labels(m)?, &field)?, stem(m))
        }
        (None, None) => unreachable!("clap requires one label source"),
    };
    if let Some(p) = &args.out_warped_labels {
        ensure_parent(p)?;
        save_volume(&warped, p)?;
    }
    let labels = if args.labels.is_empty() {
        structure_labels(&fixed, &warped)
    } else {
        args.labels.iter().copied().filter(|&l| l != 0).collect()
    };
    let pair = mean_jc_pair(&fixed, &warped, &labels)?;
    let report = JcReport::new(
        vec![PairReport::new(stem(&args.fixed_labels), moving_id, pair)],
        vec![],
    )?;
    ensure_parent(&args.out_report)?;
    let (json, _) = report.write(&args.out_report)?;
    println!("mean JC {:.4} over {} structures -> {}", report.dataset_mean, report.pairs[0].n, json.display());
    Ok(())
}
