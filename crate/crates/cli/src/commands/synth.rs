use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use discreg::synth::{generate, SynthKind, SynthParams};
use discreg::volume::save_volume;
use serde_json::json;

use super::ensure_parent;
use crate::args::{SynthArgs, SynthKindArg};

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(format!("_{suffix}.raw"));
    prefix.with_file_name(name)
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let kind = match args.kind {
        SynthKindArg::Translation => SynthKind::Translation { shift: args.shift },
        SynthKindArg::Sinusoid => SynthKind::Sinusoid {
            amplitude: args.amplitude,
            period: args.period,
        },
        SynthKindArg::Blobs => SynthKind::Blobs,
    };
    let params = SynthParams {
        kind,
        dims: args.dims,
        seed: args.seed,
        structures: args.structures,
    };
    let case = generate(&params)?;
    ensure_parent(&with_suffix(&args.out_prefix, "x"))?;
    let files = [
        ("fixed", with_suffix(&args.out_prefix, "fixed")),
        ("moving", with_suffix(&args.out_prefix, "moving")),
        ("fixed_labels", with_suffix(&args.out_prefix, "fixed_labels")),
        ("moving_labels", with_suffix(&args.out_prefix, "moving_labels")),
        ("field", with_suffix(&args.out_prefix, "field")),
    ];
    save_volume(&case.fixed, &files[0].1)?;
    save_volume(&case.moving, &files[1].1)?;
    save_volume(&case.fixed_labels, &files[2].1)?;
    save_volume(&case.moving_labels, &files[3].1)?;
    save_volume(&case.field, &files[4].1)?;

    let names: serde_json::Map<String, serde_json::Value> = files
        .iter()
        .map(|(k, p)| {
            let name = p.file_name().unwrap_or_default().to_string_lossy().into_owned();
            (k.to_string(), json!(name))
        })
        .collect();
    let meta = json!({
        "params": params,
        "files": names,
        "convention": "fixed(x) = moving(x + field(x))",
    });
    let meta_path = with_suffix(&args.out_prefix, "params").with_extension("json");
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)
        .with_context(|| format!("writing {}", meta_path.display()))?;
    Ok(())
}
