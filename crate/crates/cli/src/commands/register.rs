use anyhow::Result;
use discreg::pipeline::register;
use discreg::volume::{load_scalar, save_volume};
use log::info;

use super::ensure_parent;
use crate::args::RegisterArgs;
use crate::config::resolve_config;

pub fn cmd_register(args: &RegisterArgs) -> Result<()> {
    let cfg = resolve_config(args.config.as_deref(), &args.overrides)?;
    let fixed = load_scalar(&args.fixed)?;
    let moving = load_scalar(&args.moving)?;
    info!(
        "registering {} onto {} with {} features, {} level(s)",
        args.moving.display(),
        args.fixed.display(),
        cfg.feature.name(),
        cfg.levels.len()
    );
    let result = register(&fixed, &moving, &cfg)?;
    ensure_parent(&args.out_field)?;
    ensure_parent(&args.out_warped)?;
    save_volume(&result.field, &args.out_field)?;
    save_volume(&result.warped, &args.out_warped)?;
    Ok(())
}
