use anyhow::{bail, Context, Result};
use discreg::pipeline::{FeatureSpec, LevelParams, RegistrationConfig, Standardize};

use crate::args::{ConfigOverrides, FeatureKind, StandardizeMode};

const MIB: u64 = 1024 * 1024;

/// Loads the config file (or the defaults) and applies command-line overrides.
pub fn resolve_config(path: Option<&std::path::Path>, o: &ConfigOverrides) -> Result<RegistrationConfig> {
    let cfg = match path {
        Some(p) => RegistrationConfig::from_json_file(p)?,
        None => RegistrationConfig::default(),
    };
    apply_overrides(cfg, o)
}

pub fn apply_overrides(mut cfg: RegistrationConfig, o: &ConfigOverrides) -> Result<RegistrationConfig> {
    if o.single_level {
        let mut level = *cfg.levels.last().context("config has no levels")?;
        level.factor = 1;
        cfg.levels = vec![level];
    }
    apply_level_overrides(&mut cfg.levels, o);
    if let Some(kind) = o.feature {
        cfg.feature = match kind {
            FeatureKind::Intensity => FeatureSpec::Intensity,
            FeatureKind::Edge => FeatureSpec::Edge,
            FeatureKind::Ssc => FeatureSpec::Ssc,
            FeatureKind::External => match (&o.fixed_features, &o.moving_features) {
                (Some(f), Some(m)) => FeatureSpec::External {
                    fixed: f.clone(),
                    moving: m.clone(),
                },
                _ => bail!("--feature external needs --fixed-features and --moving-features"),
            },
        };
    } else if o.fixed_features.is_some() || o.moving_features.is_some() {
        bail!("--fixed-features/--moving-features require --feature external");
    }
    if o.zscore_external {
        cfg.zscore_external = true;
    }
    if let Some(mode) = o.standardize {
        cfg.standardize = match mode {
            StandardizeMode::None => Standardize::None,
            StandardizeMode::ToFixed => Standardize::ToFixed,
            StandardizeMode::ToReference => Standardize::ToReference(
                o.reference
                    .clone()
                    .context("--standardize to-reference needs --reference")?,
            ),
        };
    }
    if let Some(mb) = o.memory_budget {
        if mb == 0 {
            bail!("memory budget must be positive");
        }
        cfg.memory_budget_bytes = Some(mb.saturating_mul(MIB));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_level_overrides(levels: &mut [LevelParams], o: &ConfigOverrides) {
    for level in levels {
        if let Some(q) = o.q {
            level.q = q;
        }
        if let Some(l) = o.lmax {
            level.l_max = l;
        }
        if let Some(a) = o.alpha {
            level.alpha = a;
        }
        if let Some(r) = o.patch_radius {
            level.patch_radius = r;
        }
    }
}
