use anyhow::Result;
use discreg::features::{edge_features, load_external_features, normalize_intensity, ssc_features, SscParams};
use discreg::volume::{load_scalar, save_volume};
use log::warn;

use super::ensure_parent;
use crate::args::{FeatureKind, FeaturesArgs};

pub fn cmd_features(args: &FeaturesArgs) -> Result<()> {
    let out = match args.descriptor {
        FeatureKind::Intensity => {
            let n = normalize_intensity(&load_scalar(&args.input)?, args.p_low, args.p_high)?;
            if n.degenerate {
                warn!("{}: constant intensity window, wrote 0.5 everywhere", args.input.display());
            }
            n.features
        }
        FeatureKind::Edge => edge_features(&load_scalar(&args.input)?)?,
        FeatureKind::Ssc => {
            let params = SscParams {
                patch_radius: args.ssc_radius,
                noise_floor: args.noise_floor,
            };
            ssc_features(&load_scalar(&args.input)?, &params)?
        }
        FeatureKind::External => load_external_features(&args.input, args.zscore)?,
    };
    ensure_parent(&args.out)?;
    save_volume(&out, &args.out)?;
    Ok(())
}
