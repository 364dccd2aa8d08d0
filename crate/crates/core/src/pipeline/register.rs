use log::{debug, info};

use super::chunked::{chunked_dsv_execution, CostFilter};
use super::config::{FeatureSpec, RegistrationConfig, Standardize};
use crate::error::{Error, Result};
use crate::features::{
    check_feature_grid, edge_features_in_range, intensity_standardize, load_external_features,
    ssc_features, IntensityRange,
};
use crate::volume::{
    downsample, downsample_features, ensure_same_dims, load_scalar, upsample_field,
    warp_features, warp_scalar, DisplacementField, FeatureVolume, ScalarVolume,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Registration {
    /// Displacement on the fixed grid, in fixed-grid voxels.
    pub field: DisplacementField,
    /// The moving image pulled through `field`.
    pub warped: ScalarVolume,
}

/// Additive field update `u = coarse + increment`.
///
/// This approximates composition of the two deformations and is accurate
/// while increments stay small relative to the field's variation.
pub fn compose_fields(
    coarse: &DisplacementField,
    increment: &DisplacementField,
) -> Result<DisplacementField> {
    ensure_same_dims(coarse.dims(), increment.dims())?;
    let data = coarse
        .data()
        .iter()
        .zip(increment.data())
        .map(|(a, b)| [a[0] + b[0], a[1] + b[1], a[2] + b[2]])
        .collect();
    DisplacementField::new(coarse.dims(), coarse.spacing(), data)
}

enum Extractor {
    Intensity([f64; 2]),
    Edge,
    Ssc(crate::features::SscParams),
    External {
        fixed: FeatureVolume,
        moving: FeatureVolume,
    },
}

impl Extractor {
    /// Features of the fixed level image and of the warped moving level image.
    ///
    /// Intensity-derived features share the fixed image's window so SAD compares like with like.
    fn level_pair(
        &self,
        fixed: &ScalarVolume,
        moving: &ScalarVolume,
        field: &DisplacementField,
        factor: usize,
    ) -> Result<(FeatureVolume, FeatureVolume)> {
        match self {
            Extractor::Intensity([lo, hi]) => {
                let warped = warp_scalar(moving, field)?;
                let range = IntensityRange::from_percentiles(fixed, *lo, *hi)?;
                Ok((range.apply(fixed), range.apply(&warped)))
            }
            Extractor::Edge => {
                let warped = warp_scalar(moving, field)?;
                let range = IntensityRange::from_min_max(fixed);
                Ok((
                    edge_features_in_range(fixed, range)?,
                    edge_features_in_range(&warped, range)?,
                ))
            }
            Extractor::Ssc(params) => {
                let warped = warp_scalar(moving, field)?;
                Ok((ssc_features(fixed, params)?, ssc_features(&warped, params)?))
            }
            Extractor::External {
                fixed: ff,
                moving: fm,
            } => {
                let f = downsample_features(ff, factor)?;
                let m = downsample_features(fm, factor)?;
                Ok((f, warp_features(&m, field)?))
            }
        }
    }
}

fn prepare(
    fixed: &ScalarVolume,
    cfg: &RegistrationConfig,
) -> Result<Extractor> {
    Ok(match &cfg.feature {
        FeatureSpec::Intensity => Extractor::Intensity(cfg.intensity_percentiles),
        FeatureSpec::Edge => Extractor::Edge,
        FeatureSpec::Ssc => Extractor::Ssc(cfg.ssc),
        FeatureSpec::External {
            fixed: fp,
            moving: mp,
        } => {
            let ff = load_external_features(fp, cfg.zscore_external)?;
            let fm = load_external_features(mp, cfg.zscore_external)?;
            check_feature_grid(&ff, fixed.dims())?;
            check_feature_grid(&fm, fixed.dims())?;
            if ff.channels() != fm.channels() {
                return Err(Error::ChannelMismatch {
                    expected: ff.channels(),
                    actual: fm.channels(),
                });
            }
            Extractor::External {
                fixed: ff,
                moving: fm,
            }
        }
    })
}

fn standardized(
    fixed: &ScalarVolume,
    moving: &ScalarVolume,
    mode: &Standardize,
) -> Result<(ScalarVolume, ScalarVolume)> {
    match mode {
        Standardize::None => Ok((fixed.clone(), moving.clone())),
        Standardize::ToFixed => Ok((fixed.clone(), intensity_standardize(moving, fixed)?)),
        Standardize::ToReference(path) => {
            let reference = load_scalar(path)?;
            Ok((
                intensity_standardize(fixed, &reference)?,
                intensity_standardize(moving, &reference)?,
            ))
        }
    }
}

/// Coarse-to-fine registration of `moving` onto `fixed`.
///
/// Each level downsamples both images, warps the moving image by the
/// current estimate, recomputes features on the warped image, and adds the
/// winner-takes-all increment to the upsampled running field.
pub fn register(
    fixed: &ScalarVolume,
    moving: &ScalarVolume,
    cfg: &RegistrationConfig,
) -> Result<Registration> {
    cfg.validate()?;
    ensure_same_dims(fixed.dims(), moving.dims())?;
    let (fixed_s, moving_s) = standardized(fixed, moving, &cfg.standardize)?;
    let extractor = prepare(fixed, cfg)?;
    let budget = cfg.memory_budget();

    let mut field: Option<(DisplacementField, usize)> = None;
    for (i, level) in cfg.levels.iter().enumerate() {
        let fixed_l = downsample(&fixed_s, level.factor)?;
        let moving_l = downsample(&moving_s, level.factor)?;
        let dims = fixed_l.dims();
        let min = level.min_extent();
        if dims.min_axis() < min {
            return Err(Error::VolumeTooSmall { dims, min });
        }
        let current = match &field {
            None => DisplacementField::zeros(dims),
            Some((f, prev_factor)) => upsample_field(f, prev_factor / level.factor, dims)?,
        };
        let (ff, fm) = extractor.level_pair(&fixed_l, &moving_l, &current, level.factor)?;
        let disp = level.displacement_set()?;
        info!(
            "level {i}: grid {dims}, factor {}, {} labels, {} channels",
            level.factor,
            disp.len(),
            ff.channels()
        );
        let filter = CostFilter {
            patch_radius: level.patch_radius,
            smooth_sigma: level.smooth_sigma(),
        };
        let increment = chunked_dsv_execution(&ff, &fm, &disp, filter, budget)?;
        debug!("level {i}: zero increment = {}", increment.is_zero());
        field = Some((compose_fields(&current, &increment)?, level.factor));
    }
    let (field, _) = field.expect("validated config has levels");
    let field = field.with_spacing(fixed.spacing());
    let warped = warp_scalar(moving, &field)?;
    Ok(Registration { field, warped })
}
