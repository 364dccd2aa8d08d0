use rayon::prelude::*;

use super::{
    ensure_same_dims, DisplacementField, Dims, FeatureVolume, LabelVolume, ScalarVolume,
};
use crate::error::{Error, Result};
use crate::filter::{convolve_separable, gaussian_kernel};

#[inline]
fn axis_taps(p: f64, n: usize) -> (usize, usize, f64) {
    let p = p.clamp(0.0, (n - 1) as f64);
    let i0 = p.floor() as usize;
    let i1 = (i0 + 1).min(n - 1);
    (i0, i1, p - i0 as f64)
}

/// Trilinear blend of `get(index)` at `p`, clamped to the grid.
///
/// At integer coordinates the fractional weights are exactly zero, so the
/// stored sample is returned unchanged.
#[inline]
pub(crate) fn trilinear(dims: Dims, p: [f64; 3], get: impl Fn(usize) -> f32) -> f32 {
    let (x0, x1, fx) = axis_taps(p[0], dims.x);
    let (y0, y1, fy) = axis_taps(p[1], dims.y);
    let (z0, z1, fz) = axis_taps(p[2], dims.z);
    if fx == 0.0 && fy == 0.0 && fz == 0.0 {
        return get(dims.index(x0, y0, z0));
    }
    let v = |x, y, z| get(dims.index(x, y, z)) as f64;
    let lerp = |a: f64, b: f64, t: f64| a * (1.0 - t) + b * t;
    let c00 = lerp(v(x0, y0, z0), v(x1, y0, z0), fx);
    let c10 = lerp(v(x0, y1, z0), v(x1, y1, z0), fx);
    let c01 = lerp(v(x0, y0, z1), v(x1, y0, z1), fx);
    let c11 = lerp(v(x0, y1, z1), v(x1, y1, z1), fx);
    lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz) as f32
}

/// Samples `vol` at a continuous voxel coordinate; out-of-range points clamp to the edge.
pub fn sample_trilinear(vol: &ScalarVolume, p: [f64; 3]) -> f32 {
    let data = vol.data();
    trilinear(vol.dims(), p, |i| data[i])
}

pub fn sample_trilinear_channel(vol: &FeatureVolume, channel: usize, p: [f64; 3]) -> f32 {
    let c = vol.channels();
    let data = vol.data();
    trilinear(vol.dims(), p, |i| data[i * c + channel])
}

#[inline]
fn displaced(x: usize, y: usize, z: usize, u: [f32; 3]) -> [f64; 3] {
    [
        x as f64 + u[0] as f64,
        y as f64 + u[1] as f64,
        z as f64 + u[2] as f64,
    ]
}

/// Backward warp: `out(x) = moving(x + u(x))` with trilinear sampling.
pub fn warp_scalar(moving: &ScalarVolume, field: &DisplacementField) -> Result<ScalarVolume> {
    let dims = field.dims();
    ensure_same_dims(dims, moving.dims())?;
    let src = moving.data();
    let mut out = vec![0.0f32; dims.len()];
    out.par_chunks_mut(dims.x * dims.y)
        .enumerate()
        .for_each(|(z, slice)| {
            for y in 0..dims.y {
                for x in 0..dims.x {
                    let p = displaced(x, y, z, field.get(x, y, z));
                    slice[x + dims.x * y] = trilinear(dims, p, |i| src[i]);
                }
            }
        });
    moving.with_data(out)
}

/// Backward warp of every channel of a feature volume.
pub fn warp_features(moving: &FeatureVolume, field: &DisplacementField) -> Result<FeatureVolume> {
    let dims = field.dims();
    ensure_same_dims(dims, moving.dims())?;
    let c = moving.channels();
    let src = moving.data();
    let mut out = vec![0.0f32; dims.len() * c];
    out.par_chunks_mut(dims.x * dims.y * c)
        .enumerate()
        .for_each(|(z, slice)| {
            for y in 0..dims.y {
                for x in 0..dims.x {
                    let p = displaced(x, y, z, field.get(x, y, z));
                    let base = (x + dims.x * y) * c;
                    for (ch, o) in slice[base..base + c].iter_mut().enumerate() {
                        *o = trilinear(dims, p, |i| src[i * c + ch]);
                    }
                }
            }
        });
    FeatureVolume::new(dims, moving.spacing(), c, out)
}

/// Backward warp with nearest-neighbour sampling, so no new labels appear.
pub fn warp_labels(labels: &LabelVolume, field: &DisplacementField) -> Result<LabelVolume> {
    let dims = field.dims();
    ensure_same_dims(dims, labels.dims())?;
    let nearest = |p: f64, n: usize| p.round().clamp(0.0, (n - 1) as f64) as usize;
    let out = dims
        .iter()
        .map(|[x, y, z]| {
            let p = displaced(x, y, z, field.get(x, y, z));
            labels.get(nearest(p[0], dims.x), nearest(p[1], dims.y), nearest(p[2], dims.z))
        })
        .collect();
    LabelVolume::with_dtype(dims, labels.spacing(), labels.header().dtype, out)
}

fn check_factor(factor: usize) -> Result<()> {
    if factor == 0 {
        return Err(Error::InvalidParameter("resampling factor must be >= 1".into()));
    }
    Ok(())
}

fn downsample_raw(data: &[f32], dims: Dims, factor: usize) -> (Vec<f32>, Dims) {
    let mut smoothed = data.to_vec();
    convolve_separable(
        &mut smoothed,
        dims,
        &gaussian_kernel(0.5 * factor as f64),
        &mut Vec::new(),
    );
    let out_dims = dims.subsampled(factor);
    let out = out_dims
        .iter()
        .map(|[x, y, z]| smoothed[dims.index(x * factor, y * factor, z * factor)])
        .collect();
    (out, out_dims)
}

fn scaled_spacing(s: [f64; 3], factor: f64) -> [f64; 3] {
    [s[0] * factor, s[1] * factor, s[2] * factor]
}

/// Gaussian prefilter (sigma = factor / 2) followed by taking every `factor`-th voxel.
pub fn downsample(vol: &ScalarVolume, factor: usize) -> Result<ScalarVolume> {
    check_factor(factor)?;
    if factor == 1 {
        return Ok(vol.clone());
    }
    let (out, dims) = downsample_raw(vol.data(), vol.dims(), factor);
    ScalarVolume::new(dims, scaled_spacing(vol.spacing(), factor as f64), out)
}

/// [`downsample`] applied channel by channel.
pub fn downsample_features(vol: &FeatureVolume, factor: usize) -> Result<FeatureVolume> {
    check_factor(factor)?;
    if factor == 1 {
        return Ok(vol.clone());
    }
    let channels: Vec<ScalarVolume> = (0..vol.channels())
        .into_par_iter()
        .map(|c| downsample(&vol.channel(c), factor))
        .collect::<Result<_>>()?;
    FeatureVolume::from_channels(&channels)
}

/// Resamples a coarse field onto `target` and rescales its voxel units.
///
/// Fine voxel `x` reads the coarse field at `x / factor`.
pub fn upsample_field(
    field: &DisplacementField,
    factor: usize,
    target: Dims,
) -> Result<DisplacementField> {
    check_factor(factor)?;
    let src_dims = field.dims();
    let src = field.data();
    let f = factor as f64;
    let data = target
        .iter()
        .map(|[x, y, z]| {
            let p = [x as f64 / f, y as f64 / f, z as f64 / f];
            let mut v = [0.0f32; 3];
            for (c, out) in v.iter_mut().enumerate() {
                *out = (trilinear(src_dims, p, |i| src[i][c]) as f64 * f) as f32;
            }
            v
        })
        .collect();
    DisplacementField::new(target, scaled_spacing(field.spacing(), 1.0 / f), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::UNIT_SPACING;

    fn ramp_x(d: Dims) -> ScalarVolume {
        ScalarVolume::from_fn(d, |x, _, _| x as f32).unwrap()
    }

    #[test]
    fn grid_points_return_stored_values() {
        let v = ScalarVolume::from_fn(Dims::cube(3), |x, y, z| (x * 9 + y * 3 + z) as f32 * 0.1).unwrap();
        assert_eq!(sample_trilinear(&v, [1.0, 1.0, 1.0]), v.get(1, 1, 1));
        assert_eq!(sample_trilinear(&v, [2.0, 0.0, 1.0]), v.get(2, 0, 1));
    }

    #[test]
    fn midpoint_is_linear_blend() {
        let v = ScalarVolume::new(Dims::new(2, 1, 1), UNIT_SPACING, vec![0.0, 2.0]).unwrap();
        assert_eq!(sample_trilinear(&v, [0.5, 0.0, 0.0]), 1.0);
    }

    #[test]
    fn out_of_range_clamps_to_edge() {
        let v = ScalarVolume::from_fn(Dims::cube(4), |x, y, z| (x + 2 * y + 5 * z) as f32 + 1.0).unwrap();
        assert_eq!(sample_trilinear(&v, [-5.0, 0.0, 0.0]), v.get(0, 0, 0));
        assert_eq!(sample_trilinear(&v, [9.0, 3.5, -1.0]), sample_trilinear(&v, [3.0, 3.0, 0.0]));
    }

    #[test]
    fn zero_field_is_identity() {
        let v = ScalarVolume::from_fn(Dims::new(4, 3, 5), |x, y, z| (x * y + z) as f32 * 0.37).unwrap();
        let f = DisplacementField::zeros(v.dims());
        assert_eq!(warp_scalar(&v, &f).unwrap(), v);
        let l = LabelVolume::from_fn(v.dims(), |x, y, _| ((x + y) % 3) as u32).unwrap();
        assert_eq!(warp_labels(&l, &f).unwrap(), l);
    }

    #[test]
    fn constant_shift_pulls_from_neighbour() {
        let d = Dims::new(5, 2, 2);
        let w = warp_scalar(&ramp_x(d), &DisplacementField::constant(d, [1.0, 0.0, 0.0])).unwrap();
        for [x, y, z] in d.iter() {
            assert_eq!(w.get(x, y, z), (x + 1).min(4) as f32);
        }
        let l = LabelVolume::from_fn(d, |x, _, _| x as u32).unwrap();
        let wl = warp_labels(&l, &DisplacementField::constant(d, [-2.0, 0.0, 0.0])).unwrap();
        for [x, y, z] in d.iter() {
            assert_eq!(wl.get(x, y, z), x.saturating_sub(2) as u32);
        }
    }

    #[test]
    fn warp_rejects_dim_mismatch() {
        let v = ramp_x(Dims::cube(3));
        assert!(matches!(
            warp_scalar(&v, &DisplacementField::zeros(Dims::cube(4))),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn downsample_factor_one_and_constant() {
        let v = ramp_x(Dims::new(5, 4, 3));
        assert_eq!(downsample(&v, 1).unwrap(), v);
        let c = ScalarVolume::filled(Dims::new(7, 6, 5), 3.5).unwrap();
        let d = downsample(&c, 2).unwrap();
        assert_eq!(d.dims(), Dims::new(4, 3, 3));
        assert_eq!(d.spacing(), [2.0; 3]);
        assert!(d.data().iter().all(|&x| (x - 3.5).abs() < 1e-5));
        assert!(downsample(&c, 0).is_err());
    }

    #[test]
    fn upsample_rescales_units() {
        let f = DisplacementField::constant(Dims::cube(3), [1.0, 1.0, 1.0]);
        let up = upsample_field(&f, 2, Dims::cube(6)).unwrap();
        assert_eq!(up.dims(), Dims::cube(6));
        assert!(up.data().iter().all(|v| *v == [2.0, 2.0, 2.0]));
        let z = upsample_field(&DisplacementField::zeros(Dims::cube(2)), 3, Dims::cube(5)).unwrap();
        assert!(z.is_zero());
    }
}
