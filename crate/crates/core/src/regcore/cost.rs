use std::ops::Range;

use rayon::prelude::*;

use super::DisplacementSet;
use crate::error::{Error, Result};
use crate::filter::{box_kernel, convolve_separable, gaussian_kernel};
use crate::volume::{ensure_same_dims, Dims, FeatureVolume};
use crate::volume::resample::trilinear;

/// Similarity costs for every voxel and displacement label.
///
/// Storage is label-major: one contiguous cost map per label.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVolume {
    dims: Dims,
    label_count: usize,
    costs: Vec<f32>,
}

impl CostVolume {
    pub fn new(dims: Dims, label_count: usize, costs: Vec<f32>) -> Result<Self> {
        let expected = dims.len() * label_count;
        if costs.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: costs.len(),
            });
        }
        if let Some(index) = costs.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            dims,
            label_count,
            costs,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    pub fn costs(&self) -> &[f32] {
        &self.costs
    }

    pub fn map(&self, label: usize) -> &[f32] {
        let n = self.dims.len();
        &self.costs[label * n..(label + 1) * n]
    }

    #[inline]
    pub fn get(&self, voxel: usize, label: usize) -> f32 {
        self.costs[label * self.dims.len() + voxel]
    }

    /// Bytes held by one label's cost map.
    pub fn map_bytes(dims: Dims) -> u64 {
        (dims.len() * std::mem::size_of::<f32>()) as u64
    }

    fn for_each_map(&mut self, f: impl Fn(&mut [f32], &mut Vec<f32>) + Sync + Send) {
        let n = self.dims.len();
        self.costs
            .par_chunks_mut(n)
            .for_each_init(Vec::new, |scratch, map| f(map, scratch));
    }

    /// Box-sums every cost map over a `(2r+1)³` window in place.
    pub fn aggregate_in_place(&mut self, patch_radius: usize) {
        if patch_radius == 0 {
            return;
        }
        let dims = self.dims;
        let kernel = box_kernel(patch_radius);
        self.for_each_map(|map, scratch| convolve_separable(map, dims, &kernel, scratch));
    }

    /// Gaussian-smooths every cost map in place.
    pub fn regularize_in_place(&mut self, smooth_sigma: f64) {
        assert!(smooth_sigma >= 0.0, "smoothing sigma must be non-negative");
        if smooth_sigma == 0.0 {
            return;
        }
        let dims = self.dims;
        let kernel = gaussian_kernel(smooth_sigma);
        self.for_each_map(|map, scratch| convolve_separable(map, dims, &kernel, scratch));
    }
}

/// Sum of absolute differences, accumulated in channel order.
#[inline]
pub(crate) fn sad_unchecked(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).fold(0.0f32, |acc, (x, y)| acc + (x - y).abs())
}

pub fn sad(a: &[f32], b: &[f32]) -> Result<f32> {
    if a.len() != b.len() {
        return Err(Error::ChannelMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(sad_unchecked(a, b))
}

pub(crate) fn check_pair(fixed: &FeatureVolume, moving: &FeatureVolume) -> Result<()> {
    ensure_same_dims(fixed.dims(), moving.dims())?;
    if fixed.channels() != moving.channels() {
        return Err(Error::ChannelMismatch {
            expected: fixed.channels(),
            actual: moving.channels(),
        });
    }
    Ok(())
}

/// `DSV(x, d) = SAD(F_fixed(x), F_moving(x + d))` for every label.
pub fn build_dsv(
    fixed: &FeatureVolume,
    moving: &FeatureVolume,
    disp: &DisplacementSet,
) -> Result<CostVolume> {
    build_dsv_labels(fixed, moving, disp, 0..disp.len())
}

/// Cost maps for a contiguous range of labels; map `i` holds label `labels.start + i`.
pub(crate) fn build_dsv_labels(
    fixed: &FeatureVolume,
    moving: &FeatureVolume,
    disp: &DisplacementSet,
    labels: Range<usize>,
) -> Result<CostVolume> {
    check_pair(fixed, moving)?;
    let dims = fixed.dims();
    let n = dims.len();
    let mut costs = vec![0.0f32; n * labels.len()];
    costs
        .par_chunks_mut(n)
        .zip(labels.clone())
        .for_each(|(map, label)| match disp.integer_vector(label) {
            Some(d) => fill_shifted(fixed, moving, d, map),
            None => fill_interpolated(fixed, moving, disp.vector(label), map),
        });
    Ok(CostVolume {
        dims,
        label_count: labels.len(),
        costs,
    })
}

fn fill_shifted(fixed: &FeatureVolume, moving: &FeatureVolume, d: [isize; 3], out: &mut [f32]) {
    let dims = fixed.dims();
    let c = fixed.channels();
    let (f, m) = (fixed.data(), moving.data());
    let nx = dims.x as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    // x range whose source stays inside the grid
    let lo = (-d[0]).clamp(0, nx) as usize;
    let hi = ((nx - d[0]).clamp(0, nx) as usize).max(lo);
    for z in 0..dims.z {
        let zz = clamp(z as isize + d[2], dims.z);
        for y in 0..dims.y {
            let yy = clamp(y as isize + d[1], dims.y);
            let row = dims.index(0, y, z);
            let frow = &f[row * c..(row + dims.x) * c];
            let mrow = &m[dims.index(0, yy, zz) * c..][..dims.x * c];
            let orow = &mut out[row..row + dims.x];
            let first = &mrow[..c];
            let last = &mrow[(dims.x - 1) * c..];
            for x in 0..lo {
                orow[x] = sad_unchecked(&frow[x * c..(x + 1) * c], first);
            }
            let shift = d[0];
            for x in lo..hi {
                let xx = (x as isize + shift) as usize;
                orow[x] = sad_unchecked(&frow[x * c..(x + 1) * c], &mrow[xx * c..(xx + 1) * c]);
            }
            for x in hi..dims.x {
                orow[x] = sad_unchecked(&frow[x * c..(x + 1) * c], last);
            }
        }
    }
}

fn fill_interpolated(fixed: &FeatureVolume, moving: &FeatureVolume, d: [f64; 3], out: &mut [f32]) {
    let dims = fixed.dims();
    let c = fixed.channels();
    let m = moving.data();
    let mut sample = vec![0.0f32; c];
    for (i, o) in out.iter_mut().enumerate() {
        let [x, y, z] = dims.coords(i);
        let p = [x as f64 + d[0], y as f64 + d[1], z as f64 + d[2]];
        for (ch, s) in sample.iter_mut().enumerate() {
            *s = trilinear(dims, p, |j| m[j * c + ch]);
        }
        *o = sad_unchecked(fixed.voxel(i), &sample);
    }
}

/// Sums every cost map over the `(2r+1)³` window around each voxel, edges clamped.
pub fn aggregate_costs(dsv: &CostVolume, patch_radius: usize) -> CostVolume {
    let mut out = dsv.clone();
    out.aggregate_in_place(patch_radius);
    out
}

/// Spatial Gaussian smoothing of every cost map; sigma 0 is the identity.
pub fn regularize_dsv(dsv: &CostVolume, smooth_sigma: f64) -> CostVolume {
    let mut out = dsv.clone();
    out.regularize_in_place(smooth_sigma);
    out
}
