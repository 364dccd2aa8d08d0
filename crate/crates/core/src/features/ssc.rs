//! Self-Similarity Context descriptor.
//!
//! For every voxel the six face neighbours are paired whenever they sit on a
//! common edge of the unit cube (12 pairs, opposite neighbours excluded). Each
//! pair contributes the sum of squared differences between the two patches
//! centred on the pair members. The 12 distances are divided by their mean,
//! floored at `noise_floor`, and mapped through `exp(-d)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{Dims, FeatureVolume, ScalarVolume};

pub const SSC_CHANNELS: usize = 12;

/// Face-neighbour offsets in channel-pair order.
pub const NEIGHBOURS: [[isize; 3]; 6] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
];

/// Index pairs into [`NEIGHBOURS`]; channel `k` compares `PAIRS[k]`.
pub const PAIRS: [(usize, usize); SSC_CHANNELS] = [
    (0, 2),
    (0, 3),
    (0, 4),
    (0, 5),
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 4),
    (2, 5),
    (3, 4),
    (3, 5),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SscParams {
    pub patch_radius: usize,
    pub noise_floor: f64,
}

impl Default for SscParams {
    fn default() -> Self {
        Self {
            patch_radius: 1,
            noise_floor: 1e-6,
        }
    }
}

impl SscParams {
    pub fn validate(&self) -> Result<()> {
        if !self.noise_floor.is_finite() || self.noise_floor <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ssc noise floor must be positive, got {}",
                self.noise_floor
            )));
        }
        Ok(())
    }

    /// Smallest extent per axis the descriptor accepts.
    pub fn min_extent(&self) -> usize {
        2 * (self.patch_radius + 1) + 1
    }
}

/// Sum of `data[i .. i + 2r + 1]` along one axis, shrinking that axis by `2r`.
fn window_sum(data: &[f64], dims: Dims, axis: usize, r: usize) -> (Vec<f64>, Dims) {
    let w = 2 * r + 1;
    let mut ext = dims.as_array();
    ext[axis] -= 2 * r;
    let out_dims = Dims::from(ext);
    let stride = [1, dims.x, dims.x * dims.y][axis];
    let out = out_dims
        .iter()
        .map(|[x, y, z]| {
            let base = dims.index(x, y, z);
            (0..w).map(|k| data[base + k * stride]).sum()
        })
        .collect();
    (out, out_dims)
}

/// Patch distances for one neighbour pair, over the unpadded grid.
fn pair_distance(vol: &ScalarVolume, a: [isize; 3], b: [isize; 3], r: usize) -> Vec<f64> {
    let dims = vol.dims();
    let padded = Dims::new(dims.x + 2 * r, dims.y + 2 * r, dims.z + 2 * r);
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let at = |p: [isize; 3], o: [isize; 3]| {
        vol.get(
            clamp(p[0] + o[0], dims.x),
            clamp(p[1] + o[1], dims.y),
            clamp(p[2] + o[2], dims.z),
        ) as f64
    };
    let ri = r as isize;
    let sq: Vec<f64> = padded
        .iter()
        .map(|[x, y, z]| {
            let p = [x as isize - ri, y as isize - ri, z as isize - ri];
            let d = at(p, a) - at(p, b);
            d * d
        })
        .collect();
    let (s, d) = window_sum(&sq, padded, 0, r);
    let (s, d) = window_sum(&s, d, 1, r);
    window_sum(&s, d, 2, r).0
}

/// 12-channel SSC descriptor, every value in `(0, 1]`.
pub fn ssc_features(vol: &ScalarVolume, params: &SscParams) -> Result<FeatureVolume> {
    params.validate()?;
    let dims = vol.dims();
    let min = params.min_extent();
    if dims.min_axis() < min {
        return Err(Error::VolumeTooSmall { dims, min });
    }
    let r = params.patch_radius;
    let distances: Vec<Vec<f64>> = PAIRS
        .par_iter()
        .map(|&(a, b)| pair_distance(vol, NEIGHBOURS[a], NEIGHBOURS[b], r))
        .collect();
    let mut out = vec![0.0f32; dims.len() * SSC_CHANNELS];
    for (i, desc) in out.chunks_exact_mut(SSC_CHANNELS).enumerate() {
        let mean = distances.iter().map(|d| d[i]).sum::<f64>() / SSC_CHANNELS as f64;
        let mean = mean.max(params.noise_floor);
        for (o, d) in desc.iter_mut().zip(&distances) {
            *o = (-d[i] / mean).exp() as f32;
        }
    }
    FeatureVolume::new(dims, vol.spacing(), SSC_CHANNELS, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_the_twelve_cube_edges() {
        for &(a, b) in &PAIRS {
            let (na, nb) = (NEIGHBOURS[a], NEIGHBOURS[b]);
            let dot: isize = na.iter().zip(&nb).map(|(x, y)| x * y).sum();
            assert_eq!(dot, 0, "pair {a},{b} is not orthogonal");
        }
        let mut seen = PAIRS.to_vec();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn constant_volume_gives_ones() {
        let v = ScalarVolume::filled(Dims::cube(5), 4.0).unwrap();
        let f = ssc_features(&v, &SscParams::default()).unwrap();
        assert_eq!(f.channels(), 12);
        assert!(f.data().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn too_small_rejected() {
        let v = ScalarVolume::filled(Dims::new(4, 5, 5), 1.0).unwrap();
        assert!(matches!(
            ssc_features(&v, &SscParams::default()),
            Err(Error::VolumeTooSmall { min: 5, .. })
        ));
        let bad = SscParams {
            noise_floor: 0.0,
            ..SscParams::default()
        };
        assert!(ssc_features(&ScalarVolume::filled(Dims::cube(5), 1.0).unwrap(), &bad).is_err());
    }
}
