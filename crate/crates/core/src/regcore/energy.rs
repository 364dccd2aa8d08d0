use super::cost::{check_pair, sad_unchecked};
use crate::error::Result;
use crate::volume::resample::trilinear;
use crate::volume::{ensure_same_dims, DisplacementField, FeatureVolume};

/// `Σ_x SAD(F_fixed(x), F_moving(x + u(x)))` with trilinear, edge-clamped sampling.
pub fn data_term(
    fixed: &FeatureVolume,
    moving: &FeatureVolume,
    field: &DisplacementField,
) -> Result<f64> {
    check_pair(fixed, moving)?;
    ensure_same_dims(fixed.dims(), field.dims())?;
    let dims = fixed.dims();
    let c = fixed.channels();
    let m = moving.data();
    let mut sample = vec![0.0f32; c];
    let mut total = 0.0f64;
    for (i, u) in field.data().iter().enumerate() {
        let [x, y, z] = dims.coords(i);
        let p = [
            x as f64 + u[0] as f64,
            y as f64 + u[1] as f64,
            z as f64 + u[2] as f64,
        ];
        for (ch, s) in sample.iter_mut().enumerate() {
            *s = trilinear(dims, p, |j| m[j * c + ch]);
        }
        total += sad_unchecked(fixed.voxel(i), &sample) as f64;
    }
    Ok(total)
}

/// `Σ_x |∇u(x)|²` with forward differences; the last sample on each axis contributes nothing.
pub fn smoothness_term(field: &DisplacementField) -> f64 {
    let dims = field.dims();
    let u = field.data();
    let strides = [1, dims.x, dims.x * dims.y];
    let extents = dims.as_array();
    let mut total = 0.0f64;
    for (i, p) in dims.iter().enumerate() {
        for axis in 0..3 {
            if p[axis] + 1 < extents[axis] {
                let next = u[i + strides[axis]];
                for c in 0..3 {
                    let g = next[c] as f64 - u[i][c] as f64;
                    total += g * g;
                }
            }
        }
    }
    total
}

/// Registration energy: data term plus `alpha` times the squared field gradient.
pub fn energy(
    fixed: &FeatureVolume,
    moving: &FeatureVolume,
    field: &DisplacementField,
    alpha: f64,
) -> Result<f64> {
    let data = data_term(fixed, moving, field)?;
    Ok(if alpha == 0.0 {
        data
    } else {
        data + alpha * smoothness_term(field)
    })
}
