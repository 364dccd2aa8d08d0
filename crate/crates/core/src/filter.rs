//! Separable 3-D filtering with clamp-to-edge borders.

use crate::volume::Dims;

/// Normalized Gaussian taps with radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f32> {
    assert!(sigma > 0.0, "gaussian sigma must be positive");
    let radius = (3.0 * sigma).ceil().max(1.0) as i64;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| (w / total) as f32).collect()
}

/// Unit taps: convolution becomes a box sum over `2r+1` samples.
pub fn box_kernel(radius: usize) -> Vec<f32> {
    vec![1.0; 2 * radius + 1]
}

/// Convolves `data` in place along x, then y, then z.
///
/// Out-of-range taps read the nearest edge sample. Taps are accumulated in
/// kernel order, so results depend only on the input.
pub fn convolve_separable(data: &mut [f32], dims: Dims, kernel: &[f32], scratch: &mut Vec<f32>) {
    debug_assert_eq!(data.len(), dims.len());
    debug_assert!(kernel.len() % 2 == 1);
    scratch.resize(data.len(), 0.0);
    pass_x(data, scratch, dims, kernel);
    pass_blocks(scratch, data, dims.x, dims.y, dims.z, kernel);
    pass_blocks(data, scratch, dims.x * dims.y, dims.z, 1, kernel);
    data.copy_from_slice(scratch);
}

fn pass_x(src: &[f32], dst: &mut [f32], dims: Dims, w: &[f32]) {
    let n = dims.x;
    let r = w.len() / 2;
    for (row_in, row_out) in src.chunks_exact(n).zip(dst.chunks_exact_mut(n)) {
        for (x, out) in row_out.iter_mut().enumerate() {
            let mut acc = 0.0f32;
            if x >= r && x + r < n {
                for (wk, v) in w.iter().zip(&row_in[x - r..=x + r]) {
                    acc += wk * v;
                }
            } else {
                for (k, wk) in w.iter().enumerate() {
                    let j = (x + k).saturating_sub(r).min(n - 1);
                    acc += wk * row_in[j];
                }
            }
            *out = acc;
        }
    }
}

/// Filters along an axis whose samples are `inner`-element contiguous blocks.
fn pass_blocks(src: &[f32], dst: &mut [f32], inner: usize, n: usize, outer: usize, w: &[f32]) {
    let r = w.len() / 2;
    for o in 0..outer {
        for i in 0..n {
            let out = &mut dst[(o * n + i) * inner..][..inner];
            out.fill(0.0);
            for (k, &wk) in w.iter().enumerate() {
                let j = (i + k).saturating_sub(r).min(n - 1);
                let inp = &src[(o * n + j) * inner..][..inner];
                for (a, b) in out.iter_mut().zip(inp) {
                    *a += wk * b;
                }
            }
        }
    }
}
