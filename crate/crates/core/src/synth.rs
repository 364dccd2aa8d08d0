//! Seeded synthetic registration cases with known ground truth.
//!
//! Every case is a moving image, a fixed image, blob labelings for both and
//! the field `u` with `fixed(x) = moving(x + u(x))`, so warping the moving
//! image or labels by `u` reproduces the fixed ones.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{warp_labels, warp_scalar, Dims, DisplacementField, LabelVolume, ScalarVolume};

const MODES: usize = 12;
const MIN_WAVELENGTH: f64 = 8.0;
const MAX_WAVELENGTH: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SynthKind {
    /// Constant shift in voxels.
    Translation { shift: [f64; 3] },
    /// Band-limited sinusoidal warp, one plane wave per component.
    Sinusoid { amplitude: f64, period: f64 },
    /// Identical images, zero field.
    Blobs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    #[serde(flatten)]
    pub kind: SynthKind,
    pub dims: Dims,
    pub seed: u64,
    pub structures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCase {
    pub fixed: ScalarVolume,
    pub moving: ScalarVolume,
    pub fixed_labels: LabelVolume,
    pub moving_labels: LabelVolume,
    pub field: DisplacementField,
}

/// A sum of random plane waves with values in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct SmoothPattern {
    modes: Vec<([f64; 3], f64, f64)>,
    norm: f64,
}

fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

impl SmoothPattern {
    pub fn new(rng: &mut ChaCha8Rng) -> Self {
        let modes: Vec<_> = (0..MODES)
            .map(|_| {
                let dir = unit_vector(rng);
                let k = TAU / rng.gen_range(MIN_WAVELENGTH..MAX_WAVELENGTH);
                let amp = rng.gen_range(0.5..1.0);
                let phase = rng.gen_range(0.0..TAU);
                ([dir[0] * k, dir[1] * k, dir[2] * k], amp, phase)
            })
            .collect();
        let norm = modes.iter().map(|m| m.1).sum();
        Self { modes, norm }
    }

    pub fn eval(&self, p: [f64; 3]) -> f64 {
        let s: f64 = self
            .modes
            .iter()
            .map(|(k, a, ph)| a * (k[0] * p[0] + k[1] * p[1] + k[2] * p[2] + ph).cos())
            .sum();
        0.5 + 0.5 * s / self.norm
    }

    pub fn sample(&self, dims: Dims, offset: [f64; 3]) -> Result<ScalarVolume> {
        ScalarVolume::from_fn(dims, |x, y, z| {
            self.eval([x as f64 + offset[0], y as f64 + offset[1], z as f64 + offset[2]]) as f32
        })
    }
}

/// Random spheres; a voxel takes the label of the sphere it lies deepest in.
#[derive(Debug, Clone)]
pub struct BlobSet {
    blobs: Vec<([f64; 3], f64)>,
}

impl BlobSet {
    pub fn new(rng: &mut ChaCha8Rng, dims: Dims, count: usize) -> Self {
        let typical = 0.5 * (dims.len() as f64 / count.max(1) as f64).cbrt();
        let blobs = (0..count)
            .map(|_| {
                let c = [
                    rng.gen_range(0.0..dims.x as f64),
                    rng.gen_range(0.0..dims.y as f64),
                    rng.gen_range(0.0..dims.z as f64),
                ];
                (c, rng.gen_range(0.8 * typical..1.6 * typical).max(1.0))
            })
            .collect();
        Self { blobs }
    }

    pub fn label_at(&self, p: [f64; 3]) -> u32 {
        let mut best = (1.0, 0u32);
        for (i, (c, r)) in self.blobs.iter().enumerate() {
            let d2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2);
            let rel = d2.sqrt() / r;
            if rel < best.0 {
                best = (rel, i as u32 + 1);
            }
        }
        best.1
    }

    pub fn sample(&self, dims: Dims, offset: [f64; 3]) -> Result<LabelVolume> {
        LabelVolume::from_fn(dims, |x, y, z| {
            self.label_at([x as f64 + offset[0], y as f64 + offset[1], z as f64 + offset[2]])
        })
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Smooth random volume for a seed, values in `[0, 1]`.
pub fn smooth_random_volume(dims: Dims, seed: u64) -> Result<ScalarVolume> {
    SmoothPattern::new(&mut rng_for(seed, 0)).sample(dims, [0.0; 3])
}

/// Blob labeling with `count` structures for a seed.
pub fn blob_labels(dims: Dims, count: usize, seed: u64) -> Result<LabelVolume> {
    BlobSet::new(&mut rng_for(seed, 1), dims, count).sample(dims, [0.0; 3])
}

/// `h_c(p) = A sin(2π w_c·p / P + φ_c)` with a random unit direction `w_c` per component.
pub fn sinusoid_field(dims: Dims, amplitude: f64, period: f64, seed: u64) -> Result<DisplacementField> {
    let mut rng = rng_for(seed, 2);
    let waves: Vec<([f64; 3], f64)> = (0..3)
        .map(|_| (unit_vector(&mut rng), rng.gen_range(0.0..TAU)))
        .collect();
    DisplacementField::from_fn(dims, |x, y, z| {
        let p = [x as f64, y as f64, z as f64];
        let mut v = [0.0f32; 3];
        for (c, (w, ph)) in waves.iter().enumerate() {
            let t = (w[0] * p[0] + w[1] * p[1] + w[2] * p[2]) / period;
            v[c] = (amplitude * (TAU * t + ph).sin()) as f32;
        }
        v
    })
}

fn check(params: &SynthParams) -> Result<()> {
    let invalid = |m: String| Err(Error::InvalidParameter(m));
    if params.dims.is_empty() {
        return invalid(format!("empty grid {}", params.dims));
    }
    match params.kind {
        SynthKind::Translation { shift } if shift.iter().any(|s| !s.is_finite()) => {
            invalid("translation must be finite".into())
        }
        SynthKind::Sinusoid { amplitude, period }
            if !(amplitude.is_finite() && amplitude >= 0.0 && period.is_finite() && period > 0.0) =>
        {
            invalid(format!("invalid sinusoid amplitude {amplitude} / period {period}"))
        }
        _ => Ok(()),
    }
}

pub fn generate(params: &SynthParams) -> Result<SynthCase> {
    check(params)?;
    let dims = params.dims;
    let pattern = SmoothPattern::new(&mut rng_for(params.seed, 0));
    let blobs = BlobSet::new(&mut rng_for(params.seed, 1), dims, params.structures);
    let moving = pattern.sample(dims, [0.0; 3])?;
    let moving_labels = blobs.sample(dims, [0.0; 3])?;
    let (fixed, fixed_labels, field) = match params.kind {
        SynthKind::Translation { shift } => (
            pattern.sample(dims, shift)?,
            blobs.sample(dims, shift)?,
            DisplacementField::constant(dims, shift.map(|s| s as f32)),
        ),
        SynthKind::Sinusoid { amplitude, period } => {
            let field = sinusoid_field(dims, amplitude, period, params.seed)?;
            (
                warp_scalar(&moving, &field)?,
                warp_labels(&moving_labels, &field)?,
                field,
            )
        }
        SynthKind::Blobs => (moving.clone(), moving_labels.clone(), DisplacementField::zeros(dims)),
    };
    Ok(SynthCase {
        fixed,
        moving,
        fixed_labels,
        moving_labels,
        field,
    })
}
