#![allow(dead_code)]

use discreg::volume::{Dims, DisplacementField, FeatureVolume, LabelVolume, ScalarVolume, UNIT_SPACING};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_scalar(d: Dims, seed: u64) -> ScalarVolume {
    let mut r = rng(seed);
    ScalarVolume::from_fn(d, |_, _, _| r.gen_range(0.0..1.0)).unwrap()
}

pub fn random_features(d: Dims, channels: usize, seed: u64) -> FeatureVolume {
    let mut r = rng(seed);
    let data = (0..d.len() * channels).map(|_| r.gen_range(0.0..1.0)).collect();
    FeatureVolume::new(d, UNIT_SPACING, channels, data).unwrap()
}

pub fn random_labels(d: Dims, max_label: u32, seed: u64) -> LabelVolume {
    let mut r = rng(seed);
    LabelVolume::from_fn(d, |_, _, _| r.gen_range(0..=max_label)).unwrap()
}

pub fn random_field(d: Dims, amplitude: f32, seed: u64) -> DisplacementField {
    let mut r = rng(seed);
    DisplacementField::from_fn(d, |_, _, _| {
        [
            r.gen_range(-amplitude..amplitude),
            r.gen_range(-amplitude..amplitude),
            r.gen_range(-amplitude..amplitude),
        ]
    })
    .unwrap()
}

pub fn clampi(v: isize, n: usize) -> usize {
    v.clamp(0, n as isize - 1) as usize
}

/// Trilinear sample written out with all eight corner weights.
pub fn naive_trilinear(get: impl Fn(usize, usize, usize) -> f64, d: Dims, p: [f64; 3]) -> f64 {
    let ext = [d.x, d.y, d.z];
    let mut lo = [0usize; 3];
    let mut t = [0f64; 3];
    for a in 0..3 {
        let c = p[a].clamp(0.0, (ext[a] - 1) as f64);
        lo[a] = c.floor() as usize;
        t[a] = c - lo[a] as f64;
    }
    let mut acc = 0.0;
    for dz in 0..2 {
        for dy in 0..2 {
            for dx in 0..2 {
                let w = (if dx == 1 { t[0] } else { 1.0 - t[0] })
                    * (if dy == 1 { t[1] } else { 1.0 - t[1] })
                    * (if dz == 1 { t[2] } else { 1.0 - t[2] });
                if w == 0.0 {
                    continue;
                }
                let x = (lo[0] + dx).min(ext[0] - 1);
                let y = (lo[1] + dy).min(ext[1] - 1);
                let z = (lo[2] + dz).min(ext[2] - 1);
                acc += w * get(x, y, z);
            }
        }
    }
    acc
}
