use crate::error::{Error, Result};

/// Quantized candidate displacements `{0, ±q, ±2q, ..., ±l_max}³`.
///
/// Labels are ordered lexicographically by `(dz, dy, dx)`, with dx varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementSet {
    q: f64,
    steps: usize,
    offsets: Vec<[i32; 3]>,
    l1: Vec<u32>,
}

pub fn build_displacement_set(q: f64, l_max: f64) -> Result<DisplacementSet> {
    DisplacementSet::new(q, l_max)
}

impl DisplacementSet {
    pub fn new(q: f64, l_max: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quantization step must be positive, got {q}"
            )));
        }
        if !(l_max.is_finite() && l_max >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "maximum displacement must be non-negative, got {l_max}"
            )));
        }
        let ratio = l_max / q;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "maximum displacement {l_max} is not a multiple of step {q}"
            )));
        }
        if steps > 64.0 {
            return Err(Error::InvalidParameter(format!(
                "{steps} steps per axis is beyond the supported search range"
            )));
        }
        let k = steps as i32;
        let mut offsets = Vec::with_capacity((2 * k as usize + 1).pow(3));
        for dz in -k..=k {
            for dy in -k..=k {
                for dx in -k..=k {
                    offsets.push([dx, dy, dz]);
                }
            }
        }
        let l1 = offsets
            .iter()
            .map(|o| o.iter().map(|c| c.unsigned_abs()).sum())
            .collect();
        Ok(Self {
            q,
            steps: k as usize,
            offsets,
            l1,
        })
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Steps per axis on each side of zero.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn l_max(&self) -> f64 {
        self.steps as f64 * self.q
    }

    /// Displacement of `label` in multiples of `q`, as (dx, dy, dz).
    pub fn step_offset(&self, label: usize) -> [i32; 3] {
        self.offsets[label]
    }

    /// Displacement of `label` in voxels, as (dx, dy, dz).
    pub fn vector(&self, label: usize) -> [f64; 3] {
        let o = self.offsets[label];
        [o[0] as f64 * self.q, o[1] as f64 * self.q, o[2] as f64 * self.q]
    }

    /// Integer voxel displacement when every component of `label` is whole.
    pub fn integer_vector(&self, label: usize) -> Option<[isize; 3]> {
        let v = self.vector(label);
        v.iter()
            .all(|c| c.fract() == 0.0)
            .then(|| [v[0] as isize, v[1] as isize, v[2] as isize])
    }

    pub fn zero_label(&self) -> usize {
        self.len() / 2
    }

    /// Tie-break rank: smaller L1 norm first, then canonical order.
    #[inline]
    pub fn tie_key(&self, label: usize) -> (u32, usize) {
        (self.l1[label], label)
    }

    pub fn iter(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.len()).map(|l| self.vector(l))
    }
}
