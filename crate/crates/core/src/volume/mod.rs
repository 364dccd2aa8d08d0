//! Volumetric containers, raw+JSON file I/O, interpolation and warping.
//!
//! All containers store voxels with x varying fastest, then y, then z.
//! Multi-channel data keeps the channels of one voxel contiguous.

mod io;
pub(crate) mod resample;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{
    load_features, load_field, load_labels, load_scalar, load_volume, read_header, save_volume,
    sidecar_paths, AnyVolume, RawVolume,
};
pub use resample::{
    downsample, downsample_features, sample_trilinear, sample_trilinear_channel, upsample_field,
    warp_features, warp_labels, warp_scalar,
};

/// Voxel counts along x, y and z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct Dims {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Dims {
    pub const fn new(x: usize, y: usize, z: usize) -> Self {
        Self { x, y, z }
    }

    pub const fn cube(n: usize) -> Self {
        Self::new(n, n, n)
    }

    pub const fn len(&self) -> usize {
        self.x * self.y * self.z
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub const fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.x * (y + self.y * z)
    }

    /// Inverse of [`Dims::index`].
    #[inline]
    pub const fn coords(&self, i: usize) -> [usize; 3] {
        let x = i % self.x;
        let r = i / self.x;
        [x, r % self.y, r / self.y]
    }

    pub const fn as_array(&self) -> [usize; 3] {
        [self.x, self.y, self.z]
    }

    pub fn min_axis(&self) -> usize {
        self.x.min(self.y).min(self.z)
    }

    /// Output grid of a factor-`f` subsampling: `ceil(n / f)` per axis.
    pub fn subsampled(&self, factor: usize) -> Dims {
        Dims::new(
            self.x.div_ceil(factor),
            self.y.div_ceil(factor),
            self.z.div_ceil(factor),
        )
    }

    /// Voxel coordinates in canonical storage order.
    pub fn iter(self) -> impl Iterator<Item = [usize; 3]> {
        let d = self;
        (0..d.z).flat_map(move |z| (0..d.y).flat_map(move |y| (0..d.x).map(move |x| [x, y, z])))
    }
}

impl From<[usize; 3]> for Dims {
    fn from(a: [usize; 3]) -> Self {
        Dims::new(a[0], a[1], a[2])
    }
}

impl From<Dims> for [usize; 3] {
    fn from(d: Dims) -> Self {
        d.as_array()
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.x, self.y, self.z)
    }
}

/// On-disk element type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DType {
    Float32,
    Uint8,
    Uint16,
    Int32,
}

impl DType {
    pub const fn size(self) -> usize {
        match self {
            DType::Float32 | DType::Int32 => 4,
            DType::Uint8 => 1,
            DType::Uint16 => 2,
        }
    }

    pub const fn is_integer(self) -> bool {
        !matches!(self, DType::Float32)
    }

    pub const fn name(self) -> &'static str {
        match self {
            DType::Float32 => "float32",
            DType::Uint8 => "uint8",
            DType::Uint16 => "uint16",
            DType::Int32 => "int32",
        }
    }
}

/// The JSON sidecar contents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeHeader {
    pub dims: Dims,
    pub spacing: [f64; 3],
    pub channels: usize,
    pub dtype: DType,
}

impl VolumeHeader {
    pub fn new(dims: Dims, spacing: [f64; 3], channels: usize, dtype: DType) -> Result<Self> {
        let h = Self {
            dims,
            spacing,
            channels,
            dtype,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.x == 0 || self.dims.y == 0 || self.dims.z == 0 {
            return Err(Error::InvalidHeader(format!(
                "dims must be positive, got {}",
                self.dims
            )));
        }
        if !self.spacing.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(Error::InvalidHeader(format!(
                "spacing must be positive, got {:?}",
                self.spacing
            )));
        }
        if self.channels == 0 {
            return Err(Error::InvalidHeader("channels must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of scalar elements in the payload.
    pub fn element_count(&self) -> usize {
        self.dims.len() * self.channels
    }
}

pub const UNIT_SPACING: [f64; 3] = [1.0, 1.0, 1.0];

fn check_finite(data: &[f32]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Single-channel real-valued volume.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarVolume {
    header: VolumeHeader,
    data: Vec<f32>,
}

impl ScalarVolume {
    pub fn new(dims: Dims, spacing: [f64; 3], data: Vec<f32>) -> Result<Self> {
        let header = VolumeHeader::new(dims, spacing, 1, DType::Float32)?;
        check_len(dims.len(), data.len())?;
        check_finite(&data)?;
        Ok(Self { header, data })
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> f32) -> Result<Self> {
        let data = dims.iter().map(|[x, y, z]| f(x, y, z)).collect();
        Self::new(dims, UNIT_SPACING, data)
    }

    pub fn filled(dims: Dims, value: f32) -> Result<Self> {
        Self::new(dims, UNIT_SPACING, vec![value; dims.len()])
    }

    /// A new volume on the same grid with different voxel values.
    pub fn with_data(&self, data: Vec<f32>) -> Result<Self> {
        Self::new(self.dims(), self.spacing(), data)
    }

    pub fn header(&self) -> &VolumeHeader {
        &self.header
    }

    pub fn dims(&self) -> Dims {
        self.header.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.header.spacing
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f32 {
        self.data[self.header.dims.index(x, y, z)]
    }

    pub fn min_max(&self) -> (f32, f32) {
        self.data
            .iter()
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// View as a one-channel feature volume.
    pub fn to_features(&self) -> FeatureVolume {
        FeatureVolume {
            header: VolumeHeader {
                channels: 1,
                ..self.header
            },
            data: self.data.clone(),
        }
    }
}

/// Per-voxel feature vectors, channels contiguous per voxel.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVolume {
    header: VolumeHeader,
    data: Vec<f32>,
}

impl FeatureVolume {
    pub fn new(dims: Dims, spacing: [f64; 3], channels: usize, data: Vec<f32>) -> Result<Self> {
        let header = VolumeHeader::new(dims, spacing, channels, DType::Float32)?;
        check_len(header.element_count(), data.len())?;
        check_finite(&data)?;
        Ok(Self { header, data })
    }

    pub fn header(&self) -> &VolumeHeader {
        &self.header
    }

    pub fn dims(&self) -> Dims {
        self.header.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.header.spacing
    }

    pub fn channels(&self) -> usize {
        self.header.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn voxel(&self, i: usize) -> &[f32] {
        let c = self.header.channels;
        &self.data[i * c..(i + 1) * c]
    }

    /// Copies one channel out as a scalar volume.
    pub fn channel(&self, c: usize) -> ScalarVolume {
        let n = self.header.channels;
        ScalarVolume {
            header: VolumeHeader {
                channels: 1,
                ..self.header
            },
            data: self.data.iter().skip(c).step_by(n).copied().collect(),
        }
    }

    /// Interleaves equally sized scalar volumes into one feature volume.
    pub fn from_channels(channels: &[ScalarVolume]) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| Error::InvalidParameter("at least one channel required".into()))?;
        let dims = first.dims();
        for ch in channels {
            if ch.dims() != dims {
                return Err(Error::DimMismatch {
                    expected: dims,
                    actual: ch.dims(),
                });
            }
        }
        let n = channels.len();
        let mut data = vec![0.0f32; dims.len() * n];
        for (c, ch) in channels.iter().enumerate() {
            for (i, &v) in ch.data().iter().enumerate() {
                data[i * n + c] = v;
            }
        }
        Self::new(dims, first.spacing(), n, data)
    }

    /// Rescales every channel to zero mean and unit variance.
    ///
    /// Channels with zero variance are only centred.
    pub fn zscore_channels(&self) -> FeatureVolume {
        let c = self.channels();
        let n = self.dims().len() as f64;
        let mut mean = vec![0.0f64; c];
        for v in self.data.chunks_exact(c) {
            for (m, &x) in mean.iter_mut().zip(v) {
                *m += x as f64;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0f64; c];
        for v in self.data.chunks_exact(c) {
            for ((s, &x), m) in var.iter_mut().zip(v).zip(&mean) {
                *s += (x as f64 - m).powi(2);
            }
        }
        let inv_std: Vec<f64> = var
            .iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 {
                    1.0 / sd
                } else {
                    1.0
                }
            })
            .collect();
        let data = self
            .data
            .chunks_exact(c)
            .flat_map(|v| {
                v.iter()
                    .zip(&mean)
                    .zip(&inv_std)
                    .map(|((&x, m), s)| ((x as f64 - m) * s) as f32)
                    .collect::<Vec<_>>()
            })
            .collect();
        FeatureVolume {
            header: self.header,
            data,
        }
    }
}

/// Integer segmentation; label 0 is background.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVolume {
    header: VolumeHeader,
    data: Vec<u32>,
}

impl LabelVolume {
    /// Builds a label volume, picking the narrowest on-disk integer type that fits.
    pub fn new(dims: Dims, spacing: [f64; 3], data: Vec<u32>) -> Result<Self> {
        let max = data.iter().copied().max().unwrap_or(0);
        let dtype = if max <= u8::MAX as u32 {
            DType::Uint8
        } else if max <= u16::MAX as u32 {
            DType::Uint16
        } else {
            DType::Int32
        };
        Self::with_dtype(dims, spacing, dtype, data)
    }

    pub fn with_dtype(dims: Dims, spacing: [f64; 3], dtype: DType, data: Vec<u32>) -> Result<Self> {
        if !dtype.is_integer() {
            return Err(Error::WrongKind {
                expected: "integer label dtype",
                found: dtype.name().into(),
            });
        }
        let header = VolumeHeader::new(dims, spacing, 1, dtype)?;
        check_len(dims.len(), data.len())?;
        let limit = match dtype {
            DType::Uint8 => u8::MAX as u32,
            DType::Uint16 => u16::MAX as u32,
            _ => i32::MAX as u32,
        };
        if let Some(&bad) = data.iter().find(|&&l| l > limit) {
            return Err(Error::InvalidParameter(format!(
                "label {bad} does not fit dtype {}",
                dtype.name()
            )));
        }
        Ok(Self { header, data })
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> u32) -> Result<Self> {
        let data = dims.iter().map(|[x, y, z]| f(x, y, z)).collect();
        Self::new(dims, UNIT_SPACING, data)
    }

    pub fn header(&self) -> &VolumeHeader {
        &self.header
    }

    pub fn dims(&self) -> Dims {
        self.header.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.header.spacing
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> u32 {
        self.data[self.header.dims.index(x, y, z)]
    }

    pub fn label_set(&self) -> BTreeSet<u32> {
        self.data.iter().copied().collect()
    }
}

/// Per-voxel displacement in voxel units of the fixed grid, stored as (dx, dy, dz).
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    dims: Dims,
    spacing: [f64; 3],
    data: Vec<[f32; 3]>,
}

impl DisplacementField {
    pub fn new(dims: Dims, spacing: [f64; 3], data: Vec<[f32; 3]>) -> Result<Self> {
        VolumeHeader::new(dims, spacing, 3, DType::Float32)?;
        check_len(dims.len(), data.len())?;
        if let Some(i) = data.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite { index: i * 3 });
        }
        Ok(Self {
            dims,
            spacing,
            data,
        })
    }

    pub fn zeros(dims: Dims) -> Self {
        Self::constant(dims, [0.0; 3])
    }

    pub fn constant(dims: Dims, v: [f32; 3]) -> Self {
        Self {
            dims,
            spacing: UNIT_SPACING,
            data: vec![v; dims.len()],
        }
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> [f32; 3]) -> Result<Self> {
        let data = dims.iter().map(|[x, y, z]| f(x, y, z)).collect();
        Self::new(dims, UNIT_SPACING, data)
    }

    pub fn with_spacing(mut self, spacing: [f64; 3]) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn header(&self) -> VolumeHeader {
        VolumeHeader {
            dims: self.dims,
            spacing: self.spacing,
            channels: 3,
            dtype: DType::Float32,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn data(&self) -> &[[f32; 3]] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> [f32; 3] {
        self.data[self.dims.index(x, y, z)]
    }

    /// One component (0 = x, 1 = y, 2 = z) as a scalar volume.
    pub fn component(&self, c: usize) -> ScalarVolume {
        ScalarVolume {
            header: VolumeHeader {
                dims: self.dims,
                spacing: self.spacing,
                channels: 1,
                dtype: DType::Float32,
            },
            data: self.data.iter().map(|v| v[c]).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.iter().all(|&c| c == 0.0))
    }
}

pub(crate) fn ensure_same_dims(expected: Dims, actual: Dims) -> Result<()> {
    if expected != actual {
        return Err(Error::DimMismatch { expected, actual });
    }
    Ok(())
}
