use log::warn;

use crate::error::{Error, Result};
use crate::volume::{FeatureVolume, ScalarVolume};

/// Percentile of an ascending slice, interpolating linearly between order statistics.
pub fn percentile_sorted(sorted: &[f32], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty sample");
    let pos = (p / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let t = pos - lo as f64;
    sorted[lo] as f64 * (1.0 - t) + sorted[hi] as f64 * t
}

pub(crate) fn sorted_values(data: &[f32]) -> Vec<f32> {
    let mut v = data.to_vec();
    v.sort_unstable_by(f32::total_cmp);
    v
}

/// A linear intensity window mapped onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityRange {
    pub low: f64,
    pub high: f64,
}

impl IntensityRange {
    /// Window between the `p_low` and `p_high` percentiles of `vol`.
    pub fn from_percentiles(vol: &ScalarVolume, p_low: f64, p_high: f64) -> Result<Self> {
        if !(0.0..100.0).contains(&p_low) || !(p_low < p_high && p_high <= 100.0) {
            return Err(Error::InvalidParameter(format!(
                "percentiles must satisfy 0 <= low < high <= 100, got {p_low} and {p_high}"
            )));
        }
        let sorted = sorted_values(vol.data());
        Ok(Self {
            low: percentile_sorted(&sorted, p_low),
            high: percentile_sorted(&sorted, p_high),
        })
    }

    pub fn from_min_max(vol: &ScalarVolume) -> Self {
        let (lo, hi) = vol.min_max();
        Self {
            low: lo as f64,
            high: hi as f64,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.high <= self.low
    }

    /// Rescales into the window and clips to `[0, 1]`; a degenerate window yields 0.5.
    pub fn apply(&self, vol: &ScalarVolume) -> FeatureVolume {
        let data = if self.is_degenerate() {
            vec![0.5; vol.data().len()]
        } else {
            let span = self.high - self.low;
            vol.data()
                .iter()
                .map(|&v| ((v as f64 - self.low) / span).clamp(0.0, 1.0) as f32)
                .collect()
        };
        FeatureVolume::new(vol.dims(), vol.spacing(), 1, data).expect("values are finite")
    }
}

#[derive(Debug, Clone)]
pub struct NormalizedIntensity {
    pub features: FeatureVolume,
    /// Set when the percentile window collapsed and the output is constant 0.5.
    pub degenerate: bool,
}

/// Percentile-window intensity feature.
pub fn normalize_intensity(
    vol: &ScalarVolume,
    p_low: f64,
    p_high: f64,
) -> Result<NormalizedIntensity> {
    let range = IntensityRange::from_percentiles(vol, p_low, p_high)?;
    let degenerate = range.is_degenerate();
    if degenerate {
        warn!("intensity window collapsed ({} .. {}), emitting constant 0.5", range.low, range.high);
    }
    Ok(NormalizedIntensity {
        features: range.apply(vol),
        degenerate,
    })
}

pub const LANDMARK_COUNT: usize = 11;
const FOREGROUND_PERCENTILE: f64 = 5.0;

/// Piecewise-linear intensity map between decile landmarks.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationMap {
    source: [f64; LANDMARK_COUNT],
    target: [f64; LANDMARK_COUNT],
    // knots with strictly increasing source values
    knots: Vec<(f64, f64)>,
}

/// The 0th, 10th, ..., 100th percentiles of the voxels above the 5th percentile.
pub fn foreground_deciles(vol: &ScalarVolume) -> Result<[f64; LANDMARK_COUNT]> {
    let sorted = sorted_values(vol.data());
    let cut = percentile_sorted(&sorted, FOREGROUND_PERCENTILE);
    let start = sorted.partition_point(|&v| v as f64 <= cut);
    let fg = &sorted[start..];
    if fg.len() < 2 || fg[0] == fg[fg.len() - 1] {
        return Err(Error::Degenerate(
            "volume is constant over its foreground".into(),
        ));
    }
    let mut out = [0.0; LANDMARK_COUNT];
    for (i, o) in out.iter_mut().enumerate() {
        *o = percentile_sorted(fg, 10.0 * i as f64);
    }
    Ok(out)
}

impl StandardizationMap {
    pub fn new(source: [f64; LANDMARK_COUNT], target: [f64; LANDMARK_COUNT]) -> Result<Self> {
        let monotone = |l: &[f64; LANDMARK_COUNT]| l.windows(2).all(|w| w[0] <= w[1]);
        if !monotone(&source) || !monotone(&target) {
            return Err(Error::InvalidParameter("landmarks must be non-decreasing".into()));
        }
        let mut knots: Vec<(f64, f64)> = Vec::with_capacity(LANDMARK_COUNT);
        for (&s, &t) in source.iter().zip(&target) {
            match knots.last() {
                Some(&(ps, _)) if s <= ps => {}
                _ => knots.push((s, t)),
            }
        }
        if knots.len() < 2 {
            return Err(Error::Degenerate("source landmarks are all equal".into()));
        }
        Ok(Self {
            source,
            target,
            knots,
        })
    }

    /// Fits the map that carries `vol`'s foreground deciles onto `reference`'s.
    pub fn fit(vol: &ScalarVolume, reference: &ScalarVolume) -> Result<Self> {
        Self::new(foreground_deciles(vol)?, foreground_deciles(reference)?)
    }

    pub fn source(&self) -> &[f64; LANDMARK_COUNT] {
        &self.source
    }

    pub fn target(&self) -> &[f64; LANDMARK_COUNT] {
        &self.target
    }

    /// Maps one intensity; values outside the landmarks follow the end segments.
    pub fn map(&self, v: f64) -> f64 {
        let k = &self.knots;
        let seg = k.partition_point(|&(s, _)| s <= v).clamp(1, k.len() - 1);
        let (s0, t0) = k[seg - 1];
        let (s1, t1) = k[seg];
        t0 + (v - s0) * (t1 - t0) / (s1 - s0)
    }

    pub fn apply(&self, vol: &ScalarVolume) -> Result<ScalarVolume> {
        let data = vol.data().iter().map(|&v| self.map(v as f64) as f32).collect();
        vol.with_data(data)
    }
}

/// Histogram-landmark standardization of `vol` onto `reference`'s intensity scale.
pub fn intensity_standardize(vol: &ScalarVolume, reference: &ScalarVolume) -> Result<ScalarVolume> {
    StandardizationMap::fit(vol, reference)?.apply(vol)
}
