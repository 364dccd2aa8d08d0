use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::volume::{ensure_same_dims, LabelVolume};

/// `100 |A ∩ B| / |A ∪ B|` for the masks of `label`.
///
/// Returns `None` when the label is absent from both volumes.
pub fn jaccard(a: &LabelVolume, b: &LabelVolume, label: u32) -> Result<Option<f64>> {
    ensure_same_dims(a.dims(), b.dims())?;
    let (mut inter, mut union) = (0u64, 0u64);
    for (&la, &lb) in a.data().iter().zip(b.data()) {
        let (ia, ib) = (la == label, lb == label);
        inter += (ia && ib) as u64;
        union += (ia || ib) as u64;
    }
    Ok((union > 0).then(|| 100.0 * inter as f64 / union as f64))
}

/// Non-background labels present in either volume, ascending.
pub fn structure_labels(a: &LabelVolume, b: &LabelVolume) -> Vec<u32> {
    let mut set: BTreeSet<u32> = a.label_set();
    set.extend(b.label_set());
    set.remove(&0);
    set.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairJc {
    pub per_structure: BTreeMap<u32, f64>,
    pub mean: f64,
}

impl PairJc {
    /// Number of structures that entered the mean.
    pub fn structure_count(&self) -> usize {
        self.per_structure.len()
    }
}

/// Mean Jaccard over `labels`, skipping labels absent from both volumes.
pub fn mean_jc_pair(fixed: &LabelVolume, warped: &LabelVolume, labels: &[u32]) -> Result<PairJc> {
    ensure_same_dims(fixed.dims(), warped.dims())?;
    let slot: HashMap<u32, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    // (|A|, |B|, |A ∩ B|) per requested label
    let mut counts = vec![(0u64, 0u64, 0u64); labels.len()];
    for (&la, &lb) in fixed.data().iter().zip(warped.data()) {
        if let Some(&i) = slot.get(&la) {
            counts[i].0 += 1;
            if la == lb {
                counts[i].2 += 1;
            }
        }
        if let Some(&i) = slot.get(&lb) {
            counts[i].1 += 1;
        }
    }
    let per_structure: BTreeMap<u32, f64> = slot
        .iter()
        .filter_map(|(&label, &i)| {
            let (a, b, inter) = counts[i];
            let union = a + b - inter;
            (union > 0).then(|| (label, 100.0 * inter as f64 / union as f64))
        })
        .collect();
    if per_structure.is_empty() {
        return Err(Error::EmptyLabelList);
    }
    let mean = per_structure.values().sum::<f64>() / per_structure.len() as f64;
    Ok(PairJc {
        per_structure,
        mean,
    })
}

/// Mean of per-pair means.
pub fn mean_jc_dataset(pair_means: &[f64]) -> Result<f64> {
    if pair_means.is_empty() {
        return Err(Error::EmptyPairList);
    }
    Ok(pair_means.iter().sum::<f64>() / pair_means.len() as f64)
}
