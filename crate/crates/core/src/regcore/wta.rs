use rayon::prelude::*;

use super::{CostVolume, DisplacementSet};
use crate::error::{Error, Result};
use crate::volume::{DisplacementField, Dims};

const VOXEL_CHUNK: usize = 4096;

/// Running per-voxel minimum over displacement labels.
///
/// Ties are resolved by [`DisplacementSet::tie_key`], so the result does not
/// depend on the order in which labels are folded in.
#[derive(Debug, Clone)]
pub struct WinnerAccumulator {
    dims: Dims,
    best_cost: Vec<f32>,
    best_label: Vec<u32>,
}

impl WinnerAccumulator {
    pub fn new(dims: Dims) -> Self {
        Self {
            dims,
            best_cost: vec![f32::INFINITY; dims.len()],
            best_label: vec![u32::MAX; dims.len()],
        }
    }

    /// Folds in cost maps whose first map belongs to label `first_label`.
    pub fn fold(&mut self, costs: &CostVolume, first_label: usize, disp: &DisplacementSet) {
        assert_eq!(costs.dims(), self.dims, "cost volume grid differs from accumulator");
        assert!(first_label + costs.label_count() <= disp.len());
        let n = self.dims.len();
        let all = costs.costs();
        self.best_cost
            .par_chunks_mut(VOXEL_CHUNK)
            .zip(self.best_label.par_chunks_mut(VOXEL_CHUNK))
            .enumerate()
            .for_each(|(chunk, (bc, bl))| {
                let start = chunk * VOXEL_CHUNK;
                for l in 0..costs.label_count() {
                    let label = first_label + l;
                    let key = disp.tie_key(label);
                    let map = &all[l * n + start..l * n + start + bc.len()];
                    for ((c, best), best_l) in map.iter().zip(bc.iter_mut()).zip(bl.iter_mut()) {
                        if *c < *best || (*c == *best && key < disp.tie_key(*best_l as usize)) {
                            *best = *c;
                            *best_l = label as u32;
                        }
                    }
                }
            });
    }

    pub fn best_labels(&self) -> &[u32] {
        &self.best_label
    }

    pub fn best_costs(&self) -> &[f32] {
        &self.best_cost
    }

    pub fn into_field(self, disp: &DisplacementSet) -> DisplacementField {
        let vectors: Vec<[f32; 3]> = self
            .best_label
            .iter()
            .map(|&l| {
                assert!(l != u32::MAX, "voxel received no cost");
                let v = disp.vector(l as usize);
                [v[0] as f32, v[1] as f32, v[2] as f32]
            })
            .collect();
        DisplacementField::new(self.dims, crate::volume::UNIT_SPACING, vectors)
            .expect("displacements are finite")
    }
}

/// Per-voxel argmin over the displacement labels.
pub fn winner_takes_all(dsv: &CostVolume, disp: &DisplacementSet) -> Result<DisplacementField> {
    if dsv.label_count() != disp.len() {
        return Err(Error::InvalidParameter(format!(
            "cost volume has {} labels but the displacement set has {}",
            dsv.label_count(),
            disp.len()
        )));
    }
    let mut acc = WinnerAccumulator::new(dsv.dims());
    acc.fold(dsv, 0, disp);
    Ok(acc.into_field(disp))
}
