use log::debug;

use crate::error::{Error, Result};
use crate::regcore::{
    build_dsv, build_dsv_labels, winner_takes_all, CostVolume, DisplacementSet,
    WinnerAccumulator,
};
use crate::volume::{DisplacementField, FeatureVolume};

/// Window and smoothing applied to every cost map before the argmin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostFilter {
    pub patch_radius: usize,
    pub smooth_sigma: f64,
}

fn filter_in_place(costs: &mut CostVolume, filter: CostFilter) {
    costs.aggregate_in_place(filter.patch_radius);
    costs.regularize_in_place(filter.smooth_sigma);
}

/// Cost volume -> aggregation -> smoothing -> winner-takes-all, within a memory budget.
///
/// When the whole cost volume fits in `budget_bytes` it is built at once;
/// otherwise labels are processed in canonical order in batches that fit,
/// folding each batch into a running per-voxel minimum. Both paths apply
/// the same per-label kernels and the same tie-break, so they agree bit for bit.
pub fn chunked_dsv_execution(
    fixed: &FeatureVolume,
    moving: &FeatureVolume,
    disp: &DisplacementSet,
    filter: CostFilter,
    budget_bytes: u64,
) -> Result<DisplacementField> {
    let dims = fixed.dims();
    let min = 2 * disp.l_max().ceil() as usize + 1;
    if dims.min_axis() < min {
        return Err(Error::VolumeTooSmall { dims, min });
    }
    let map_bytes = CostVolume::map_bytes(dims);
    if budget_bytes < map_bytes {
        return Err(Error::BudgetTooSmall {
            budget: budget_bytes,
            required: map_bytes,
        });
    }
    let batch = (budget_bytes / map_bytes) as usize;
    if batch >= disp.len() {
        let mut costs = build_dsv(fixed, moving, disp)?;
        filter_in_place(&mut costs, filter);
        return winner_takes_all(&costs, disp);
    }
    debug!(
        "cost volume of {} labels exceeds budget; {} labels per batch",
        disp.len(),
        batch
    );
    let mut acc = WinnerAccumulator::new(dims);
    let mut start = 0;
    while start < disp.len() {
        let end = (start + batch).min(disp.len());
        let mut costs = build_dsv_labels(fixed, moving, disp, start..end)?;
        filter_in_place(&mut costs, filter);
        acc.fold(&costs, start, disp);
        start = end;
    }
    Ok(acc.into_field(disp))
}
