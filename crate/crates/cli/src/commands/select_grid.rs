use std::path::Path;

use urbanform_core::report::writers::write_grid_sweep;
use urbanform_core::selection::select_grid;

use crate::errors::{AppResult, StageExt};
use crate::GmmArgs;

#[allow(clippy::too_many_arguments)]
pub fn run(
    osm: &Path,
    boundary: &Path,
    sizes: &[f64],
    k_min: usize,
    k_max: usize,
    catalog: Option<&Path>,
    gmm: &GmmArgs,
    seed: Option<u64>,
    out: &Path,
) -> AppResult<()> {
    if k_min < 1 || k_min > k_max {
        return Err(crate::errors::validation(format!(
            "invalid K range [{k_min}, {k_max}]"
        )));
    }
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes.iter().any(|&s| s <= 0.0)
    {
        return Err(crate::errors::validation(
            "--sizes needs at least two strictly increasing positive values",
        ));
    }
    let boundary = super::load_boundary(boundary, "select-grid")?;
    let entities = super::load_osm_clipped(osm, &boundary, "select-grid")?;
    let catalog = super::load_catalog(catalog, "select-grid")?;
    let base = gmm.to_config(1, crate::effective_seed(seed));
    let sweep = select_grid(&entities, &boundary, &catalog, sizes, k_min..=k_max, &base)
        .stage("select-grid")?;
    let file = std::fs::File::create(out).stage("select-grid")?;
    write_grid_sweep(&sweep, file).stage("select-grid")?;
    for (size, reason) in &sweep.skipped {
        log::warn!("size {size} skipped: {reason}");
    }
    println!("best_size={}", sweep.best_size);
    Ok(())
}
