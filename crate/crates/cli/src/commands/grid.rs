use std::path::Path;

use crate::errors::{require_file, AppResult, StageExt};
use crate::io::write_grid_file;

pub fn run(entities: Option<&Path>, boundary: &Path, size: f64, out: &Path) -> AppResult<()> {
    if let Some(p) = entities {
        // The tessellation depends only on the boundary; the entities flag
        // exists so pipeline scripts can pass a uniform argument set.
        require_file(p, "entities file")?;
    }
    let boundary = super::load_boundary(boundary, "grid")?;
    let grid = urbanform_core::geometry::make_hexgrid(&boundary, size).stage("grid")?;
    write_grid_file(&grid, out, "grid")?;
    log::info!("{} cells at {size} m", grid.cells.len());
    Ok(())
}
