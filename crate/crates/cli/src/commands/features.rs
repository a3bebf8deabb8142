use std::path::Path;

use urbanform_core::features::{assemble_matrix, compute_catalog_columns};

use crate::errors::{require_file, AppResult, StageExt};
use crate::io::{read_entities_file, read_grid_file, write_features_file};

pub fn run(
    entities: &Path,
    grid: &Path,
    catalog: Option<&Path>,
    city: Option<&str>,
    out: &Path,
) -> AppResult<()> {
    require_file(entities, "entities file")?;
    require_file(grid, "grid file")?;
    let catalog = super::load_catalog(catalog, "features")?;
    let set = read_entities_file(entities, "features")?;
    let grid = read_grid_file(grid, "features")?;
    let city_tag = city.unwrap_or(&grid.boundary.name).to_string();

    let columns = compute_catalog_columns(&set, &grid, &catalog).stage("features")?;
    let matrix = assemble_matrix(&columns, &city_tag, &grid.cell_ids(), Some(grid.size_m))
        .stage("features")?;
    write_features_file(&matrix, out, "features")?;
    log::info!(
        "{} cells x {} features -> {}",
        matrix.n_rows(),
        matrix.n_cols(),
        out.display()
    );
    Ok(())
}
