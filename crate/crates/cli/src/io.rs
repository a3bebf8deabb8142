//! Small file helpers shared by the subcommands.

use std::fs;
use std::path::Path;

use urbanform_core::features::{FeatureMatrix, MatrixMeta};
use urbanform_core::geometry::HexGrid;
use urbanform_core::ingest::EntitySet;

use crate::errors::{AppResult, StageExt};

/// Source provenance string: path plus file mtime (stable across runs on
/// the same input, unlike wall-clock time).
pub fn source_string(path: &Path) -> String {
    let mtime = fs::metadata(path)
        .and_then(|m| m.modified())
        .ok()
        .and_then(|t| t.duration_since(std::time::UNIX_EPOCH).ok())
        .map(|d| d.as_secs().to_string())
        .unwrap_or_else(|| "unknown".into());
    format!("{} mtime={}", path.display(), mtime)
}

pub fn read_entities_file(path: &Path, stage: &'static str) -> AppResult<EntitySet> {
    let file = fs::File::open(path).stage(stage)?;
    urbanform_core::ingest::read_entities(std::io::BufReader::new(file)).stage(stage)
}

pub fn write_entities_file(set: &EntitySet, path: &Path, stage: &'static str) -> AppResult<()> {
    let mut buf = Vec::new();
    urbanform_core::ingest::write_entities(set, &mut buf).stage(stage)?;
    fs::write(path, buf).stage(stage)
}

pub fn read_grid_file(path: &Path, stage: &'static str) -> AppResult<HexGrid> {
    let text = fs::read_to_string(path).stage(stage)?;
    let doc: serde_json::Value = serde_json::from_str(&text).stage(stage)?;
    urbanform_core::geometry::gridio::grid_from_geojson(&doc).stage(stage)
}

pub fn write_grid_file(grid: &HexGrid, path: &Path, stage: &'static str) -> AppResult<()> {
    let doc = urbanform_core::geometry::gridio::grid_to_geojson(grid);
    let mut text = serde_json::to_string_pretty(&doc).stage(stage)?;
    text.push('\n');
    fs::write(path, text).stage(stage)
}

/// Reads a features CSV plus its optional `.meta.json` sidecar.
pub fn read_features_file(path: &Path, stage: &'static str) -> AppResult<FeatureMatrix> {
    let file = fs::File::open(path).stage(stage)?;
    let mut matrix =
        urbanform_core::features::read_features_csv(std::io::BufReader::new(file)).stage(stage)?;
    let meta_path = urbanform_core::features::csvio::meta_path_for(path);
    if meta_path.is_file() {
        let text = fs::read_to_string(&meta_path).stage(stage)?;
        let meta: MatrixMeta = serde_json::from_str(&text).stage(stage)?;
        matrix.grid_size_m = Some(meta.grid_size_m);
    }
    Ok(matrix)
}

pub fn write_features_file(
    matrix: &FeatureMatrix,
    path: &Path,
    stage: &'static str,
) -> AppResult<()> {
    let mut buf = Vec::new();
    urbanform_core::features::write_features_csv(matrix, &mut buf).stage(stage)?;
    fs::write(path, buf).stage(stage)?;
    if let Some(grid_size_m) = matrix.grid_size_m {
        let meta = MatrixMeta {
            city: matrix
                .row_ids
                .first()
                .map(|r| r.city.clone())
                .unwrap_or_default(),
            grid_size_m,
            cell_count: matrix.n_rows(),
        };
        let mut text = serde_json::to_string_pretty(&meta).stage(stage)?;
        text.push('\n');
        fs::write(urbanform_core::features::csvio::meta_path_for(path), text).stage(stage)?;
    }
    Ok(())
}

pub fn create_dir(path: &Path, stage: &'static str) -> AppResult<()> {
    fs::create_dir_all(path).stage(stage)
}
