pub mod cluster;
pub mod compare;
pub mod features;
pub mod grid;
pub mod ingest;
pub mod report;
pub mod run;
pub mod select_grid;
pub mod select_k;

use std::path::Path;

use urbanform_core::features::FeatureCatalog;
use urbanform_core::geometry::Boundary;
use urbanform_core::ingest::EntitySet;

use crate::errors::{require_file, AppResult, StageExt};

pub(crate) fn load_boundary(path: &Path, stage: &'static str) -> AppResult<Boundary> {
    require_file(path, "boundary file")?;
    let text = std::fs::read_to_string(path).stage(stage)?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "boundary".into());
    let (boundary, warnings) =
        urbanform_core::ingest::parse_boundary_str(&text, &fallback).stage(stage)?;
    for w in warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(boundary)
}

pub(crate) fn load_osm_clipped(
    osm: &Path,
    boundary: &Boundary,
    stage: &'static str,
) -> AppResult<EntitySet> {
    require_file(osm, "OSM extract")?;
    let bytes = std::fs::read(osm).stage(stage)?;
    let source = crate::io::source_string(osm);
    let (set, warnings) = urbanform_core::ingest::parse_osm_bytes(&bytes, source).stage(stage)?;
    for w in &warnings {
        log::warn!("{}: {w}", osm.display());
    }
    urbanform_core::ingest::clip_to_boundary(&set, boundary).stage(stage)
}

pub(crate) fn load_catalog(path: Option<&Path>, stage: &'static str) -> AppResult<FeatureCatalog> {
    match path {
        Some(p) => {
            require_file(p, "feature catalog")?;
            let text = std::fs::read_to_string(p).stage(stage)?;
            FeatureCatalog::from_toml(&text).stage(stage)
        }
        None => Ok(FeatureCatalog::standard()),
    }
}

/// Parses the `--k` argument: a number or "auto".
pub(crate) fn parse_k(k: &str) -> AppResult<Option<usize>> {
    if k == "auto" {
        return Ok(None);
    }
    k.parse::<usize>().map(Some).map_err(|_| {
        crate::errors::validation(format!("--k must be a number or \"auto\", got {k:?}"))
    })
}
