//! Per-cell tag-count features.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::features::catalog::{CatalogEntry, FeatureCatalog, TagSelector};
use crate::features::matrix::{Aggregation, FeatureColumn};
use crate::features::network::{build_walk_network, network_feature};
use crate::geometry::HexGrid;
use crate::ingest::{EntityKind, EntitySet};

/// Cells intersected by a way, found by sampling its polyline at steps of
/// at most `size_m / 10` and locating each sample point.
pub fn way_cells(grid: &HexGrid, coords: &[(f64, f64)]) -> BTreeSet<usize> {
    let step = grid.size_m / 10.0;
    let mut cells = BTreeSet::new();
    for w in coords.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
        let n = (len / step).ceil().max(1.0) as usize;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let x = x0 + t * (x1 - x0);
            let y = y0 + t * (y1 - y0);
            if let Some(idx) = grid.locate_index(x, y) {
                cells.insert(idx);
            }
        }
    }
    cells
}

/// Counts matching entities per cell: nodes by containment, ways once per
/// intersected cell.
pub fn count_feature(
    entities: &EntitySet,
    grid: &HexGrid,
    selector: &TagSelector,
) -> FeatureColumn {
    let mut values = vec![0.0_f64; grid.cells.len()];
    let mut matched = 0usize;
    for e in entities.iter() {
        if !selector.matches(&e.tags) {
            continue;
        }
        matched += 1;
        match e.kind {
            EntityKind::Node => {
                let p = e.coords[0];
                let (x, y) = grid.frame.project(p.lat, p.lon);
                if let Some(i) = grid.locate_index(x, y) {
                    values[i] += 1.0;
                }
            }
            EntityKind::Way => {
                let projected: Vec<(f64, f64)> = e
                    .coords
                    .iter()
                    .map(|p| grid.frame.project(p.lat, p.lon))
                    .collect();
                for i in way_cells(grid, &projected) {
                    values[i] += 1.0;
                }
            }
        }
    }
    let name = selector.column_name();
    if matched == 0 {
        log::warn!("selector {name} matched no entities; column is all zeros");
    }
    FeatureColumn {
        name,
        values,
        aggregation: Aggregation::Extensive,
    }
}

/// Computes every catalog column against a grid, in catalog order.
pub fn compute_catalog_columns(
    entities: &EntitySet,
    grid: &HexGrid,
    catalog: &FeatureCatalog,
) -> Result<Vec<FeatureColumn>> {
    let needs_network = catalog
        .entries
        .iter()
        .any(|e| matches!(e, CatalogEntry::NetworkDegreeCentrality { .. }));
    let graph = if needs_network {
        Some(build_walk_network(entities, &catalog.walkable)?)
    } else {
        None
    };
    catalog
        .entries
        .iter()
        .map(|entry| match entry {
            CatalogEntry::Count(sel) => Ok(count_feature(entities, grid, sel)),
            CatalogEntry::NetworkDegreeCentrality { aggregation } => {
                network_feature(grid, graph.as_ref().expect("graph built"), *aggregation)
            }
        })
        .collect()
}
