//! Model selection: BIC over K, silhouette over grid size.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::features::{
    assemble_matrix, compute_catalog_columns, standardize, FeatureCatalog, FeatureMatrix,
    Normalization,
};
use crate::geometry::{make_hexgrid, Boundary};
use crate::gmm::{assign, bic, fit_traced, GmmConfig, GmmModel};
use crate::ingest::EntitySet;
use crate::selection::silhouette::silhouette;

#[derive(Debug, Clone, PartialEq)]
pub struct BicEntry {
    pub k: usize,
    pub bic: f64,
    pub train_log_likelihood: f64,
    pub converged_restarts: usize,
}

/// BIC sweep over candidate component counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BicCurve {
    pub entries: Vec<BicEntry>,
    /// K values whose restarts all failed; excluded from the argmin.
    pub failed: Vec<usize>,
    pub best_k: usize,
}

pub(crate) fn select_k_with_models(
    matrix: &FeatureMatrix,
    k_range: RangeInclusive<usize>,
    base: &GmmConfig,
) -> Result<(BicCurve, Vec<Option<GmmModel>>)> {
    let (lo, hi) = (*k_range.start(), *k_range.end());
    let rows = matrix.n_rows();
    if lo < 1 || hi < lo || hi > rows {
        return Err(Error::InvalidKRange { lo, hi, rows });
    }

    let mut entries = Vec::new();
    let mut failed = Vec::new();
    let mut models = Vec::new();
    for k in lo..=hi {
        let config = base.with_k(k);
        match fit_traced(matrix, &config) {
            Ok((model, trace)) => {
                let score = bic(&model, matrix)?;
                entries.push(BicEntry {
                    k,
                    bic: score,
                    train_log_likelihood: model.train_log_likelihood,
                    converged_restarts: trace.converged_restarts(),
                });
                models.push(Some(model));
            }
            Err(Error::RestartExhausted { .. }) => {
                log::warn!("K = {k}: every restart collapsed; excluded from the sweep");
                failed.push(k);
                models.push(None);
            }
            Err(other) => return Err(other),
        }
    }
    if entries.is_empty() {
        return Err(Error::AllKFailed);
    }
    let best_k = entries
        .iter()
        .fold(None::<&BicEntry>, |best, e| match best {
            Some(b) if b.bic <= e.bic => Some(b),
            _ => Some(e),
        })
        .map(|e| e.k)
        .expect("entries nonempty");
    Ok((
        BicCurve {
            entries,
            failed,
            best_k,
        },
        models,
    ))
}

/// Fits every K in the range with the shared seed policy and picks the
/// BIC minimizer (ties to the smaller K).
pub fn select_k(
    matrix: &FeatureMatrix,
    k_range: RangeInclusive<usize>,
    base: &GmmConfig,
) -> Result<BicCurve> {
    select_k_with_models(matrix, k_range, base).map(|(curve, _)| curve)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSweepEntry {
    pub size_m: f64,
    pub best_k: usize,
    pub silhouette: f64,
    pub cell_count: usize,
}

/// Silhouette sweep over candidate grid sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSweepResult {
    pub entries: Vec<GridSweepEntry>,
    /// (size, reason) for skipped candidates.
    pub skipped: Vec<(f64, String)>,
    pub best_size: f64,
}

/// For each candidate size: rebuild the grid, aggregate features, z-score,
/// pick K by BIC, then score the chosen labeling by silhouette. The best
/// size maximizes silhouette (ties to the smaller size).
pub fn select_grid(
    entities: &EntitySet,
    boundary: &Boundary,
    catalog: &FeatureCatalog,
    sizes: &[f64],
    k_range: RangeInclusive<usize>,
    base: &GmmConfig,
) -> Result<GridSweepResult> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes.iter().any(|&s| s <= 0.0)
    {
        return Err(Error::InvalidSizeList);
    }
    let k_max = *k_range.end();

    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for &size_m in sizes {
        match sweep_one_size(entities, boundary, catalog, size_m, k_range.clone(), base) {
            Ok(entry) => entries.push(entry),
            Err(SweepSkip::Skip(reason)) => {
                log::warn!("grid size {size_m}: skipped ({reason})");
                skipped.push((size_m, reason));
            }
            Err(SweepSkip::Fail(err)) => return Err(err),
        }
    }
    if entries.is_empty() {
        let reasons = skipped
            .iter()
            .map(|(s, r)| format!("{s}: {r}"))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::AllSizesSkipped(reasons));
    }
    let best_size = entries
        .iter()
        .fold(None::<&GridSweepEntry>, |best, e| match best {
            Some(b) if b.silhouette >= e.silhouette => Some(b),
            _ => Some(e),
        })
        .map(|e| e.size_m)
        .expect("entries nonempty");
    Ok(GridSweepResult {
        entries,
        skipped,
        best_size,
    })
}

enum SweepSkip {
    Skip(String),
    Fail(Error),
}

fn sweep_one_size(
    entities: &EntitySet,
    boundary: &Boundary,
    catalog: &FeatureCatalog,
    size_m: f64,
    k_range: RangeInclusive<usize>,
    base: &GmmConfig,
) -> std::result::Result<GridSweepEntry, SweepSkip> {
    let k_max = *k_range.end();
    let grid = match make_hexgrid(boundary, size_m) {
        Ok(g) => g,
        Err(e @ (Error::GridExceedsStudyArea | Error::GridTooFine { .. })) => {
            return Err(SweepSkip::Skip(e.to_string()))
        }
        Err(e) => return Err(SweepSkip::Fail(e)),
    };
    let cell_count = grid.cells.len();
    if cell_count < 2 * k_max {
        return Err(SweepSkip::Skip(format!(
            "{cell_count} cells < 2 * k_max = {}",
            2 * k_max
        )));
    }
    let columns = compute_catalog_columns(entities, &grid, catalog).map_err(SweepSkip::Fail)?;
    let raw = assemble_matrix(&columns, &boundary.name, &grid.cell_ids(), Some(size_m))
        .map_err(SweepSkip::Fail)?;
    let (standardized, _) = match standardize(&raw, Normalization::Zscore) {
        Ok(out) => out,
        Err(Error::AllColumnsDegenerate) => {
            return Err(SweepSkip::Skip("all feature columns degenerate".into()))
        }
        Err(e) => return Err(SweepSkip::Fail(e)),
    };
    let (curve, models) =
        select_k_with_models(&standardized, k_range, base).map_err(SweepSkip::Fail)?;
    let best_model = curve
        .entries
        .iter()
        .zip(models.iter())
        .find(|(e, _)| e.k == curve.best_k)
        .and_then(|(_, m)| m.as_ref())
        .expect("best K has a model");
    let labels = assign(best_model, &standardized).map_err(SweepSkip::Fail)?;
    let breakdown = match silhouette(&standardized, &labels) {
        Ok(b) => b,
        Err(Error::SingleCluster) => {
            return Err(SweepSkip::Skip("best model yields a single cluster".into()))
        }
        Err(e) => return Err(SweepSkip::Fail(e)),
    };
    Ok(GridSweepEntry {
        size_m,
        best_k: curve.best_k,
        silhouette: breakdown.overall,
        cell_count,
    })
}
