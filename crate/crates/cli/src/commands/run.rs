//! End-to-end pipeline: ingest -> grid -> features -> select/fit -> report.

use std::path::Path;

use urbanform_core::features::{
    assemble_matrix, compute_catalog_columns, standardize, Normalization,
};
use urbanform_core::gmm::{fit, write_model};
use urbanform_core::report::writers::{write_bic_curve, write_grid_sweep};
use urbanform_core::selection::{select_grid, select_k, GridSweepResult};

use crate::errors::{AppError, AppResult, StageExt};
use crate::io::{write_entities_file, write_features_file, write_grid_file};
use crate::runconfig::{check_seed_range, generate_seed, ResolvedSection, RunConfig};

pub fn run(config_path: &Path, cli_seed: Option<u64>) -> AppResult<()> {
    let mut config = RunConfig::load(config_path)?;
    let seed = cli_seed
        .or(config.cluster.seed)
        .unwrap_or_else(generate_seed);
    check_seed_range(seed)?;
    config.cluster.seed = Some(seed);

    let out_dir = config.output.dir.clone();
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| AppError::Validation(format!("cannot create output dir: {e}")))?;

    match execute(&config, seed, &out_dir) {
        Ok(()) => {
            // A marker from a previous failed run must not survive success.
            let _ = std::fs::remove_file(out_dir.join("FAILED"));
            Ok(())
        }
        Err(err) => {
            if let Some(stage) = err.stage_name() {
                let _ = std::fs::write(out_dir.join("FAILED"), format!("{stage}: {err}\n"));
            }
            Err(err)
        }
    }
}

fn execute(config: &RunConfig, seed: u64, out_dir: &Path) -> AppResult<()> {
    // Stage: ingest.
    let boundary = super::load_boundary(&config.input.boundary, "ingest")?;
    let entities = super::load_osm_clipped(&config.input.osm, &boundary, "ingest")?;
    write_entities_file(&entities, &out_dir.join("entities.ndjson"), "ingest")?;
    let city = config
        .input
        .city
        .clone()
        .unwrap_or_else(|| boundary.name.clone());

    let catalog = super::load_catalog(config.features.catalog.as_deref(), "features")?;

    // Stage: grid (fixed size or silhouette sweep).
    let mut sweep_result: Option<GridSweepResult> = None;
    let grid_size = match (&config.grid.size_m, &config.grid.sizes) {
        (Some(size), None) => *size,
        (None, Some(sizes)) => {
            let base = config.gmm_config(1, seed)?;
            let sweep = select_grid(
                &entities,
                &boundary,
                &catalog,
                sizes,
                config.cluster.k_min..=config.cluster.k_max,
                &base,
            )
            .stage("grid")?;
            let best = sweep.best_size;
            sweep_result = Some(sweep);
            best
        }
        _ => unreachable!("validated"),
    };
    let grid = urbanform_core::geometry::make_hexgrid(&boundary, grid_size).stage("grid")?;
    write_grid_file(&grid, &out_dir.join("grid.geojson"), "grid")?;

    // Stage: features.
    let columns = compute_catalog_columns(&entities, &grid, &catalog).stage("features")?;
    let raw =
        assemble_matrix(&columns, &city, &grid.cell_ids(), Some(grid_size)).stage("features")?;
    write_features_file(&raw, &out_dir.join("features.csv"), "features")?;

    // Stage: cluster.
    let (standardized, dropped) = standardize(&raw, Normalization::Zscore).stage("cluster")?;
    let base = config.gmm_config(1, seed)?;
    let mut bic_curve = None;
    let chosen_k = match config.cluster.k {
        Some(k) => k,
        None => {
            let curve = select_k(
                &standardized,
                config.cluster.k_min..=config.cluster.k_max,
                &base,
            )
            .stage("cluster")?;
            let best = curve.best_k;
            bic_curve = Some(curve);
            best
        }
    };
    let gmm_config = base.with_k(chosen_k);
    let model = fit(&standardized, &gmm_config).stage("cluster")?;
    let f = std::fs::File::create(out_dir.join("model.json")).stage("cluster")?;
    write_model(&model, &gmm_config, f).stage("cluster")?;

    // Stage: report.
    let labels = super::report::compute_labels(&raw, &model)?;
    let report_dir = out_dir.join("report");
    super::report::write_report_tree(&raw, &grid, &labels, None, None, &report_dir)?;
    if let Some(curve) = &bic_curve {
        let f = std::fs::File::create(report_dir.join("bic.csv")).stage("report")?;
        write_bic_curve(curve, f).stage("report")?;
    }
    if let Some(sweep) = &sweep_result {
        let f = std::fs::File::create(report_dir.join("silhouette_sweep.csv")).stage("report")?;
        write_grid_sweep(sweep, f).stage("report")?;
    }

    // Persist the fully resolved config so the run is replayable.
    let mut resolved = config.clone();
    resolved.cluster.seed = Some(seed);
    resolved.resolved = Some(ResolvedSection {
        seed,
        city,
        grid_size_m: grid_size,
        k: chosen_k,
        dropped_columns: dropped,
    });
    let text = toml::to_string_pretty(&resolved).map_err(|e| AppError::Stage {
        stage: "report",
        message: e.to_string(),
    })?;
    std::fs::write(out_dir.join("resolved_config.toml"), text).stage("report")?;
    Ok(())
}
