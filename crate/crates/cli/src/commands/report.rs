use std::path::Path;

use urbanform_core::features::{standardize, FeatureMatrix, Normalization};
use urbanform_core::geometry::HexGrid;
use urbanform_core::gmm::{assign, read_model};
use urbanform_core::report::writers::{
    write_cluster_means, write_correlations, write_distribution,
};
use urbanform_core::report::{cluster_means, correlation_matrix, export_choropleth};

use crate::errors::{require_file, validation, AppResult, StageExt};
use crate::io::{create_dir, read_features_file, read_grid_file};

pub fn run(
    features: &Path,
    model: &Path,
    grid: &Path,
    bic: Option<&Path>,
    sweep: Option<&Path>,
    out: &Path,
) -> AppResult<()> {
    require_file(features, "features CSV")?;
    require_file(model, "model file")?;
    require_file(grid, "grid file")?;
    let raw = read_features_file(features, "report")?;
    let grid = read_grid_file(grid, "report")?;
    let model_file = std::fs::File::open(model).stage("report")?;
    let (model, _config) = read_model(model_file).stage("report")?;

    let labels = compute_labels(&raw, &model)?;
    write_report_tree(&raw, &grid, &labels, bic, sweep, out)
}

pub(crate) fn compute_labels(
    raw: &FeatureMatrix,
    model: &urbanform_core::gmm::GmmModel,
) -> AppResult<Vec<usize>> {
    let (standardized, _) = standardize(raw, Normalization::Zscore).stage("report")?;
    if standardized.n_cols() != model.dim {
        return Err(validation(format!(
            "model expects {} features but the matrix standardizes to {}",
            model.dim,
            standardized.n_cols()
        )));
    }
    assign(model, &standardized).stage("report")
}

/// Writes the full report tree for one city.
pub(crate) fn write_report_tree(
    raw: &FeatureMatrix,
    grid: &HexGrid,
    labels: &[usize],
    bic: Option<&Path>,
    sweep: Option<&Path>,
    out: &Path,
) -> AppResult<()> {
    let expected: Vec<i64> = grid.cell_ids();
    let got: Vec<i64> = raw.row_ids.iter().map(|r| r.cell_id).collect();
    if expected != got {
        return Err(validation(
            "features rows do not match the grid's cells (wrong grid file?)",
        ));
    }
    let city = raw
        .row_ids
        .first()
        .map(|r| r.city.clone())
        .unwrap_or_else(|| "city".into());

    create_dir(out, "report")?;
    create_dir(&out.join("distributions"), "report")?;

    let table = cluster_means(raw, labels).stage("report")?;
    let f = std::fs::File::create(out.join("cluster_means.csv")).stage("report")?;
    write_cluster_means(&table, f).stage("report")?;

    let (standardized, _) = standardize(raw, Normalization::Zscore).stage("report")?;
    let corr = correlation_matrix(&standardized).stage("report")?;
    let f = std::fs::File::create(out.join("correlations.csv")).stage("report")?;
    write_correlations(&standardized.column_names, &corr, f).stage("report")?;

    for name in &raw.column_names {
        let f = std::fs::File::create(out.join("distributions").join(format!("{name}.csv")))
            .stage("report")?;
        write_distribution(raw, labels, name, f).stage("report")?;
    }

    let doc = export_choropleth(grid, labels, &city).stage("report")?;
    let mut text = serde_json::to_string_pretty(&doc.json).stage("report")?;
    text.push('\n');
    std::fs::write(out.join(format!("map_{city}.geojson")), text).stage("report")?;

    if let Some(path) = bic {
        require_file(path, "BIC curve CSV")?;
        std::fs::copy(path, out.join("bic.csv")).stage("report")?;
    }
    if let Some(path) = sweep {
        require_file(path, "grid sweep CSV")?;
        std::fs::copy(path, out.join("silhouette_sweep.csv")).stage("report")?;
    }
    Ok(())
}
