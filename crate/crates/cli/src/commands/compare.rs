use std::path::{Path, PathBuf};

use urbanform_core::compare::{centrality_only_matrix, cross_city_report, join_cities, JoinMode};
use urbanform_core::gmm::{assign, fit, write_model};
use urbanform_core::report::export_choropleth;
use urbanform_core::report::writers::{write_city_cluster_means, write_contingency};
use urbanform_core::selection::select_k;

use crate::errors::{require_file, validation, AppResult, StageExt};
use crate::io::{create_dir, read_features_file, read_grid_file};
use crate::GmmArgs;

pub struct Args<'a> {
    pub features: &'a [PathBuf],
    pub grids: &'a [PathBuf],
    pub uniform: bool,
    pub k: &'a str,
    pub k_min: usize,
    pub k_max: usize,
    pub min_share: f64,
    pub centrality_only: bool,
    pub gmm: &'a GmmArgs,
    pub seed: Option<u64>,
    pub out: &'a Path,
}

pub fn run(args: Args<'_>) -> AppResult<()> {
    if args.features.len() != args.grids.len() {
        return Err(validation(format!(
            "{} feature files but {} grid files",
            args.features.len(),
            args.grids.len()
        )));
    }
    if !(0.0..=1.0).contains(&args.min_share) {
        return Err(validation("--min-share must be within [0, 1]"));
    }
    let fixed_k = super::parse_k(args.k)?;
    for p in args.features.iter().chain(args.grids.iter()) {
        require_file(p, "input file")?;
    }

    let mut matrices = Vec::with_capacity(args.features.len());
    for path in args.features {
        let mut m = read_features_file(path, "compare")?;
        if args.centrality_only {
            m = centrality_only_matrix(&m).stage("compare")?;
        }
        matrices.push(m);
    }
    let mode = if args.uniform {
        JoinMode::UniformGrid
    } else {
        JoinMode::PerCityGrid
    };
    let joint = join_cities(&matrices, mode).stage("compare")?;

    let base = args.gmm.to_config(1, crate::effective_seed(args.seed));
    let chosen_k = match fixed_k {
        Some(k) => k,
        None => {
            select_k(&joint.standardized, args.k_min..=args.k_max, &base)
                .stage("compare")?
                .best_k
        }
    };
    let config = base.with_k(chosen_k);
    let model = fit(&joint.standardized, &config).stage("compare")?;
    let labels = assign(&model, &joint.standardized).stage("compare")?;
    let report = cross_city_report(&labels, &joint, args.min_share).stage("compare")?;

    create_dir(args.out, "compare")?;
    let f = std::fs::File::create(args.out.join("contingency.csv")).stage("compare")?;
    write_contingency(&report, f).stage("compare")?;
    for (ci, city) in report.cities.iter().enumerate() {
        let f = std::fs::File::create(args.out.join(format!("cluster_means_{city}.csv")))
            .stage("compare")?;
        write_city_cluster_means(&report, ci, f).stage("compare")?;
    }
    let f = std::fs::File::create(args.out.join("model.json")).stage("compare")?;
    write_model(&model, &config, f).stage("compare")?;

    // Per-city labeled maps, using each city's grid file.
    for (range, grid_path) in joint.city_ranges.iter().zip(args.grids.iter()) {
        let grid = read_grid_file(grid_path, "compare")?;
        let expected: Vec<i64> = grid.cell_ids();
        let got: Vec<i64> = joint.raw.row_ids[range.start..range.end]
            .iter()
            .map(|r| r.cell_id)
            .collect();
        if expected != got {
            return Err(validation(format!(
                "grid {} does not match the features rows for city {}",
                grid_path.display(),
                range.city
            )));
        }
        let city_labels = &labels[range.start..range.end];
        let doc = export_choropleth(&grid, city_labels, &range.city).stage("compare")?;
        let mut text = serde_json::to_string_pretty(&doc.json).stage("compare")?;
        text.push('\n');
        std::fs::write(args.out.join(format!("map_{}.geojson", range.city)), text)
            .stage("compare")?;
    }

    let shared = report.shared.iter().filter(|&&s| s).count();
    println!(
        "k={chosen_k} clusters, {shared} shared across {} cities",
        report.cities.len()
    );
    Ok(())
}
