use std::path::Path;

use urbanform_core::features::{standardize, Normalization};
use urbanform_core::report::writers::write_bic_curve;
use urbanform_core::selection::select_k;

use crate::errors::{require_file, AppResult, StageExt};
use crate::io::read_features_file;
use crate::GmmArgs;

pub fn run(
    features: &Path,
    k_min: usize,
    k_max: usize,
    gmm: &GmmArgs,
    seed: Option<u64>,
    out: &Path,
) -> AppResult<()> {
    if k_min < 1 || k_min > k_max {
        return Err(crate::errors::validation(format!(
            "invalid K range [{k_min}, {k_max}]"
        )));
    }
    require_file(features, "features CSV")?;
    let raw = read_features_file(features, "select-k")?;
    let (standardized, dropped) = standardize(&raw, Normalization::Zscore).stage("select-k")?;
    if !dropped.is_empty() {
        log::warn!("dropped degenerate columns: {}", dropped.join(", "));
    }
    let base = gmm.to_config(1, crate::effective_seed(seed));
    let curve = select_k(&standardized, k_min..=k_max, &base).stage("select-k")?;
    let file = std::fs::File::create(out).stage("select-k")?;
    write_bic_curve(&curve, file).stage("select-k")?;
    println!("best_k={}", curve.best_k);
    Ok(())
}
