use std::path::Path;

use urbanform_core::features::{standardize, Normalization};
use urbanform_core::gmm::{fit, write_model};
use urbanform_core::report::writers::write_bic_curve;
use urbanform_core::selection::select_k;

use crate::errors::{require_file, AppResult, StageExt};
use crate::io::read_features_file;
use crate::GmmArgs;

#[allow(clippy::too_many_arguments)]
pub fn run(
    features: &Path,
    k: &str,
    k_min: usize,
    k_max: usize,
    gmm: &GmmArgs,
    seed: Option<u64>,
    out: &Path,
    bic_out: Option<&Path>,
) -> AppResult<()> {
    require_file(features, "features CSV")?;
    let fixed_k = super::parse_k(k)?;
    if fixed_k.is_none() && (k_min < 1 || k_min > k_max) {
        return Err(crate::errors::validation(format!(
            "invalid K range [{k_min}, {k_max}]"
        )));
    }
    let raw = read_features_file(features, "cluster")?;
    let (standardized, dropped) = standardize(&raw, Normalization::Zscore).stage("cluster")?;
    if !dropped.is_empty() {
        log::warn!("dropped degenerate columns: {}", dropped.join(", "));
    }

    let base = gmm.to_config(1, crate::effective_seed(seed));
    let chosen_k = match fixed_k {
        Some(k) => k,
        None => {
            let curve = select_k(&standardized, k_min..=k_max, &base).stage("cluster")?;
            if let Some(path) = bic_out {
                let file = std::fs::File::create(path).stage("cluster")?;
                write_bic_curve(&curve, file).stage("cluster")?;
            }
            curve.best_k
        }
    };
    let config = base.with_k(chosen_k);
    let model = fit(&standardized, &config).stage("cluster")?;
    let file = std::fs::File::create(out).stage("cluster")?;
    write_model(&model, &config, file).stage("cluster")?;
    println!(
        "k={} log_likelihood={}",
        chosen_k, model.train_log_likelihood
    );
    Ok(())
}
