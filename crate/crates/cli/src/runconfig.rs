//! Declarative pipeline configuration for `urbanform run`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::errors::{validation, AppError, AppResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputSection {
    pub osm: PathBuf,
    pub boundary: PathBuf,
    /// City tag; defaults to the boundary's name.
    pub city: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSection {
    /// Fixed grid size in meters.
    pub size_m: Option<f64>,
    /// Candidate sizes for a silhouette sweep (mutually exclusive with size_m).
    pub sizes: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FeaturesSection {
    /// TOML catalog path; absent means the built-in catalogue.
    pub catalog: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterSection {
    /// Fixed component count; absent means BIC selection over k_min..=k_max.
    pub k: Option<usize>,
    #[serde(default = "default_k_min")]
    pub k_min: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_covariance")]
    pub covariance: String,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_restarts")]
    pub n_restarts: usize,
    #[serde(default = "default_reg_var")]
    pub reg_var: f64,
    /// Auto-generated and recorded when omitted.
    pub seed: Option<u64>,
}

fn default_k_min() -> usize {
    2
}
fn default_k_max() -> usize {
    12
}
fn default_covariance() -> String {
    "diagonal".into()
}
fn default_max_iter() -> usize {
    500
}
fn default_tol() -> f64 {
    1e-7
}
fn default_restarts() -> usize {
    10
}
fn default_reg_var() -> f64 {
    1e-6
}

impl Default for ClusterSection {
    fn default() -> Self {
        Self {
            k: None,
            k_min: default_k_min(),
            k_max: default_k_max(),
            covariance: default_covariance(),
            max_iter: default_max_iter(),
            tol: default_tol(),
            n_restarts: default_restarts(),
            reg_var: default_reg_var(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputSection {
    pub dir: PathBuf,
}

/// Informational results of a finished run; ignored on input.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ResolvedSection {
    pub seed: u64,
    pub city: String,
    pub grid_size_m: f64,
    pub k: usize,
    pub dropped_columns: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputSection,
    pub grid: GridSection,
    #[serde(default)]
    pub features: FeaturesSection,
    #[serde(default)]
    pub cluster: ClusterSection,
    pub output: OutputSection,
    /// Present in persisted resolved configs; ignored when re-running.
    pub resolved: Option<ResolvedSection>,
}

impl RunConfig {
    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| validation(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| validation(format!("config invalid: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> AppResult<()> {
        if !self.input.osm.is_file() {
            return Err(validation(format!(
                "input.osm not found: {}",
                self.input.osm.display()
            )));
        }
        if !self.input.boundary.is_file() {
            return Err(validation(format!(
                "input.boundary not found: {}",
                self.input.boundary.display()
            )));
        }
        if let Some(catalog) = &self.features.catalog {
            if !catalog.is_file() {
                return Err(validation(format!(
                    "features.catalog not found: {}",
                    catalog.display()
                )));
            }
        }
        match (&self.grid.size_m, &self.grid.sizes) {
            (Some(s), None) if *s > 0.0 => {}
            (None, Some(sizes)) if sizes.len() >= 2 => {}
            (Some(_), Some(_)) => {
                return Err(validation(
                    "grid.size_m and grid.sizes are mutually exclusive",
                ))
            }
            _ => {
                return Err(validation(
                    "grid needs either a positive size_m or at least two sweep sizes",
                ))
            }
        }
        if self.cluster.k.is_none() && self.cluster.k_min > self.cluster.k_max {
            return Err(validation("cluster.k_min exceeds cluster.k_max"));
        }
        if self.cluster.covariance != "diagonal" && self.cluster.covariance != "full" {
            return Err(validation(format!(
                "cluster.covariance must be diagonal or full, got {:?}",
                self.cluster.covariance
            )));
        }
        Ok(())
    }

    pub fn gmm_config(&self, k: usize, seed: u64) -> AppResult<urbanform_core::gmm::GmmConfig> {
        let covariance = match self.cluster.covariance.as_str() {
            "diagonal" => urbanform_core::gmm::CovarianceKind::Diagonal,
            "full" => urbanform_core::gmm::CovarianceKind::Full,
            other => {
                return Err(AppError::Validation(format!(
                    "unknown covariance {other:?}"
                )))
            }
        };
        Ok(urbanform_core::gmm::GmmConfig {
            k,
            covariance,
            max_iter: self.cluster.max_iter,
            tol: self.cluster.tol,
            n_restarts: self.cluster.n_restarts,
            reg_var: self.cluster.reg_var,
            seed,
        })
    }
}

/// Entropy-based seed for configs that omit one; recorded in the resolved
/// config so the run stays replayable. Masked to 63 bits because TOML
/// integers are i64.
pub fn generate_seed() -> u64 {
    use std::hash::{Hash, Hasher};
    let mut hasher = std::collections::hash_map::DefaultHasher::new();
    std::time::SystemTime::now().hash(&mut hasher);
    std::process::id().hash(&mut hasher);
    hasher.finish() & (i64::MAX as u64)
}

/// Seeds persisted in TOML configs must fit an i64.
pub fn check_seed_range(seed: u64) -> AppResult<()> {
    if seed > i64::MAX as u64 {
        return Err(validation(format!(
            "seed {seed} exceeds the TOML integer range (max {})",
            i64::MAX
        )));
    }
    Ok(())
}
