use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceKind {
    Diagonal,
    Full,
}

/// EM fitting configuration.
///
/// Defaults: diagonal covariance, 500 iterations, relative log-likelihood
/// tolerance 1e-7, 10 restarts, variance floor 1e-6 (standardized units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmConfig {
    pub k: usize,
    pub covariance: CovarianceKind,
    pub max_iter: usize,
    pub tol: f64,
    pub n_restarts: usize,
    pub reg_var: f64,
    pub seed: u64,
}

impl GmmConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            covariance: CovarianceKind::Diagonal,
            max_iter: 500,
            tol: 1e-7,
            n_restarts: 10,
            reg_var: 1e-6,
            seed,
        }
    }

    pub fn with_k(&self, k: usize) -> Self {
        Self { k, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("K must be >= 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.n_restarts == 0 {
            return Err(Error::InvalidConfig("n_restarts must be >= 1".into()));
        }
        if !(self.reg_var > 0.0 && self.reg_var.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "reg_var must be positive, got {}",
                self.reg_var
            )));
        }
        Ok(())
    }
}
