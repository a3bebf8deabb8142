use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmm::config::{CovarianceKind, GmmConfig};

/// Component covariances: per-dimension variances (diagonal) or full
/// symmetric positive-definite matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum Covariances {
    /// K x d variances, row-major per component.
    Diagonal(Vec<f64>),
    /// K x d x d matrices, row-major per component.
    Full(Vec<f64>),
}

impl Covariances {
    pub fn kind(&self) -> CovarianceKind {
        match self {
            Covariances::Diagonal(_) => CovarianceKind::Diagonal,
            Covariances::Full(_) => CovarianceKind::Full,
        }
    }
}

/// A fitted Gaussian mixture: mixing weights, component means and
/// covariances, and the training log-likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmModel {
    pub weights: Vec<f64>,
    /// K x d, row-major per component.
    pub means: Vec<f64>,
    pub covariances: Covariances,
    pub train_log_likelihood: f64,
    pub dim: usize,
}

impl GmmModel {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn mean(&self, component: usize) -> &[f64] {
        &self.means[component * self.dim..(component + 1) * self.dim]
    }

    /// Parameter count used by BIC: (K-1) weights, K*d means, and either
    /// K*d (diagonal) or K*d(d+1)/2 (full) covariance parameters.
    pub fn parameter_count(&self) -> usize {
        let k = self.k();
        let d = self.dim;
        let cov_params = match self.covariances {
            Covariances::Diagonal(_) => k * d,
            Covariances::Full(_) => k * d * (d + 1) / 2,
        };
        (k - 1) + k * d + cov_params
    }
}

const MODEL_FORMAT: &str = "urbanform-gmm-model";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format: String,
    version: u32,
    config: GmmConfig,
    dim: usize,
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    covariance_kind: CovarianceKind,
    covariances: Vec<Vec<f64>>,
    train_log_likelihood: f64,
}

/// Writes the fitted model plus its config as a versioned JSON document.
pub fn write_model<W: Write>(model: &GmmModel, config: &GmmConfig, mut out: W) -> Result<()> {
    let k = model.k();
    let d = model.dim;
    let means: Vec<Vec<f64>> = (0..k).map(|i| model.mean(i).to_vec()).collect();
    let (covariance_kind, covariances) = match &model.covariances {
        Covariances::Diagonal(v) => (
            CovarianceKind::Diagonal,
            (0..k).map(|i| v[i * d..(i + 1) * d].to_vec()).collect(),
        ),
        Covariances::Full(v) => (
            CovarianceKind::Full,
            (0..k)
                .map(|i| v[i * d * d..(i + 1) * d * d].to_vec())
                .collect(),
        ),
    };
    let doc = ModelDoc {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        config: config.clone(),
        dim: d,
        weights: model.weights.clone(),
        means,
        covariance_kind,
        covariances,
        train_log_likelihood: model.train_log_likelihood,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Reads a model document written by [`write_model`].
pub fn read_model<R: Read>(mut input: R) -> Result<(GmmModel, GmmConfig)> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let doc: ModelDoc = serde_json::from_str(&text).map_err(|e| Error::ModelFile(e.to_string()))?;
    if doc.format != MODEL_FORMAT {
        return Err(Error::ModelFile(format!(
            "unexpected format {:?}",
            doc.format
        )));
    }
    if doc.version != MODEL_VERSION {
        return Err(Error::ModelFile(format!(
            "unsupported version {}",
            doc.version
        )));
    }
    let k = doc.weights.len();
    let d = doc.dim;
    if doc.means.len() != k || doc.means.iter().any(|m| m.len() != d) {
        return Err(Error::ModelFile("means shape mismatch".into()));
    }
    let per = match doc.covariance_kind {
        CovarianceKind::Diagonal => d,
        CovarianceKind::Full => d * d,
    };
    if doc.covariances.len() != k || doc.covariances.iter().any(|c| c.len() != per) {
        return Err(Error::ModelFile("covariance shape mismatch".into()));
    }
    let means = doc.means.concat();
    let covariances = match doc.covariance_kind {
        CovarianceKind::Diagonal => Covariances::Diagonal(doc.covariances.concat()),
        CovarianceKind::Full => Covariances::Full(doc.covariances.concat()),
    };
    Ok((
        GmmModel {
            weights: doc.weights,
            means,
            covariances,
            train_log_likelihood: doc.train_log_likelihood,
            dim: d,
        },
        doc.config,
    ))
}

/// Soft assignments: one row of posteriors per input row.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    values: Vec<f64>,
    n_rows: usize,
    k: usize,
}

impl Responsibilities {
    /// Validates shape, [0, 1] entries, and unit row sums (within 1e-10).
    pub fn new(values: Vec<f64>, n_rows: usize, k: usize) -> Result<Self> {
        if values.len() != n_rows * k {
            return Err(Error::RespShapeMismatch {
                rows: n_rows,
                k,
                expected_rows: values.len() / k.max(1),
            });
        }
        for (i, row) in values.chunks(k).enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-10 || row.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
                return Err(Error::InvalidResponsibilities { row: i, sum });
            }
        }
        Ok(Self { values, n_rows, k })
    }

    pub(crate) fn from_flat(values: Vec<f64>, n_rows: usize, k: usize) -> Self {
        debug_assert_eq!(values.len(), n_rows * k);
        Self { values, n_rows, k }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    pub fn get(&self, row: usize, component: usize) -> f64 {
        self.values[row * self.k + component]
    }
}
