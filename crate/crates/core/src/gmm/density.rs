//! Log-space Gaussian densities for diagonal and full covariances.

use crate::error::{Error, Result};
use crate::gmm::model::{Covariances, GmmModel};

const LN_2PI: f64 = 1.8378770664093453;

/// Per-component quantities precomputed once per pass over the data.
pub(crate) enum Prepared {
    Diagonal {
        /// K x d inverse variances.
        inv_var: Vec<f64>,
        /// -0.5 * (d ln 2pi + sum_j ln var_kj) per component.
        log_norm: Vec<f64>,
        dim: usize,
    },
    Full {
        /// K x d x d lower Cholesky factors.
        chol: Vec<f64>,
        log_norm: Vec<f64>,
        dim: usize,
    },
}

/// Lower Cholesky factor of a row-major symmetric matrix.
/// Fails when the matrix is not positive-definite.
pub(crate) fn cholesky(a: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = a[i * d + j];
            for t in 0..j {
                sum -= l[i * d + t] * l[j * d + t];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i * d + i] = sum.sqrt();
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    Some(l)
}

pub(crate) fn prepare(model: &GmmModel) -> Result<Prepared> {
    let k = model.k();
    let d = model.dim;
    match &model.covariances {
        Covariances::Diagonal(vars) => {
            let mut inv_var = vec![0.0; k * d];
            let mut log_norm = vec![0.0; k];
            for c in 0..k {
                let mut log_det = 0.0;
                for j in 0..d {
                    let v = vars[c * d + j];
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(Error::NotPositiveDefinite { component: c });
                    }
                    inv_var[c * d + j] = 1.0 / v;
                    log_det += v.ln();
                }
                log_norm[c] = -0.5 * (d as f64 * LN_2PI + log_det);
            }
            Ok(Prepared::Diagonal {
                inv_var,
                log_norm,
                dim: d,
            })
        }
        Covariances::Full(mats) => {
            let mut chol = vec![0.0; k * d * d];
            let mut log_norm = vec![0.0; k];
            for c in 0..k {
                let l = cholesky(&mats[c * d * d..(c + 1) * d * d], d)
                    .ok_or(Error::NotPositiveDefinite { component: c })?;
                let log_det: f64 = (0..d).map(|i| l[i * d + i].ln()).sum::<f64>() * 2.0;
                log_norm[c] = -0.5 * (d as f64 * LN_2PI + log_det);
                chol[c * d * d..(c + 1) * d * d].copy_from_slice(&l);
            }
            Ok(Prepared::Full {
                chol,
                log_norm,
                dim: d,
            })
        }
    }
}

impl Prepared {
    /// log N(x | mu_c, Sigma_c) for one row and one component.
    pub(crate) fn log_density(&self, model: &GmmModel, component: usize, x: &[f64]) -> f64 {
        let mu = model.mean(component);
        match self {
            Prepared::Diagonal {
                inv_var,
                log_norm,
                dim,
            } => {
                let d = *dim;
                let mut maha = 0.0;
                for j in 0..d {
                    let diff = x[j] - mu[j];
                    maha += diff * diff * inv_var[component * d + j];
                }
                log_norm[component] - 0.5 * maha
            }
            Prepared::Full {
                chol,
                log_norm,
                dim,
            } => {
                let d = *dim;
                let l = &chol[component * d * d..(component + 1) * d * d];
                // Forward-solve L z = (x - mu); maha = |z|^2.
                let mut z = vec![0.0; d];
                for i in 0..d {
                    let mut sum = x[i] - mu[i];
                    for t in 0..i {
                        sum -= l[i * d + t] * z[t];
                    }
                    z[i] = sum / l[i * d + i];
                }
                let maha: f64 = z.iter().map(|v| v * v).sum();
                log_norm[component] - 0.5 * maha
            }
        }
    }
}
