//! Gaussian mixture fitting by EM, with BIC and hard/soft assignments.

pub mod config;
mod density;
pub mod em;
pub mod init;
pub mod model;

pub use config::{CovarianceKind, GmmConfig};
pub use em::{
    assign, bic, e_step, fit, fit_traced, log_likelihood, m_step, FitTrace, RestartTrace,
};
pub use model::{read_model, write_model, Covariances, GmmModel, Responsibilities};
