//! Expectation-Maximization fitting with deterministic seeded restarts.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::gmm::config::{CovarianceKind, GmmConfig};
use crate::gmm::density::{prepare, Prepared};
use crate::gmm::init::{kmeanspp_means, rng_for};
use crate::gmm::model::{Covariances, GmmModel, Responsibilities};

/// Effective weight below which a component counts as collapsed.
const COLLAPSE_EPS: f64 = 1e-10;

fn check_dims(model: &GmmModel, matrix: &FeatureMatrix) -> Result<()> {
    if model.dim != matrix.n_cols() {
        return Err(Error::DimensionMismatch {
            model: model.dim,
            matrix: matrix.n_cols(),
        });
    }
    Ok(())
}

/// Posterior responsibilities and total log-likelihood in one density pass.
/// Log-space with max-subtraction, so extreme densities stay finite.
fn posteriors(
    model: &GmmModel,
    prep: &Prepared,
    data: &[f64],
    n: usize,
    d: usize,
) -> Result<(Vec<f64>, f64)> {
    let k = model.k();
    let mut resp = vec![0.0; n * k];
    let mut total_ll = 0.0;
    let log_weights: Vec<f64> = model.weights.iter().map(|w| w.ln()).collect();
    let mut log_joint = vec![0.0; k];
    for i in 0..n {
        let x = &data[i * d..(i + 1) * d];
        let mut max = f64::NEG_INFINITY;
        for c in 0..k {
            let lj = log_weights[c] + prep.log_density(model, c, x);
            log_joint[c] = lj;
            if lj > max {
                max = lj;
            }
        }
        if !max.is_finite() {
            return Err(Error::NonFiniteDensity { row: i });
        }
        let mut sum = 0.0;
        for c in 0..k {
            let e = (log_joint[c] - max).exp();
            resp[i * k + c] = e;
            sum += e;
        }
        let row_ll = max + sum.ln();
        if !row_ll.is_finite() {
            return Err(Error::NonFiniteDensity { row: i });
        }
        for c in 0..k {
            resp[i * k + c] /= sum;
        }
        total_ll += row_ll;
    }
    Ok((resp, total_ll))
}

/// E-step: posterior responsibilities r_nk for every row and component.
pub fn e_step(model: &GmmModel, matrix: &FeatureMatrix) -> Result<Responsibilities> {
    check_dims(model, matrix)?;
    let prep = prepare(model)?;
    let n = matrix.n_rows();
    let (resp, _) = posteriors(model, &prep, &matrix.values, n, matrix.n_cols())?;
    Ok(Responsibilities::from_flat(resp, n, model.k()))
}

/// Total log-likelihood of the data under the model, log-sum-exp stabilized.
pub fn log_likelihood(model: &GmmModel, matrix: &FeatureMatrix) -> Result<f64> {
    check_dims(model, matrix)?;
    let prep = prepare(model)?;
    let (_, ll) = posteriors(
        model,
        &prep,
        &matrix.values,
        matrix.n_rows(),
        matrix.n_cols(),
    )?;
    Ok(ll)
}

/// M-step: weighted parameter updates from responsibilities.
///
/// Signals a component collapse when an effective count N_k drops below
/// 1e-10; `fit` handles that by abandoning and re-seeding the restart.
pub fn m_step(
    matrix: &FeatureMatrix,
    resp: &Responsibilities,
    config: &GmmConfig,
) -> Result<(Vec<f64>, Vec<f64>, Covariances)> {
    let n = matrix.n_rows();
    let d = matrix.n_cols();
    let k = resp.k();
    if resp.n_rows() != n {
        return Err(Error::RespShapeMismatch {
            rows: resp.n_rows(),
            k,
            expected_rows: n,
        });
    }

    let mut nk = vec![0.0; k];
    for i in 0..n {
        for (c, &r) in resp.row(i).iter().enumerate() {
            nk[c] += r;
        }
    }
    for (c, &count) in nk.iter().enumerate() {
        if count < COLLAPSE_EPS {
            return Err(Error::ComponentCollapse { component: c });
        }
    }

    let weights: Vec<f64> = nk.iter().map(|&c| c / n as f64).collect();

    let mut means = vec![0.0; k * d];
    for i in 0..n {
        let x = matrix.row(i);
        let r = resp.row(i);
        for c in 0..k {
            for j in 0..d {
                means[c * d + j] += r[c] * x[j];
            }
        }
    }
    for c in 0..k {
        for j in 0..d {
            means[c * d + j] /= nk[c];
        }
    }

    let covariances = match config.covariance {
        CovarianceKind::Diagonal => {
            let mut vars = vec![0.0; k * d];
            for i in 0..n {
                let x = matrix.row(i);
                let r = resp.row(i);
                for c in 0..k {
                    for j in 0..d {
                        let diff = x[j] - means[c * d + j];
                        vars[c * d + j] += r[c] * diff * diff;
                    }
                }
            }
            for c in 0..k {
                for j in 0..d {
                    vars[c * d + j] = vars[c * d + j] / nk[c] + config.reg_var;
                }
            }
            Covariances::Diagonal(vars)
        }
        CovarianceKind::Full => {
            let mut mats = vec![0.0; k * d * d];
            let mut diff = vec![0.0; d];
            for i in 0..n {
                let x = matrix.row(i);
                let r = resp.row(i);
                for c in 0..k {
                    for j in 0..d {
                        diff[j] = x[j] - means[c * d + j];
                    }
                    let m = &mut mats[c * d * d..(c + 1) * d * d];
                    for a in 0..d {
                        let ra = r[c] * diff[a];
                        for b in 0..d {
                            m[a * d + b] += ra * diff[b];
                        }
                    }
                }
            }
            for c in 0..k {
                let m = &mut mats[c * d * d..(c + 1) * d * d];
                for a in 0..d {
                    for b in 0..d {
                        m[a * d + b] /= nk[c];
                    }
                    m[a * d + a] += config.reg_var;
                }
            }
            Covariances::Full(mats)
        }
    };
    Ok((weights, means, covariances))
}

/// Hard labels: argmax responsibility per row, ties to the smaller index.
pub fn assign(model: &GmmModel, matrix: &FeatureMatrix) -> Result<Vec<usize>> {
    let resp = e_step(model, matrix)?;
    Ok((0..resp.n_rows())
        .map(|i| {
            let row = resp.row(i);
            let mut best = 0;
            for (c, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect())
}

/// Bayesian Information Criterion: k ln(N) - 2 ln(L).
pub fn bic(model: &GmmModel, matrix: &FeatureMatrix) -> Result<f64> {
    let ll = log_likelihood(model, matrix)?;
    let params = model.parameter_count() as f64;
    Ok(params * (matrix.n_rows() as f64).ln() - 2.0 * ll)
}

/// Per-restart fitting record.
#[derive(Debug, Clone)]
pub struct RestartTrace {
    pub restart: usize,
    pub attempts: usize,
    /// Log-likelihood after each iteration; non-decreasing within a run.
    pub log_likelihoods: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct FitTrace {
    pub restarts: Vec<RestartTrace>,
    pub winner: usize,
}

impl FitTrace {
    pub fn converged_restarts(&self) -> usize {
        self.restarts.iter().filter(|r| r.converged).count()
    }
}

struct EmRun {
    model: GmmModel,
    lls: Vec<f64>,
    converged: bool,
    attempts: usize,
}

fn initial_model(
    matrix: &FeatureMatrix,
    config: &GmmConfig,
    restart: usize,
    attempt: usize,
) -> GmmModel {
    let n = matrix.n_rows();
    let d = matrix.n_cols();
    let k = config.k;
    let mut rng = rng_for(config.seed, restart as u64, attempt as u64);
    let means = kmeanspp_means(&matrix.values, n, d, k, &mut rng);

    // Per-column population variance plus the floor seeds the covariances.
    let mut col_var = vec![0.0; d];
    for (j, out) in col_var.iter_mut().enumerate() {
        let mut mean = 0.0;
        for i in 0..n {
            mean += matrix.get(i, j);
        }
        mean /= n as f64;
        let mut var = 0.0;
        for i in 0..n {
            let diff = matrix.get(i, j) - mean;
            var += diff * diff;
        }
        *out = var / n as f64 + config.reg_var;
    }
    let covariances = match config.covariance {
        CovarianceKind::Diagonal => {
            let mut vars = vec![0.0; k * d];
            for c in 0..k {
                vars[c * d..(c + 1) * d].copy_from_slice(&col_var);
            }
            Covariances::Diagonal(vars)
        }
        CovarianceKind::Full => {
            let mut mats = vec![0.0; k * d * d];
            for c in 0..k {
                for j in 0..d {
                    mats[c * d * d + j * d + j] = col_var[j];
                }
            }
            Covariances::Full(mats)
        }
    };
    GmmModel {
        weights: vec![1.0 / k as f64; k],
        means,
        covariances,
        train_log_likelihood: f64::NEG_INFINITY,
        dim: d,
    }
}

/// Relative improvement with a unit floor so values near zero stay stable.
fn rel_improvement(prev: f64, current: f64) -> f64 {
    (current - prev) / (1.0 + prev.abs())
}

fn run_em_once(
    matrix: &FeatureMatrix,
    config: &GmmConfig,
    restart: usize,
    attempt: usize,
) -> Result<(GmmModel, Vec<f64>, bool)> {
    let n = matrix.n_rows();
    let d = matrix.n_cols();
    let mut model = initial_model(matrix, config, restart, attempt);
    let mut lls = Vec::new();
    let mut prev_ll = f64::NEG_INFINITY;
    let mut converged = false;

    for _ in 0..config.max_iter {
        let prep = prepare(&model)?;
        let (resp_flat, ll) = posteriors(&model, &prep, &matrix.values, n, d)?;
        lls.push(ll);
        if prev_ll.is_finite() && rel_improvement(prev_ll, ll) < config.tol {
            converged = true;
            break;
        }
        prev_ll = ll;
        let resp = Responsibilities::from_flat(resp_flat, n, config.k);
        let (weights, means, covariances) = m_step(matrix, &resp, config)?;
        model.weights = weights;
        model.means = means;
        model.covariances = covariances;
    }
    if !converged {
        // Record the likelihood of the final parameters (post last M-step).
        let ll = log_likelihood(&model, matrix)?;
        lls.push(ll);
    }
    model.train_log_likelihood = *lls.last().expect("at least one iteration");
    Ok((model, lls, converged))
}

fn run_restart(matrix: &FeatureMatrix, config: &GmmConfig, restart: usize) -> Result<EmRun> {
    let max_attempts = config.n_restarts + 1;
    for attempt in 0..max_attempts {
        match run_em_once(matrix, config, restart, attempt) {
            Ok((model, lls, converged)) => {
                return Ok(EmRun {
                    model,
                    lls,
                    converged,
                    attempts: attempt + 1,
                })
            }
            Err(Error::ComponentCollapse { .. }) | Err(Error::NotPositiveDefinite { .. }) => {
                log::debug!("restart {restart} attempt {attempt} collapsed; re-seeding");
            }
            Err(other) => return Err(other),
        }
    }
    Err(Error::RestartExhausted {
        restart,
        attempts: max_attempts,
    })
}

/// Fits a GMM with `n_restarts` independent seeded EM runs and returns the
/// run with the highest final log-likelihood (ties to the lower restart
/// index), together with the per-restart trace.
///
/// Restarts may execute on any number of threads; each owns its RNG stream
/// and the winner is chosen by a fixed total order, so the result is
/// bit-identical for a given (matrix, config).
pub fn fit_traced(matrix: &FeatureMatrix, config: &GmmConfig) -> Result<(GmmModel, FitTrace)> {
    config.validate()?;
    let n = matrix.n_rows();
    if n < config.k {
        return Err(Error::TooFewRows {
            k: config.k,
            rows: n,
        });
    }
    let runs: Vec<Result<EmRun>> = (0..config.n_restarts)
        .into_par_iter()
        .map(|restart| run_restart(matrix, config, restart))
        .collect();

    let mut winner: Option<(usize, EmRun)> = None;
    let mut traces = Vec::with_capacity(runs.len());
    for (restart, run) in runs.into_iter().enumerate() {
        let run = run?;
        traces.push(RestartTrace {
            restart,
            attempts: run.attempts,
            log_likelihoods: run.lls.clone(),
            converged: run.converged,
        });
        let better = match &winner {
            None => true,
            Some((_, best)) => run.model.train_log_likelihood > best.model.train_log_likelihood,
        };
        if better {
            winner = Some((restart, run));
        }
    }
    let (winner_idx, best) = winner.expect("n_restarts >= 1");
    Ok((
        best.model,
        FitTrace {
            restarts: traces,
            winner: winner_idx,
        },
    ))
}

/// Fits a GMM; see [`fit_traced`].
pub fn fit(matrix: &FeatureMatrix, config: &GmmConfig) -> Result<GmmModel> {
    fit_traced(matrix, config).map(|(model, _)| model)
}
