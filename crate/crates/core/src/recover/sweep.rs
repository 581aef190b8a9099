//! Recovery experiments on spectrum-sparse signals: single trials and the
//! success rate as a function of the number of samples `q`.

use rayon::prelude::*;
use serde::Serialize;

use super::mask::sample_uniform;
use super::solver::{impute, SolverConfig, RECOVERY_CONSTANT};
use crate::error::{invalid, Result};
use crate::norms::lp_norm;
use crate::seed::{child_rng, child_seed};
use crate::signal::{IndexSet, Signal, Spectrum};
use crate::stats::median;
use crate::transform::idft;

/// `f = idft(1_S)` for a uniformly random `S` of size `sparsity`.
pub fn sparse_spectrum_signal(
    domain_size: usize,
    sparsity: usize,
    seed: u64,
) -> Result<Signal<f64>> {
    if sparsity == 0 || sparsity > domain_size {
        return Err(invalid("sparsity", sparsity as f64, "must lie in [1, N]"));
    }
    let mut rng = child_rng(seed, &[0]);
    let support = rand::seq::index::sample(&mut rng, domain_size, sparsity).into_vec();
    idft(&Spectrum::indicator(&IndexSet::new(domain_size, support)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveryTrial {
    /// `‖x* - f‖₂ / ‖f‖₂`.
    pub relative_error: f64,
    pub converged: bool,
    pub iterations: usize,
    pub distinct_samples: usize,
    /// `11.47 ε`, relative to `‖f‖₂`.
    pub relative_bound: f64,
}

/// Draws a `sparsity`-sparse spectrum signal, observes it on `q` uniform
/// samples and imputes with `η = ε ‖f‖₂`.
pub fn sparse_recovery_trial(
    domain_size: usize,
    sparsity: usize,
    q: usize,
    eps: f64,
    seed: u64,
    solver: &SolverConfig,
) -> Result<RecoveryTrial> {
    if !(eps >= 0.0) || eps.is_infinite() {
        return Err(invalid("eps", eps, "must be finite and >= 0"));
    }
    let f = sparse_spectrum_signal(domain_size, sparsity, seed)?;
    let mask = sample_uniform(domain_size, q, child_seed(seed, &[1]))?;
    let l2 = lp_norm(&f, 2.0)?;
    let result = impute(
        &f.restricted_to(&mask.indices)?,
        &mask.indices,
        eps * l2,
        solver,
    )?;
    Ok(RecoveryTrial {
        relative_error: lp_norm(&result.x_star.sub(&f)?, 2.0)? / l2,
        converged: result.converged,
        iterations: result.iterations,
        distinct_samples: mask.len(),
        relative_bound: RECOVERY_CONSTANT * eps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoverySweepConfig {
    pub domain_size: usize,
    pub sparsity: usize,
    pub q_values: Vec<usize>,
    pub trials: usize,
    /// Constraint radius relative to `‖f‖₂`; zero for exact observations.
    pub eps: f64,
    /// A trial succeeds when its relative error is at most this.
    pub success_tol: f64,
    pub seed: u64,
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryPoint {
    pub q: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub converged: usize,
    pub mean_distinct_samples: f64,
    pub median_relative_error: f64,
    /// Converged trials whose error exceeded `11.47 ε ‖f‖₂` (only counted
    /// when `ε > 0`).
    pub bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoverySweep {
    pub config: RecoverySweepConfig,
    /// `r²/ε² · ln(r/ε)² · ln N` with `r = √sparsity` and the unknown
    /// constant set to 1; absent when `ε = 0`.
    pub q_shape: Option<f64>,
    pub points: Vec<RecoveryPoint>,
}

pub fn recovery_sweep(config: &RecoverySweepConfig) -> Result<RecoverySweep> {
    if config.trials == 0 {
        return Err(invalid("trials", 0.0, "must be at least 1"));
    }
    let points = config
        .q_values
        .iter()
        .map(|&q| {
            let trials: Vec<RecoveryTrial> = (0..config.trials as u64)
                .into_par_iter()
                .map(|t| {
                    sparse_recovery_trial(
                        config.domain_size,
                        config.sparsity,
                        q,
                        config.eps,
                        child_seed(config.seed, &[q as u64, t]),
                        &config.solver,
                    )
                })
                .collect::<Result<_>>()?;
            let errors: Vec<f64> = trials.iter().map(|t| t.relative_error).collect();
            let successes = errors.iter().filter(|&&e| e <= config.success_tol).count();
            Ok(RecoveryPoint {
                q,
                trials: config.trials,
                successes,
                success_rate: successes as f64 / config.trials as f64,
                converged: trials.iter().filter(|t| t.converged).count(),
                mean_distinct_samples: trials
                    .iter()
                    .map(|t| t.distinct_samples as f64)
                    .sum::<f64>()
                    / config.trials as f64,
                median_relative_error: median(&errors).unwrap_or(f64::NAN),
                bound_violations: if config.eps > 0.0 {
                    trials
                        .iter()
                        .filter(|t| t.converged && t.relative_error > t.relative_bound)
                        .count()
                } else {
                    0
                },
            })
        })
        .collect::<Result<_>>()?;
    let q_shape = (config.eps > 0.0).then(|| {
        let r = (config.sparsity as f64).sqrt();
        let ratio = r / config.eps;
        ratio * ratio * ratio.ln().powi(2) * (config.domain_size as f64).ln()
    });
    Ok(RecoverySweep {
        config: config.clone(),
        q_shape,
        points,
    })
}
