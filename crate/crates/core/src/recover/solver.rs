//! Imputation by spectral ℓ¹ minimization:
//! `min ‖x̂‖₁ subject to ‖y - x‖_{L²(X)} ≤ η`.
//!
//! Solved by Douglas–Rachford splitting on the spectrum `z = x̂`. The sensing
//! operator (inverse DFT followed by restriction to X) is a partial isometry,
//! so the projection onto the constraint set is computed exactly in the time
//! domain: pull the observed entries radially onto the ball of radius η
//! around `y`, leave the others alone. Each iteration costs two FFTs.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::norms::{lp_norm, restricted_lp_norm};
use crate::scalar::Real;
use crate::signal::{IndexSet, Signal};
use crate::transform::DftPlan;

/// Error constant of the ℓ¹ recovery guarantee.
pub const RECOVERY_CONSTANT: f64 = 11.47;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Relative tolerance for both the splitting gap and the objective drift.
    pub tol: f64,
    pub max_iters: usize,
    /// Iterations over which the objective must stay within `tol`.
    pub window: usize,
    /// Soft-threshold level relative to the RMS of the observed samples.
    pub step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 50_000,
            window: 20,
            step: 1.0,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(invalid("tol", self.tol, "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", 0.0, "must be at least 1"));
        }
        if self.window == 0 {
            return Err(invalid("window", 0.0, "must be at least 1"));
        }
        if !(self.step > 0.0) || self.step.is_infinite() {
            return Err(invalid("step", self.step, "must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImputationResult<T = f64> {
    /// The minimizer on all of ℤ_N.
    pub x_star: Signal<T>,
    /// `‖x̂*‖₁`.
    pub objective: T,
    /// `‖y - x*‖_{L²(X)}`.
    pub constraint_residual: T,
    pub eta: T,
    pub iterations: usize,
    pub converged: bool,
    /// Final `‖z - x̂‖₂ / ‖x̂‖₂` between the two splitting iterates.
    pub splitting_gap: T,
    /// `11.47 η`: the recovery guarantee when `η = ε ‖f‖₂` in the
    /// theorem's sampling regime.
    pub certified_error_bound: T,
}

fn soft_threshold<T: Real>(z: Complex<T>, tau: T) -> Complex<T> {
    let r = z.norm();
    if r <= tau {
        Complex::new(T::zero(), T::zero())
    } else {
        z * ((r - tau) / r)
    }
}

/// Recovers a signal from its values on `mask`. Entries of `observed`
/// outside the mask are ignored.
pub fn impute<T: Real>(
    observed: &Signal<T>,
    mask: &IndexSet,
    eta: T,
    config: &SolverConfig,
) -> Result<ImputationResult<T>> {
    config.validate()?;
    mask.check_domain(observed.domain_size())?;
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    if eta.is_nan() || eta < T::zero() || eta.is_infinite() {
        return Err(invalid("eta", eta.as_f64(), "must be finite and >= 0"));
    }
    let n = observed.domain_size();
    let plan = DftPlan::new(n)?;
    let members = mask.members();
    let y: Vec<Complex<T>> = members.iter().map(|&i| observed.values()[i]).collect();
    let y_norm = lp_norm(&y, T::of(2.0))?;
    let tau = T::of(config.step) * y_norm / T::of_usize(members.len()).sqrt();
    let tol = T::of(config.tol);

    let project = |s: &[Complex<T>], out: &mut Vec<Complex<T>>| -> Result<()> {
        out.clear();
        out.extend_from_slice(s);
        plan.inverse_in_place(out)?;
        let r2: T = members
            .iter()
            .zip(&y)
            .map(|(&i, &yi)| (out[i] - yi).norm_sqr())
            .sum();
        let r = r2.sqrt();
        if r > eta {
            let shrink = if r > T::zero() { eta / r } else { T::zero() };
            for (&i, &yi) in members.iter().zip(&y) {
                out[i] = yi + (out[i] - yi) * shrink;
            }
        }
        plan.forward_in_place(out)
    };

    let mut zero_filled = vec![Complex::new(T::zero(), T::zero()); n];
    for (&i, &yi) in members.iter().zip(&y) {
        zero_filled[i] = yi;
    }
    let mut s = zero_filled;
    plan.forward_in_place(&mut s)?;
    let mut x = Vec::with_capacity(n);
    let mut history: Vec<T> = Vec::with_capacity(config.window + 1);
    let mut iterations = 0;
    let mut converged = false;
    let mut gap = T::infinity();

    // A zero observation vector with a zero radius pins x̂ = 0 immediately.
    if y_norm == T::zero() {
        project(&s, &mut x)?;
        converged = true;
        gap = T::zero();
    } else {
        while iterations < config.max_iters {
            iterations += 1;
            project(&s, &mut x)?;
            let mut diff2 = T::zero();
            let mut x2 = T::zero();
            for (si, &xi) in s.iter_mut().zip(&x) {
                let zi = soft_threshold(xi + xi - *si, tau);
                let d = zi - xi;
                diff2 = diff2 + d.norm_sqr();
                x2 = x2 + xi.norm_sqr();
                *si = *si + d;
            }
            gap = if x2 > T::zero() {
                (diff2 / x2).sqrt()
            } else {
                diff2.sqrt()
            };
            let objective = x.iter().map(|z| z.norm()).sum::<T>();
            history.push(objective);
            if history.len() > config.window {
                history.remove(0);
            }
            if gap <= tol && history.len() == config.window {
                let hi = history.iter().copied().fold(T::neg_infinity(), T::max);
                let lo = history.iter().copied().fold(T::infinity(), T::min);
                if hi - lo <= tol * hi.max(T::min_positive_value()) {
                    converged = true;
                    break;
                }
            }
        }
        project(&s, &mut x)?;
    }

    let objective = lp_norm(&x, T::one())?;
    plan.inverse_in_place(&mut x)?;
    let x_star = Signal::new(x)?;
    let constraint_residual = restricted_lp_norm(&x_star.sub(observed)?, mask, T::of(2.0))?;
    Ok(ImputationResult {
        x_star,
        objective,
        constraint_residual,
        eta,
        iterations,
        converged,
        splitting_gap: gap,
        certified_error_bound: T::of(RECOVERY_CONSTANT) * eta,
    })
}

/// Error bounds for a run at relative accuracy `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedBounds {
    /// Constraint radius from the sample alone: `ε ‖f_X‖₂ / √(|X|/N)`.
    pub eta_leakage_free: f64,
    /// `11.47 ε ‖f_X‖₂ / √(|X|/N)`.
    pub leakage_free: f64,
    /// `11.47 ε ‖f‖₂`, when the full-signal norm is known.
    pub oracle: Option<f64>,
}

pub fn certified_bounds<T: Real>(
    observed: &Signal<T>,
    mask: &IndexSet,
    eps: f64,
    reference_l2: Option<f64>,
) -> Result<CertifiedBounds> {
    if !(eps > 0.0) || eps.is_infinite() {
        return Err(invalid("eps", eps, "must be positive and finite"));
    }
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let sampled = restricted_lp_norm(observed, mask, T::of(2.0))?.as_f64();
    let fraction = mask.len() as f64 / mask.domain_size() as f64;
    let eta_leakage_free = eps * sampled / fraction.sqrt();
    Ok(CertifiedBounds {
        eta_leakage_free,
        leakage_free: RECOVERY_CONSTANT * eta_leakage_free,
        oracle: reference_l2.map(|l2| RECOVERY_CONSTANT * eps * l2),
    })
}
