//! Estimates of `FR(f)` and `‖f‖₂` from a Bernoulli restriction `f_X`.

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::mask::sample_bernoulli;
use crate::error::{invalid, Error, Result};
use crate::fr::{coherence, l1_l2_ratio};
use crate::norms::lp_norm;
use crate::scalar::Real;
use crate::seed::{child_seed, rng_from_seed};
use crate::signal::Signal;
use crate::stats::binomial_slack;
use crate::transform::DftPlan;

/// `e^{iθ(x)}` with independent uniform phases: `|f| ≡ 1`, so the coherence
/// is exactly 1.
pub fn unimodular_signal(domain_size: usize, seed: u64) -> Result<Signal<f64>> {
    let mut rng = rng_from_seed(seed);
    Signal::from_fn(domain_size, |_| {
        Complex::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestrictedEstimate<T = f64> {
    /// `FR(f_X)`.
    pub fr_raw: T,
    /// `FR(f_X) / √p`.
    pub fr_estimate: T,
    /// `‖f̂_X‖₁ / p`.
    pub l1_estimate: T,
    /// `‖f_X‖₂ / √p`.
    pub l2_estimate: T,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p", p, "must lie in (0, 1]"));
    }
    Ok(())
}

/// Estimates from `f_X` (zero off the sample) kept at rate `p`.
pub fn restricted_fr<T: Real>(f_x: &Signal<T>, p: T) -> Result<RestrictedEstimate<T>> {
    restricted_fr_with(&DftPlan::new(f_x.domain_size())?, f_x, p)
}

pub fn restricted_fr_with<T: Real>(
    plan: &DftPlan<T>,
    f_x: &Signal<T>,
    p: T,
) -> Result<RestrictedEstimate<T>> {
    check_p(p.as_f64())?;
    let spectrum = plan.dft(f_x)?;
    let fr_raw = l1_l2_ratio(&spectrum)?;
    let root_p = p.sqrt();
    Ok(RestrictedEstimate {
        fr_raw,
        fr_estimate: fr_raw / root_p,
        l1_estimate: lp_norm(&spectrum, T::one())? / p,
        l2_estimate: lp_norm(f_x, T::of(2.0))? / root_p,
    })
}

/// Monte-Carlo check of the restriction estimates at accuracy `eps` and
/// confidence parameter `u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictionCoverage {
    pub domain_size: usize,
    pub p: f64,
    pub eps: f64,
    pub u: f64,
    pub trials: usize,
    pub seed: u64,
    pub fr: f64,
    pub l2: f64,
    pub coherence: f64,
    /// Trials with `|FR(f_X) - FR(f)| > 3 ε FR(f)`.
    pub fr_failures: usize,
    /// Trials with `|‖f_X‖₂/√p - ‖f‖₂| > ε ‖f‖₂`.
    pub l2_failures: usize,
    /// Trials where the sample came out empty (counted as failures).
    pub empty_samples: usize,
    pub fr_failure_rate: f64,
    pub l2_failure_rate: f64,
    /// `2 e^{-u}`.
    pub allowed_rate: f64,
    /// `2 e^{-u}` plus three binomial standard errors.
    pub allowed_with_slack: f64,
    /// `μ(f) (ln N + u) / (ε² N)`: the sampling-rate condition for the FR
    /// estimate with the unknown constant set to 1.
    pub p_shape_fr: f64,
    /// `μ(f) u / (ε² N)`: the same for the ℓ² estimate.
    pub p_shape_l2: f64,
    pub fr_raw_median: f64,
    pub fr_estimate_median: f64,
}

impl RestrictionCoverage {
    pub fn fr_within_allowance(&self) -> bool {
        self.fr_failure_rate <= self.allowed_with_slack
    }

    pub fn l2_within_allowance(&self) -> bool {
        self.l2_failure_rate <= self.allowed_with_slack
    }
}

pub fn restriction_coverage<T: Real>(
    f: &Signal<T>,
    p: f64,
    eps: f64,
    u: f64,
    trials: usize,
    seed: u64,
) -> Result<RestrictionCoverage> {
    check_p(p)?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(invalid("eps", eps, "must lie in (0, 1/2)"));
    }
    if !(u >= 1.0) || u.is_infinite() {
        return Err(invalid("u", u, "must be finite and >= 1"));
    }
    if trials == 0 {
        return Err(invalid("trials", 0.0, "must be at least 1"));
    }
    let n = f.domain_size();
    let plan = DftPlan::new(n)?;
    let fr = l1_l2_ratio(&plan.dft(f)?)?.as_f64();
    let l2 = lp_norm(f, T::of(2.0))?.as_f64();
    let mu = coherence(f)?.as_f64();

    let outcomes: Vec<Option<RestrictedEstimate<f64>>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mask = sample_bernoulli(n, p, child_seed(seed, &[t]))?;
            match restricted_fr_with(&plan, &f.restricted_to(&mask.indices)?, T::of(p)) {
                Ok(e) => Ok(Some(RestrictedEstimate {
                    fr_raw: e.fr_raw.as_f64(),
                    fr_estimate: e.fr_estimate.as_f64(),
                    l1_estimate: e.l1_estimate.as_f64(),
                    l2_estimate: e.l2_estimate.as_f64(),
                })),
                Err(Error::ZeroSignal) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let estimates: Vec<&RestrictedEstimate<f64>> = outcomes.iter().flatten().collect();
    let empty_samples = trials - estimates.len();
    let fr_failures = empty_samples
        + estimates
            .iter()
            .filter(|e| (e.fr_raw - fr).abs() > 3.0 * eps * fr)
            .count();
    let l2_failures = empty_samples
        + estimates
            .iter()
            .filter(|e| (e.l2_estimate - l2).abs() > eps * l2)
            .count();
    let allowed_rate = (2.0 * (-u).exp()).min(1.0);
    let median_of = |g: fn(&RestrictedEstimate<f64>) -> f64| {
        let xs: Vec<f64> = estimates.iter().map(|e| g(e)).collect();
        crate::stats::median(&xs).unwrap_or(f64::NAN)
    };
    let nf = n as f64;
    Ok(RestrictionCoverage {
        domain_size: n,
        p,
        eps,
        u,
        trials,
        seed,
        fr,
        l2,
        coherence: mu,
        fr_failures,
        l2_failures,
        empty_samples,
        fr_failure_rate: fr_failures as f64 / trials as f64,
        l2_failure_rate: l2_failures as f64 / trials as f64,
        allowed_rate,
        allowed_with_slack: allowed_rate + binomial_slack(allowed_rate, trials),
        p_shape_fr: mu * (nf.ln() + u) / (eps * eps * nf),
        p_shape_l2: mu * u / (eps * eps * nf),
        fr_raw_median: median_of(|e| e.fr_raw),
        fr_estimate_median: median_of(|e| e.fr_estimate),
    })
}
