//! Stability of the Fourier ratio under perturbation, circular complex
//! Gaussian noise, and averaging of noisy copies.
//!
//! Noise convention: each entry is `CN(0, σ²)`, i.e. independent `N(0, σ²/2)`
//! real and imaginary parts. The DFT of such noise has the same law.

use num_complex::Complex;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fr::l1_l2_ratio;
use crate::norms::lp_norm;
use crate::scalar::Real;
use crate::seed::{child_seed, rng_from_seed};
use crate::signal::Signal;
use crate::stats::{binomial_slack, mean, median, percentile, standard_error};
use crate::transform::DftPlan;

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma >= 0.0) || sigma.is_infinite() {
        return Err(invalid("sigma", sigma, "must be finite and >= 0"));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid("gamma", gamma, "must lie in (0, 1)"));
    }
    Ok(())
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(invalid("trials", 0.0, "must be at least 1"));
    }
    Ok(())
}

/// `N` independent `CN(0, σ²)` entries.
pub fn complex_gaussian<T: Real>(domain_size: usize, sigma: f64, seed: u64) -> Result<Signal<T>> {
    check_sigma(sigma)?;
    let normal = Normal::new(0.0, sigma / std::f64::consts::SQRT_2)
        .map_err(|_| invalid("sigma", sigma, "must be finite and >= 0"))?;
    let mut rng = rng_from_seed(seed);
    Signal::from_fn(domain_size, |_| {
        Complex::new(
            T::of(normal.sample(&mut rng)),
            T::of(normal.sample(&mut rng)),
        )
    })
}

/// `f + n` with `n` circular complex Gaussian of variance `σ²`.
pub fn add_complex_gaussian<T: Real>(f: &Signal<T>, sigma: f64, seed: u64) -> Result<Signal<T>> {
    f.add(&complex_gaussian(f.domain_size(), sigma, seed)?)
}

/// Entrywise mean of equally sized signals.
pub fn average_signals<T: Real>(copies: &[Signal<T>]) -> Result<Signal<T>> {
    let first = copies
        .first()
        .ok_or(Error::Degenerate("need at least one copy to average"))?;
    let mut acc = first.values().to_vec();
    for copy in &copies[1..] {
        if copy.domain_size() != acc.len() {
            return Err(Error::LengthMismatch {
                expected: acc.len(),
                found: copy.domain_size(),
            });
        }
        for (a, &b) in acc.iter_mut().zip(copy.values()) {
            *a = *a + b;
        }
    }
    let scale = T::one() / T::of_usize(copies.len());
    Signal::new(acc.into_iter().map(|z| z * scale).collect())
}

/// `σ (√N + √ln(1/γ))`: with probability at least `1 - γ` the ℓ² norm of
/// `CN(0, σ²)` noise on ℤ_N stays below this.
pub fn gaussian_radius(domain_size: usize, sigma: f64, gamma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_gamma(gamma)?;
    Ok(sigma * ((domain_size as f64).sqrt() + (1.0 / gamma).ln().sqrt()))
}

/// The chi-square refinement `σ (√N + √ln(1/γ) + ln(1/γ) / (2√N))`.
pub fn gaussian_radius_refined(domain_size: usize, sigma: f64, gamma: f64) -> Result<f64> {
    let base = gaussian_radius(domain_size, sigma, gamma)?;
    Ok(base + sigma * (1.0 / gamma).ln() / (2.0 * (domain_size as f64).sqrt()))
}

/// Both sides of `|FR(f+n) - FR(f)| ≤ (‖n̂‖₁ + FR(f) ‖n̂‖₂) / (‖f̂‖₂ - ‖n̂‖₂)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub fr_f: f64,
    /// Absent for the zero perturbation.
    pub fr_n: Option<f64>,
    pub fr_sum: f64,
    /// `‖f̂‖₁`.
    pub a: f64,
    /// `‖n̂‖₁`.
    pub b: f64,
    /// `‖f̂‖₂`.
    pub s: f64,
    /// `‖n̂‖₂`.
    pub t: f64,
    /// Infinite when `t ≥ s`.
    pub deterministic_bound: f64,
    pub observed_deviation: f64,
    pub bound_applicable: bool,
    pub holds: bool,
}

pub fn perturbation_bound<T: Real>(f: &Signal<T>, n: &Signal<T>) -> Result<PerturbationReport> {
    perturbation_bound_with(&DftPlan::new(f.domain_size())?, f, n)
}

pub fn perturbation_bound_with<T: Real>(
    plan: &DftPlan<T>,
    f: &Signal<T>,
    n: &Signal<T>,
) -> Result<PerturbationReport> {
    let f_hat = plan.dft(f)?;
    let n_hat = plan.dft(n)?;
    let fr_f = l1_l2_ratio(&f_hat)?.as_f64();
    let sum_hat = f_hat.add(&n_hat)?;
    let fr_sum = l1_l2_ratio(&sum_hat)?.as_f64();
    let a = lp_norm(&f_hat, T::one())?.as_f64();
    let s = lp_norm(&f_hat, T::of(2.0))?.as_f64();
    let b = lp_norm(&n_hat, T::one())?.as_f64();
    let t = lp_norm(&n_hat, T::of(2.0))?.as_f64();
    let fr_n = (t > 0.0).then(|| b / t);
    let bound_applicable = t < s;
    let deterministic_bound = if bound_applicable {
        (b + fr_f * t) / (s - t)
    } else {
        f64::INFINITY
    };
    let observed_deviation = (fr_sum - fr_f).abs();
    let slack = T::check_tol().as_f64() * (1.0 + deterministic_bound.min(fr_f));
    Ok(PerturbationReport {
        fr_f,
        fr_n,
        fr_sum,
        a,
        b,
        s,
        t,
        deterministic_bound,
        observed_deviation,
        bound_applicable,
        holds: !bound_applicable || observed_deviation <= deterministic_bound + slack,
    })
}

/// Coverage of the high-probability bound for `FR(f + n)` with Gaussian `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianDeviationReport {
    pub domain_size: usize,
    pub sigma: f64,
    pub gamma: f64,
    pub trials: usize,
    pub seed: u64,
    pub fr_f: f64,
    /// `‖f̂‖₂`.
    pub signal_l2: f64,
    /// `σ (√N + √ln(1/γ))`.
    pub t_gamma: f64,
    /// `‖f̂‖₂ > t_γ`; outside this regime the bound is not evaluated.
    pub regime_ok: bool,
    /// Trials with `|FR(f+n) - FR(f)| > (FR(n) + FR(f)) t_γ / (‖f̂‖₂ - t_γ)`.
    pub violations: usize,
    pub violation_rate: f64,
    /// Trials with `‖n̂‖₂ > t_γ`.
    pub radius_exceedances: usize,
    pub radius_exceedance_rate: f64,
    /// `γ` plus three binomial standard errors.
    pub allowed_rate: f64,
    pub median_deviation: f64,
    pub p90_deviation: f64,
}

pub fn gaussian_deviation_experiment<T: Real>(
    f: &Signal<T>,
    sigma: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<GaussianDeviationReport> {
    check_trials(trials)?;
    let n = f.domain_size();
    let t_gamma = gaussian_radius(n, sigma, gamma)?;
    let plan = DftPlan::new(n)?;
    let f_hat = plan.dft(f)?;
    let fr_f = l1_l2_ratio(&f_hat)?.as_f64();
    let signal_l2 = lp_norm(&f_hat, T::of(2.0))?.as_f64();
    let regime_ok = signal_l2 > t_gamma;

    let outcomes: Vec<(f64, f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let noise = complex_gaussian::<T>(n, sigma, child_seed(seed, &[k]))?;
            let r = perturbation_bound_with(&plan, f, &noise)?;
            Ok((r.observed_deviation, r.fr_n.unwrap_or(0.0), r.t))
        })
        .collect::<Result<_>>()?;

    let violations = if regime_ok {
        outcomes
            .iter()
            .filter(|(dev, fr_n, _)| {
                let bound = (fr_n + fr_f) * t_gamma / (signal_l2 - t_gamma);
                *dev > bound * (1.0 + 1e-9) + 1e-12
            })
            .count()
    } else {
        0
    };
    let radius_exceedances = outcomes.iter().filter(|o| o.2 > t_gamma).count();
    let deviations: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    Ok(GaussianDeviationReport {
        domain_size: n,
        sigma,
        gamma,
        trials,
        seed,
        fr_f,
        signal_l2,
        t_gamma,
        regime_ok,
        violations,
        violation_rate: violations as f64 / trials as f64,
        radius_exceedances,
        radius_exceedance_rate: radius_exceedances as f64 / trials as f64,
        allowed_rate: gamma + binomial_slack(gamma, trials),
        median_deviation: median(&deviations).unwrap_or(f64::NAN),
        p90_deviation: percentile(&deviations, 90.0).unwrap_or(f64::NAN),
    })
}

/// Draws `copies` noisy versions of `s` with child seeds of `seed` and
/// averages them.
fn noisy_average<T: Real>(
    s: &Signal<T>,
    sigma: f64,
    copies: usize,
    seed: u64,
) -> Result<(Signal<T>, Vec<Signal<T>>)> {
    let noisy = (0..copies as u64)
        .map(|i| add_complex_gaussian(s, sigma, child_seed(seed, &[i])))
        .collect::<Result<Vec<_>>>()?;
    Ok((average_signals(&noisy)?, noisy))
}

/// Mean squared error of an `n`-fold average against `Nσ²/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragingReport {
    pub domain_size: usize,
    pub sigma: f64,
    pub copies: usize,
    pub gamma: f64,
    pub trials: usize,
    pub seed: u64,
    /// `Nσ²/n`.
    pub expected_mse: f64,
    pub mean_mse: f64,
    pub standard_error: f64,
    pub within_three_se: bool,
    /// `(σ/√n)(√N + √ln(1/γ))`.
    pub radius: f64,
    pub radius_refined: f64,
    pub radius_exceedances: usize,
    pub radius_exceedance_rate: f64,
    pub allowed_rate: f64,
}

pub fn averaging_experiment<T: Real>(
    s: &Signal<T>,
    sigma: f64,
    copies: usize,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<AveragingReport> {
    check_trials(trials)?;
    if copies == 0 {
        return Err(invalid("copies", 0.0, "must be at least 1"));
    }
    let n = s.domain_size();
    let scale = 1.0 / (copies as f64).sqrt();
    let radius = gaussian_radius(n, sigma, gamma)? * scale;
    let radius_refined = gaussian_radius_refined(n, sigma, gamma)? * scale;
    let errors: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let (avg, _) = noisy_average(s, sigma, copies, child_seed(seed, &[copies as u64, k]))?;
            Ok(lp_norm(&avg.sub(s)?, T::of(2.0))?.as_f64())
        })
        .collect::<Result<_>>()?;
    let squared: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let expected_mse = n as f64 * sigma * sigma / copies as f64;
    let mean_mse = mean(&squared);
    let se = standard_error(&squared);
    let radius_exceedances = errors.iter().filter(|&&e| e > radius).count();
    Ok(AveragingReport {
        domain_size: n,
        sigma,
        copies,
        gamma,
        trials,
        seed,
        expected_mse,
        mean_mse,
        standard_error: se,
        within_three_se: (mean_mse - expected_mse).abs() <= 3.0 * se
            || (sigma == 0.0 && mean_mse == 0.0),
        radius,
        radius_refined,
        radius_exceedances,
        radius_exceedance_rate: radius_exceedances as f64 / trials as f64,
        allowed_rate: gamma + binomial_slack(gamma, trials),
    })
}

/// Deviation of `FR` of an `n`-fold average from `FR(s)` for one `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrAveragePoint {
    pub copies: usize,
    pub median_deviation: f64,
    pub mean_deviation: f64,
    /// Trials with `|FR(f̄) - FR(s)| > 2σ r_γ (FR(n̄) + FR(s)) / (√n ‖s‖₂)`.
    pub average_violations: usize,
    pub average_violation_rate: f64,
    /// Trials where the first copy broke `|FR(f₁) - FR(s)| ≤ 2σ r_γ (FR(n₁) + FR(s)) / ‖s‖₂`.
    pub single_violations: usize,
    pub single_violation_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrAverageReport {
    pub domain_size: usize,
    pub sigma: f64,
    pub gamma: f64,
    pub trials: usize,
    pub seed: u64,
    pub fr_s: f64,
    pub signal_l2: f64,
    /// `√N + √ln(1/γ)`.
    pub r_gamma: f64,
    /// `‖s‖₂ ≥ 2σ r_γ`; violations are only counted inside this regime.
    pub regime_ok: bool,
    pub allowed_rate: f64,
    pub points: Vec<FrAveragePoint>,
    /// Median deviation strictly decreases along `points` (or is zero
    /// throughout).
    pub median_monotone: bool,
}

pub fn fr_of_average_experiment<T: Real>(
    s: &Signal<T>,
    sigma: f64,
    copies: &[usize],
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<FrAverageReport> {
    check_trials(trials)?;
    check_sigma(sigma)?;
    check_gamma(gamma)?;
    if copies.is_empty() || copies.contains(&0) {
        return Err(invalid(
            "copies",
            0.0,
            "need a nonempty list of positive counts",
        ));
    }
    let n = s.domain_size();
    let plan = DftPlan::new(n)?;
    let fr_s = l1_l2_ratio(&plan.dft(s)?)?.as_f64();
    let signal_l2 = lp_norm(s, T::of(2.0))?.as_f64();
    let r_gamma = (n as f64).sqrt() + (1.0 / gamma).ln().sqrt();
    let regime_ok = signal_l2 >= 2.0 * sigma * r_gamma;
    let base = 2.0 * sigma * r_gamma / signal_l2;
    let fr_of = |g: &Signal<T>| -> Result<f64> {
        match l1_l2_ratio(&plan.dft(g)?) {
            Ok(v) => Ok(v.as_f64()),
            Err(Error::ZeroSignal) => Ok(0.0),
            Err(e) => Err(e),
        }
    };

    let points = copies
        .iter()
        .map(|&m| {
            let rows: Vec<(f64, bool, bool)> = (0..trials as u64)
                .into_par_iter()
                .map(|k| {
                    let (avg, noisy) =
                        noisy_average(s, sigma, m, child_seed(seed, &[m as u64, k]))?;
                    let dev = (fr_of(&avg)? - fr_s).abs();
                    let fr_noise = fr_of(&avg.sub(s)?)?;
                    let avg_bound = base / (m as f64).sqrt() * (fr_noise + fr_s);
                    let single_dev = (fr_of(&noisy[0])? - fr_s).abs();
                    let single_bound = base * (fr_of(&noisy[0].sub(s)?)? + fr_s);
                    let tol = 1e-9;
                    Ok((
                        dev,
                        regime_ok && dev > avg_bound * (1.0 + tol) + 1e-12,
                        regime_ok && single_dev > single_bound * (1.0 + tol) + 1e-12,
                    ))
                })
                .collect::<Result<_>>()?;
            let devs: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let average_violations = rows.iter().filter(|r| r.1).count();
            let single_violations = rows.iter().filter(|r| r.2).count();
            Ok(FrAveragePoint {
                copies: m,
                median_deviation: median(&devs).unwrap_or(f64::NAN),
                mean_deviation: mean(&devs),
                average_violations,
                average_violation_rate: average_violations as f64 / trials as f64,
                single_violations,
                single_violation_rate: single_violations as f64 / trials as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let median_monotone = points.iter().all(|p| p.median_deviation == 0.0)
        || points
            .windows(2)
            .all(|w| w[1].median_deviation < w[0].median_deviation);
    Ok(FrAverageReport {
        domain_size: n,
        sigma,
        gamma,
        trials,
        seed,
        fr_s,
        signal_l2,
        r_gamma,
        regime_ok,
        allowed_rate: gamma + binomial_slack(gamma, trials),
        points,
        median_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fr::fourier_ratio;
    use crate::signal::IndexSet;
    use crate::transform::dft;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_signal(n: usize, amp: f64, seed: u64) -> Signal<f64> {
        let mut rng = rng_from_seed(seed);
        Signal::from_fn(n, |_| {
            Complex::new(rng.random_range(-amp..amp), rng.random_range(-amp..amp))
        })
        .unwrap()
    }

    #[test]
    fn zero_sigma_is_identity() {
        let f = random_signal(20, 1.0, 0);
        assert_eq!(add_complex_gaussian(&f, 0.0, 4).unwrap(), f);
        assert!(add_complex_gaussian(&f, -1.0, 4).is_err());
    }

    #[test]
    fn noise_second_moments_in_both_domains() {
        let n = 10_000;
        let noise = complex_gaussian::<f64>(n, 1.0, 3).unwrap();
        for values in [noise.values().to_vec(), dft(&noise).unwrap().into_values()] {
            let sq: Vec<f64> = values.iter().map(|z| z.norm_sqr()).collect();
            assert!((mean(&sq) - 1.0).abs() <= 4.0 * standard_error(&sq));
            let re: Vec<f64> = values.iter().map(|z| z.re * z.re).collect();
            assert!((mean(&re) - 0.5).abs() <= 4.0 * standard_error(&re));
        }
        assert_eq!(noise, complex_gaussian::<f64>(n, 1.0, 3).unwrap());
    }

    #[test]
    fn averaging_single_copy_and_mismatch() {
        let f = random_signal(8, 1.0, 1);
        assert_eq!(average_signals(std::slice::from_ref(&f)).unwrap(), f);
        let g = random_signal(9, 1.0, 2);
        assert!(average_signals(&[f.clone(), g]).is_err());
        assert!(average_signals::<f64>(&[]).is_err());
        let avg = average_signals(&[f.clone(), f.scaled(Complex::new(3.0, 0.0))]).unwrap();
        assert!(
            lp_norm(&avg.sub(&f.scaled(Complex::new(2.0, 0.0))).unwrap(), 2.0).unwrap() < 1e-14
        );
    }

    #[test]
    fn perturbation_trivial_cases() {
        let f = random_signal(32, 1.0, 5);
        let zero = Signal::zeros(32).unwrap();
        let r = perturbation_bound(&f, &zero).unwrap();
        assert_eq!(r.deterministic_bound, 0.0);
        assert!(r.observed_deviation < 1e-12 && r.holds && r.fr_n.is_none());
        let r = perturbation_bound(&f, &f.scaled(Complex::new(0.3, 0.0))).unwrap();
        assert!(r.observed_deviation < 1e-12 && r.holds);
        assert!((r.fr_n.unwrap() - fourier_ratio(&f).unwrap()).abs() < 1e-12);
        let big = perturbation_bound(&f, &f.scaled(Complex::new(-2.0, 0.0))).unwrap();
        assert!(!big.bound_applicable && big.deterministic_bound.is_infinite() && big.holds);
        assert!(perturbation_bound(&zero, &f).is_err());
    }

    #[test]
    fn perturbation_simplified_forms_dominate() {
        for seed in 0..50 {
            let f = random_signal(64, 1.0, seed);
            let n = random_signal(64, 0.2, seed + 1000);
            let r = perturbation_bound(&f, &n).unwrap();
            assert!(r.bound_applicable && r.holds);
            let root_n = 8.0;
            let coarse = (root_n + r.fr_f) * r.t / (r.s - r.t);
            assert!(r.deterministic_bound <= coarse + 1e-12);
            assert!(coarse <= 2.0 * root_n * r.t / (r.s - r.t) + 1e-12);
            // Rewritten with δ = t/s.
            let delta = r.t / r.s;
            let via_delta = delta / (1.0 - delta) * (r.fr_f + r.fr_n.unwrap());
            assert!((via_delta - r.deterministic_bound).abs() < 1e-9 * via_delta);
        }
    }

    #[test]
    fn gaussian_deviation_coverage() {
        let f = Signal::<f64>::from_real(&[3.0; 64]).unwrap();
        let r = gaussian_deviation_experiment(&f, 0.1, 0.1, 1000, 7).unwrap();
        assert!(r.regime_ok);
        assert!(r.violation_rate <= r.allowed_rate);
        assert!(r.radius_exceedance_rate <= r.allowed_rate);
        let zero = gaussian_deviation_experiment(&f, 0.0, 0.1, 20, 7).unwrap();
        assert_eq!(zero.median_deviation, 0.0);
        assert_eq!(zero.violations, 0);
    }

    #[test]
    fn gaussian_regime_violation_is_flagged() {
        let f = Signal::<f64>::from_real(&[0.01; 16]).unwrap();
        let r = gaussian_deviation_experiment(&f, 1.0, 0.1, 10, 0).unwrap();
        assert!(!r.regime_ok && r.violations == 0);
    }

    #[test]
    fn averaging_mse_matches_expectation() {
        let s = random_signal(256, 1.0, 9);
        let r = averaging_experiment(&s, 1.0, 100, 0.1, 200, 0).unwrap();
        assert!((r.expected_mse - 2.56).abs() < 1e-12);
        assert!(r.within_three_se, "{r:?}");
        assert!(r.radius_exceedance_rate <= r.allowed_rate);
        assert!(r.radius_refined > r.radius);
    }

    #[test]
    fn fr_of_average_shrinks_with_copies() {
        let s = Signal::<f64>::indicator(&IndexSet::multiples(15, 3).unwrap())
            .scaled(Complex::new(4.0, 0.0));
        let r = fr_of_average_experiment(&s, 0.3, &[1, 4, 16, 64], 0.1, 500, 1).unwrap();
        assert!(r.median_monotone, "{:?}", r.points);
        let zero = fr_of_average_experiment(&s, 0.0, &[1, 4], 0.1, 10, 1).unwrap();
        assert!(zero.points.iter().all(|p| p.median_deviation < 1e-12));
    }

    #[test]
    fn fr_of_average_bounds_in_regime() {
        let s = Signal::<f64>::from_real(&[1.0; 64])
            .unwrap()
            .scaled(Complex::new(10.0, 0.0));
        let r = fr_of_average_experiment(&s, 0.2, &[1, 4, 16], 0.1, 300, 2).unwrap();
        assert!(r.regime_ok);
        for p in &r.points {
            assert!(p.average_violation_rate <= r.allowed_rate);
            assert!(p.single_violation_rate <= r.allowed_rate);
        }
    }

    #[test]
    fn radius_arithmetic() {
        let r = gaussian_radius(100, 2.0, (-4.0f64).exp()).unwrap();
        assert!((r - 2.0 * (10.0 + 2.0)).abs() < 1e-12);
        let refined = gaussian_radius_refined(100, 2.0, (-4.0f64).exp()).unwrap();
        assert!((refined - r - 2.0 * 4.0 / 20.0).abs() < 1e-12);
        assert!(gaussian_radius(10, 1.0, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn deterministic_perturbation_inequality(
            n in prop::sample::select(vec![16usize, 64, 256]),
            seed in any::<u64>(),
            ratio in 0.0f64..1.5,
        ) {
            let f = random_signal(n, 1.0, seed);
            let noise = random_signal(n, ratio, seed ^ 0xABCD);
            let r = perturbation_bound(&f, &noise).unwrap();
            prop_assert!(r.holds);
        }
    }
}
