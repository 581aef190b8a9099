//! Random sparse approximants: average `k` i.i.d. characters drawn with
//! probability `|f̂(m)| / ‖f̂‖₁`, each weighted by `‖f̂‖₁ sgn(f̂(m)) N^{-1/2}`.
//! The average is an unbiased estimator of `f`.

use serde::Serialize;

use super::poly::TrigPoly;
use super::sampler::FrequencySampler;
use crate::error::{invalid, Error, Result};
use crate::norms::lp_norm;
use crate::scalar::Real;
use crate::seed::{child_seed, rng_from_seed};
use crate::signal::{Signal, Spectrum};
use crate::transform::DftPlan;

/// Norm in which an approximant is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxNorm {
    L1,
    L2,
    Linf,
}

impl ApproxNorm {
    fn exponent<T: Real>(self) -> T {
        match self {
            ApproxNorm::L1 => T::one(),
            ApproxNorm::L2 => T::of(2.0),
            ApproxNorm::Linf => T::infinity(),
        }
    }
}

impl std::fmt::Display for ApproxNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ApproxNorm::L1 => "l1",
            ApproxNorm::L2 => "l2",
            ApproxNorm::Linf => "linf",
        })
    }
}

impl std::str::FromStr for ApproxNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "1" => Ok(ApproxNorm::L1),
            "l2" | "2" => Ok(ApproxNorm::L2),
            "linf" | "inf" => Ok(ApproxNorm::Linf),
            _ => Err(Error::Degenerate("norm must be one of l1, l2, linf")),
        }
    }
}

/// Retry and size limits for [`approximate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxConfig {
    pub max_attempts: usize,
    /// Refuse degrees above this many sampled terms.
    pub max_degree: usize,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            max_attempts: 50,
            max_degree: 1 << 22,
        }
    }
}

/// Result of a retried approximation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxOutcome<T = f64> {
    /// The first accepted approximant, or the best one seen on failure.
    pub poly: TrigPoly<T>,
    pub norm: ApproxNorm,
    pub eta: T,
    /// Number of sampled terms.
    pub k: usize,
    /// The degree bound that `k` strictly exceeds.
    pub threshold: T,
    /// `‖f - P‖ / ‖f‖` for the returned polynomial.
    pub error_ratio: T,
    pub attempts: usize,
    pub success: bool,
}

/// Precomputed spectrum, sampler and transform plan for repeated draws
/// against one signal.
#[derive(Debug, Clone)]
pub struct Approximator<T: Real> {
    signal: Signal<T>,
    spectrum: Spectrum<T>,
    sampler: FrequencySampler,
    plan: DftPlan<T>,
    spectral_l1: T,
}

impl<T: Real> Approximator<T> {
    pub fn new(f: &Signal<T>) -> Result<Self> {
        let plan = DftPlan::new(f.domain_size())?;
        let spectrum = plan.dft(f)?;
        let sampler = FrequencySampler::new(&spectrum)?;
        let spectral_l1 = lp_norm(&spectrum, T::one())?;
        Ok(Self {
            signal: f.clone(),
            spectrum,
            sampler,
            plan,
            spectral_l1,
        })
    }

    pub fn signal(&self) -> &Signal<T> {
        &self.signal
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    pub fn plan(&self) -> &DftPlan<T> {
        &self.plan
    }

    /// `‖f̂‖₁`.
    pub fn spectral_l1(&self) -> T {
        self.spectral_l1
    }

    /// Average of `k` sampled characters, seeded by `seed`. Repeated
    /// frequencies are kept as separate terms.
    pub fn draw(&self, k: usize, seed: u64) -> Result<TrigPoly<T>> {
        if k == 0 {
            return Err(invalid("k", 0.0, "need at least one term"));
        }
        let n = self.signal.domain_size();
        let weight = self.spectral_l1 / (T::of_usize(n).sqrt() * T::of_usize(k));
        let mut rng = rng_from_seed(seed);
        let terms = (0..k)
            .map(|_| {
                let m = self.sampler.sample(&mut rng);
                let z = self.spectrum.values()[m];
                (m, z / z.norm() * weight)
            })
            .collect();
        Ok(TrigPoly::from_terms_unchecked(n, terms))
    }

    /// `‖f - P‖` in the given norm.
    pub fn error(&self, poly: &TrigPoly<T>, norm: ApproxNorm) -> Result<T> {
        let p = poly.eval_with(&self.plan)?;
        lp_norm(&self.signal.sub(&p)?, norm.exponent())
    }

    /// The degree bound for `norm` at accuracy `eta`.
    pub fn threshold(&self, norm: ApproxNorm, eta: T) -> Result<T> {
        let f = &self.signal;
        let n = T::of_usize(f.domain_size());
        let l1_hat = self.spectral_l1;
        Ok(match norm {
            ApproxNorm::L2 => {
                let fr = l1_hat / lp_norm(f, T::of(2.0))?;
                (fr * fr - T::one()) / (eta * eta)
            }
            ApproxNorm::Linf => {
                let ratio = l1_hat / (n * lp_norm(f, T::infinity())?);
                T::of(8.0) * ratio * ratio * n * (T::of(4.0) * n).ln() / (eta * eta)
            }
            ApproxNorm::L1 => {
                let ratio = l1_hat / lp_norm(f, T::one())?;
                T::of(32.0) * T::PI() * ratio * ratio * n / (eta * eta)
            }
        })
    }
}

/// Smallest integer strictly above `threshold`, with a relative guard so that
/// rounding in the threshold never makes `k` land on it.
pub fn degree_above<T: Real>(threshold: T) -> usize {
    let t = threshold.max(T::zero()).as_f64();
    let guarded = t + 1e-9 * t.max(1.0);
    guarded.floor() as usize + 1
}

/// Average of `k` i.i.d. sampled characters; see the module docs.
pub fn random_approximant<T: Real>(f: &Signal<T>, k: usize, seed: u64) -> Result<TrigPoly<T>> {
    Approximator::new(f)?.draw(k, seed)
}

/// Draws approximants of the degree the bound for `norm` prescribes, with a
/// fresh child seed per attempt, until one achieves `‖f - P‖ < η ‖f‖`.
pub fn approximate<T: Real>(
    f: &Signal<T>,
    norm: ApproxNorm,
    eta: T,
    seed: u64,
    config: &ApproxConfig,
) -> Result<ApproxOutcome<T>> {
    if !(eta > T::zero() && eta < T::one()) {
        return Err(invalid("eta", eta.as_f64(), "must lie in (0, 1)"));
    }
    if config.max_attempts == 0 {
        return Err(invalid("max_attempts", 0.0, "must be at least 1"));
    }
    let approx = Approximator::new(f)?;
    let threshold = approx.threshold(norm, eta)?;
    let k = degree_above(threshold);
    if k > config.max_degree {
        return Err(invalid(
            "k",
            k as f64,
            "required degree exceeds the configured maximum",
        ));
    }
    let reference = lp_norm(f, norm.exponent())?;
    let mut best: Option<(TrigPoly<T>, T)> = None;
    for attempt in 0..config.max_attempts {
        let poly = approx.draw(k, child_seed(seed, &[attempt as u64]))?;
        let ratio = approx.error(&poly, norm)? / reference;
        if ratio < eta {
            return Ok(ApproxOutcome {
                poly,
                norm,
                eta,
                k,
                threshold,
                error_ratio: ratio,
                attempts: attempt + 1,
                success: true,
            });
        }
        if best.as_ref().is_none_or(|b| ratio < b.1) {
            best = Some((poly, ratio));
        }
    }
    let (poly, error_ratio) = best.expect("at least one attempt");
    Ok(ApproxOutcome {
        poly,
        norm,
        eta,
        k,
        threshold,
        error_ratio,
        attempts: config.max_attempts,
        success: false,
    })
}

pub fn approx_l2<T: Real>(
    f: &Signal<T>,
    eta: T,
    seed: u64,
    max_attempts: usize,
) -> Result<ApproxOutcome<T>> {
    approximate(f, ApproxNorm::L2, eta, seed, &attempts(max_attempts))
}

pub fn approx_linf<T: Real>(
    f: &Signal<T>,
    eta: T,
    seed: u64,
    max_attempts: usize,
) -> Result<ApproxOutcome<T>> {
    approximate(f, ApproxNorm::Linf, eta, seed, &attempts(max_attempts))
}

pub fn approx_l1<T: Real>(
    f: &Signal<T>,
    eta: T,
    seed: u64,
    max_attempts: usize,
) -> Result<ApproxOutcome<T>> {
    approximate(f, ApproxNorm::L1, eta, seed, &attempts(max_attempts))
}

fn attempts(max_attempts: usize) -> ApproxConfig {
    ApproxConfig {
        max_attempts,
        ..ApproxConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::IndexSet;
    use crate::stats::{mean, median, standard_error};
    use crate::transform::idft;
    use num_complex::Complex;
    use rand::Rng;

    fn random_signal(n: usize, seed: u64) -> Signal<f64> {
        let mut rng = rng_from_seed(seed);
        Signal::from_fn(n, |_| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .unwrap()
    }

    fn sparse_spectrum_signal(n: usize, s: usize, seed: u64) -> Signal<f64> {
        let mut rng = rng_from_seed(seed);
        let set = IndexSet::new(n, rand::seq::index::sample(&mut rng, n, s).into_vec()).unwrap();
        idft(&Spectrum::indicator(&set)).unwrap()
    }

    fn one_sparse() -> Signal<f64> {
        let mut spec = vec![Complex::new(0.0, 0.0); 16];
        spec[5] = Complex::new(0.6, -0.8) * 3.0;
        idft(&Spectrum::new(spec).unwrap()).unwrap()
    }

    fn l2_dist(a: &Signal<f64>, b: &Signal<f64>) -> f64 {
        lp_norm(&a.sub(b).unwrap(), 2.0).unwrap()
    }

    #[test]
    fn one_sparse_spectrum_is_reconstructed_exactly() {
        let f = one_sparse();
        for k in [1, 2, 7] {
            let p = random_approximant(&f, k, k as u64).unwrap();
            assert!(l2_dist(&f, &p.eval().unwrap()) < 1e-12);
        }
        for out in [
            approx_l2(&f, 0.5, 1, 5).unwrap(),
            approx_linf(&f, 0.5, 1, 5).unwrap(),
            approx_l1(&f, 0.5, 1, 5).unwrap(),
        ] {
            assert!(out.success && out.attempts == 1);
            assert!(out.error_ratio < 1e-12);
        }
        assert_eq!(approx_l2(&f, 0.5, 1, 5).unwrap().k, 1);
    }

    #[test]
    fn constant_signal_with_three_terms() {
        let f = Signal::<f64>::from_real(&[1.0; 10]).unwrap();
        let p = random_approximant(&f, 3, 9).unwrap().eval().unwrap();
        assert!(l2_dist(&f, &p) < 1e-12);
    }

    #[test]
    fn coefficient_magnitude_follows_the_weighting() {
        let f = random_signal(20, 3);
        let a = Approximator::new(&f).unwrap();
        let p = a.draw(6, 0).unwrap();
        let expected = a.spectral_l1() / (20f64.sqrt() * 6.0);
        assert_eq!(p.term_count(), 6);
        for &(m, c) in p.terms() {
            assert!((c.norm() - expected).abs() < 1e-12);
            let z = a.spectrum().values()[m];
            assert!((c / c.norm() - z / z.norm()).norm() < 1e-12);
        }
    }

    #[test]
    fn draws_are_reproducible() {
        let f = random_signal(33, 8);
        assert_eq!(
            random_approximant(&f, 10, 42).unwrap(),
            random_approximant(&f, 10, 42).unwrap()
        );
        assert_ne!(
            random_approximant(&f, 10, 42).unwrap(),
            random_approximant(&f, 10, 43).unwrap()
        );
    }

    #[test]
    fn degree_for_subgroup_indicator() {
        let f = Signal::<f64>::indicator(&IndexSet::multiples(15, 3).unwrap());
        assert_eq!(approx_l2(&f, 0.9, 0, 50).unwrap().k, 3);
    }

    #[test]
    fn degree_for_random_set_spectrum() {
        let f = sparse_spectrum_signal(256, 9, 1);
        let out = approx_l2(&f, 0.5, 0, 20).unwrap();
        assert_eq!(out.k, 33);
        assert!(out.k as f64 > out.threshold);
    }

    #[test]
    fn degree_strictly_exceeds_threshold() {
        assert_eq!(degree_above(32.0f64), 33);
        assert_eq!(degree_above(31.999_999_999_99f64), 33);
        assert_eq!(degree_above(2.469f64), 3);
        assert_eq!(degree_above(0.0f64), 1);
        for seed in 0..20 {
            let f = random_signal(40, seed);
            let a = Approximator::new(&f).unwrap();
            for norm in [ApproxNorm::L1, ApproxNorm::L2, ApproxNorm::Linf] {
                let t = a.threshold(norm, 0.4).unwrap();
                let k = degree_above(t);
                assert!(k as f64 > t && (k - 1) as f64 <= t + 1e-6 * t.max(1.0));
            }
        }
    }

    #[test]
    fn linf_threshold_matches_formula() {
        let f = sparse_spectrum_signal(64, 4, 2);
        let a = Approximator::new(&f).unwrap();
        let linf = lp_norm(&f, f64::INFINITY).unwrap();
        let mu_l1 = 4.0 / 64.0;
        let expected = 8.0 * (mu_l1 / linf).powi(2) * 64.0 * (256f64).ln() / 0.25;
        assert!((a.threshold(ApproxNorm::Linf, 0.5).unwrap() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn unbiased_pointwise() {
        let f = random_signal(16, 21);
        let a = Approximator::new(&f).unwrap();
        let trials = 10_000;
        let samples: Vec<Signal<f64>> = (0..trials)
            .map(|t| a.draw(4, child_seed(5, &[t])).unwrap().eval().unwrap())
            .collect();
        for x in 0..16 {
            let parts: [fn(Complex<f64>) -> f64; 2] = [|z| z.re, |z| z.im];
            for part in parts {
                let xs: Vec<f64> = samples.iter().map(|p| part(p.values()[x])).collect();
                let dev = (mean(&xs) - part(f.values()[x])).abs();
                assert!(dev <= 4.0 * standard_error(&xs), "x = {x}");
            }
        }
    }

    #[test]
    fn l2_error_expectation_identity() {
        let f = random_signal(64, 13);
        let a = Approximator::new(&f).unwrap();
        let k = 1000;
        let errs: Vec<f64> = (0..10_000u64)
            .map(|t| {
                a.error(&a.draw(k, child_seed(99, &[t])).unwrap(), ApproxNorm::L2)
                    .unwrap()
                    .powi(2)
            })
            .collect();
        let l2 = lp_norm(&f, 2.0).unwrap();
        let expected = (a.spectral_l1().powi(2) - l2 * l2) / k as f64;
        assert!((mean(&errs) - expected).abs() <= 3.0 * standard_error(&errs));
    }

    #[test]
    fn l1_error_expectation_bound() {
        let f = random_signal(32, 17);
        let a = Approximator::new(&f).unwrap();
        let k = 50;
        let errs: Vec<f64> = (0..2000u64)
            .map(|t| {
                a.error(&a.draw(k, child_seed(3, &[t])).unwrap(), ApproxNorm::L1)
                    .unwrap()
            })
            .collect();
        let bound =
            2.0 * (8.0 * std::f64::consts::PI * 32.0).sqrt() * a.spectral_l1() / (k as f64).sqrt();
        assert!(mean(&errs) <= bound + 3.0 * standard_error(&errs));
    }

    #[test]
    fn doubling_k_does_not_increase_median_linf_error() {
        let f = sparse_spectrum_signal(64, 4, 3);
        let a = Approximator::new(&f).unwrap();
        let mut prev = f64::INFINITY;
        for k in [8usize, 16, 32, 64, 128, 256] {
            let errs: Vec<f64> = (0..100u64)
                .map(|t| {
                    a.error(
                        &a.draw(k, child_seed(k as u64, &[t])).unwrap(),
                        ApproxNorm::Linf,
                    )
                    .unwrap()
                })
                .collect();
            let med = median(&errs).unwrap();
            assert!(med <= prev, "k = {k}");
            prev = med;
        }
    }

    #[test]
    fn retried_approximants_succeed_on_sparse_spectra() {
        let f = sparse_spectrum_signal(256, 9, 4);
        let ok = (0..100)
            .filter(|&s| approx_l2(&f, 0.5, s, 20).unwrap().success)
            .count();
        assert!(ok >= 99, "l2 successes {ok}");
        let g = sparse_spectrum_signal(64, 4, 5);
        let ok = (0..100)
            .filter(|&s| approx_linf(&g, 0.5, s, 50).unwrap().success)
            .count();
        assert!(ok >= 50, "linf successes {ok}");
        let ok = (0..20)
            .filter(|&s| approx_l1(&g, 0.5, s, 50).unwrap().success)
            .count();
        assert_eq!(ok, 20);
    }

    #[test]
    fn outcome_reports_accepted_error() {
        let f = random_signal(30, 1);
        let out = approx_l2(&f, 0.6, 7, 10).unwrap();
        let direct = l2_dist(&f, &out.poly.eval().unwrap()) / lp_norm(&f, 2.0).unwrap();
        assert!((direct - out.error_ratio).abs() < 1e-12);
        assert_eq!(out.success, out.error_ratio < 0.6);
    }

    #[test]
    fn invalid_inputs() {
        let f = random_signal(8, 0);
        for eta in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(matches!(
                approx_l2(&f, eta, 0, 5),
                Err(Error::InvalidParameter { .. })
            ));
        }
        assert!(random_approximant(&f, 0, 0).is_err());
        let z = Signal::<f64>::zeros(8).unwrap();
        assert_eq!(random_approximant(&z, 3, 0).unwrap_err(), Error::ZeroSignal);
        let tight = ApproxConfig {
            max_attempts: 1,
            max_degree: 2,
        };
        assert!(approximate(&f, ApproxNorm::L1, 0.1, 0, &tight).is_err());
    }

    #[test]
    fn norm_names_round_trip() {
        for norm in [ApproxNorm::L1, ApproxNorm::L2, ApproxNorm::Linf] {
            assert_eq!(norm.to_string().parse::<ApproxNorm>().unwrap(), norm);
        }
        assert!("l3".parse::<ApproxNorm>().is_err());
    }
}
