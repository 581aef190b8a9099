//! Sampling frequencies with probability proportional to `|F(m)|`.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Inverse-CDF sampler over the prefix sums of `|F(m)|`.
///
/// Ties resolve to the lowest index, and frequencies with zero mass are never
/// returned.
#[derive(Debug, Clone)]
pub struct FrequencySampler {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl FrequencySampler {
    pub fn new<T: Real>(spectrum: &(impl AsRef<[Complex<T>]> + ?Sized)) -> Result<Self> {
        let mut acc = 0.0;
        let mut last_positive = None;
        let cumulative = spectrum
            .as_ref()
            .iter()
            .enumerate()
            .map(|(m, z)| {
                let w = z.norm().as_f64();
                if w > 0.0 {
                    last_positive = Some(m);
                }
                acc += w;
                acc
            })
            .collect();
        let last_positive = last_positive.ok_or(Error::ZeroSignal)?;
        Ok(Self {
            cumulative,
            last_positive,
        })
    }

    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().expect("non-empty by construction")
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let target = rng.random::<f64>() * self.total_mass();
        let m = self.cumulative.partition_point(|&c| c <= target);
        m.min(self.last_positive)
    }
}

/// One draw from `|F(m)| / ‖F‖₁`, reproducible from `seed`.
pub fn sample_frequency<T: Real>(
    spectrum: &(impl AsRef<[Complex<T>]> + ?Sized),
    seed: u64,
) -> Result<usize> {
    let sampler = FrequencySampler::new(spectrum)?;
    Ok(sampler.sample(&mut crate::seed::rng_from_seed(seed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::binomial_slack;

    fn real(weights: &[f64]) -> Vec<Complex<f64>> {
        weights.iter().map(|&w| Complex::new(w, 0.0)).collect()
    }

    #[test]
    fn one_sparse_always_hits_its_atom() {
        let mut f = real(&[0.0; 9]);
        f[6] = Complex::new(0.0, -2.5);
        let s = FrequencySampler::new(&f).unwrap();
        let mut rng = crate::seed::rng_from_seed(0);
        assert!((0..1000).all(|_| s.sample(&mut rng) == 6));
        assert_eq!(sample_frequency(&f, 123).unwrap(), 6);
    }

    #[test]
    fn zero_spectrum_errors() {
        assert_eq!(
            FrequencySampler::new(&real(&[0.0; 4])).unwrap_err(),
            Error::ZeroSignal
        );
    }

    #[test]
    fn flat_spectrum_passes_chi_square() {
        let n = 16;
        let draws = 100_000;
        let s = FrequencySampler::new(&real(&vec![1.0; n])).unwrap();
        let mut rng = crate::seed::rng_from_seed(2024);
        let mut counts = vec![0usize; n];
        for _ in 0..draws {
            counts[s.sample(&mut rng)] += 1;
        }
        let expected = draws as f64 / n as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // Upper 0.001 quantile of chi-square with 15 degrees of freedom.
        assert!(chi2 < 37.697, "chi2 = {chi2}");
    }

    #[test]
    fn unequal_masses_within_three_sigma() {
        let f = real(&[0.5, 0.25, 0.25, 0.0]);
        let s = FrequencySampler::new(&f).unwrap();
        let mut rng = crate::seed::rng_from_seed(77);
        let draws = 40_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            counts[s.sample(&mut rng)] += 1;
        }
        assert_eq!(counts[3], 0);
        for (m, p) in [0.5, 0.25, 0.25].iter().enumerate() {
            let rate = counts[m] as f64 / draws as f64;
            assert!((rate - p).abs() <= binomial_slack(*p, draws), "m = {m}");
        }
    }

    #[test]
    fn zero_mass_entries_are_skipped() {
        let f = real(&[0.0, 1.0, 0.0, 0.0, 1.0, 0.0]);
        let s = FrequencySampler::new(&f).unwrap();
        let mut rng = crate::seed::rng_from_seed(5);
        for _ in 0..5000 {
            let m = s.sample(&mut rng);
            assert!(m == 1 || m == 4);
        }
    }
}
