//! Unitary discrete Fourier transform on ℤ_N.
//!
//! `f̂(m) = N^{-1/2} Σ_x e^{-2πixm/N} f(x)` and its inverse. Any `N >= 1` is
//! accepted; prime lengths go through Bluestein/Rader inside rustfft, so every
//! size runs in O(N log N).

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{Signal, Spectrum};

/// Forward and inverse transforms planned for one domain size.
///
/// Planning is the expensive part; Monte-Carlo loops should build one plan
/// per `N` and reuse it. A plan is immutable and can be shared by threads.
#[derive(Clone)]
pub struct DftPlan<T: Real> {
    domain_size: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    scale: T,
}

impl<T: Real> std::fmt::Debug for DftPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftPlan")
            .field("domain_size", &self.domain_size)
            .finish()
    }
}

impl<T: Real> DftPlan<T> {
    pub fn new(domain_size: usize) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::EmptyDomain);
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            domain_size,
            forward: planner.plan_fft_forward(domain_size),
            inverse: planner.plan_fft_inverse(domain_size),
            scale: T::one() / T::of_usize(domain_size).sqrt(),
        })
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// In-place unitary forward transform of a raw buffer.
    pub fn forward_in_place(&self, buffer: &mut [Complex<T>]) -> Result<()> {
        self.run(&self.forward, buffer)
    }

    /// In-place unitary inverse transform of a raw buffer.
    pub fn inverse_in_place(&self, buffer: &mut [Complex<T>]) -> Result<()> {
        self.run(&self.inverse, buffer)
    }

    fn run(&self, fft: &Arc<dyn Fft<T>>, buffer: &mut [Complex<T>]) -> Result<()> {
        if buffer.len() != self.domain_size {
            return Err(Error::LengthMismatch {
                expected: self.domain_size,
                found: buffer.len(),
            });
        }
        fft.process(buffer);
        for z in buffer.iter_mut() {
            *z = *z * self.scale;
        }
        Ok(())
    }

    pub fn dft(&self, f: &Signal<T>) -> Result<Spectrum<T>> {
        let mut buffer = f.values().to_vec();
        self.forward_in_place(&mut buffer)?;
        Ok(Spectrum::from_vec_unchecked(buffer))
    }

    pub fn idft(&self, spectrum: &Spectrum<T>) -> Result<Signal<T>> {
        let mut buffer = spectrum.values().to_vec();
        self.inverse_in_place(&mut buffer)?;
        Ok(Signal::from_vec_unchecked(buffer))
    }
}

/// Unitary DFT of `f`.
pub fn dft<T: Real>(f: &Signal<T>) -> Result<Spectrum<T>> {
    DftPlan::new(f.domain_size())?.dft(f)
}

/// Inverse unitary DFT.
pub fn idft<T: Real>(spectrum: &Spectrum<T>) -> Result<Signal<T>> {
    DftPlan::new(spectrum.domain_size())?.idft(spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lp_norm;
    use crate::signal::IndexSet;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    // Direct O(N^2) evaluation of the defining sum.
    fn naive_dft(f: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let n = f.len();
        let scale = 1.0 / (n as f64).sqrt();
        (0..n)
            .map(|m| {
                f.iter()
                    .enumerate()
                    .fold(Complex::new(0.0, 0.0), |acc, (x, &v)| {
                        let angle = -2.0 * PI * ((x * m) % n) as f64 / n as f64;
                        acc + v * Complex::from_polar(1.0, angle)
                    })
                    * scale
            })
            .collect()
    }

    fn random_signal(n: usize, seed: u64) -> Signal<f64> {
        use rand::Rng;
        let mut rng = crate::seed::rng_from_seed(seed);
        Signal::from_fn(n, |_| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .unwrap()
    }

    #[test]
    fn delta_transforms_to_constant() {
        let f = Signal::<f64>::indicator(&IndexSet::new(4, vec![0]).unwrap());
        let spec = dft(&f).unwrap();
        for z in spec.values() {
            assert!((z - Complex::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn constant_transforms_to_scaled_delta() {
        let f = Signal::from_real(&[1.0; 4]).unwrap();
        let spec = dft(&f).unwrap();
        assert!((spec.values()[0] - Complex::new(2.0, 0.0)).norm() < 1e-15);
        for z in &spec.values()[1..] {
            assert!(z.norm() < 1e-15);
        }
        let back = idft(&spec).unwrap();
        for z in back.values() {
            assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn subgroup_indicator_spectrum() {
        // 1_{3Z_5} in Z_15 transforms to (5/sqrt 15) 1_{5Z_3}.
        let e = IndexSet::multiples(15, 3).unwrap();
        let spec = dft(&Signal::<f64>::indicator(&e)).unwrap();
        let height = 5.0 / 15f64.sqrt();
        for (m, z) in spec.values().iter().enumerate() {
            let expected = if m % 5 == 0 { height } else { 0.0 };
            assert!((z - Complex::new(expected, 0.0)).norm() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn matches_direct_summation_for_awkward_sizes() {
        for (i, &n) in [1usize, 2, 3, 7, 12, 17, 31, 60, 97].iter().enumerate() {
            let f = random_signal(n, i as u64);
            let fast = dft(&f).unwrap();
            let slow = naive_dft(f.values());
            for (a, b) in fast.values().iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12, "N = {n}");
            }
        }
    }

    #[test]
    fn inverse_of_random_set_indicator_has_flat_sparse_spectrum() {
        let s = IndexSet::new(256, vec![3, 40, 77, 150, 201]).unwrap();
        let f = idft(&Spectrum::<f64>::indicator(&s)).unwrap();
        let back = dft(&f).unwrap();
        for (m, z) in back.values().iter().enumerate() {
            let expected = if s.contains(m) { 1.0 } else { 0.0 };
            assert!((z - Complex::new(expected, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_at_large_power_of_two() {
        let n = 1 << 16;
        let f = random_signal(n, 99);
        let back = idft(&dft(&f).unwrap()).unwrap();
        let err = lp_norm(&f.sub(&back).unwrap(), 2.0).unwrap();
        assert!(err <= 1e-10 * lp_norm(&f, 2.0).unwrap());
    }

    #[test]
    fn single_precision_round_trip() {
        let f = Signal::<f32>::from_fn(48, |x| Complex::new((x as f32).sin(), 0.5)).unwrap();
        let back = idft(&dft(&f).unwrap()).unwrap();
        let err = lp_norm(&f.sub(&back).unwrap(), 2.0f32).unwrap();
        assert!(err <= 1e-5 * lp_norm(&f, 2.0f32).unwrap());
    }

    #[test]
    fn rejects_mismatched_buffer() {
        let plan = DftPlan::<f64>::new(8).unwrap();
        let mut buf = vec![Complex::new(0.0, 0.0); 7];
        assert!(matches!(
            plan.forward_in_place(&mut buf),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(DftPlan::<f64>::new(0).unwrap_err(), Error::EmptyDomain);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn plancherel_and_round_trip(n in 1usize..300, seed in any::<u64>()) {
            let f = random_signal(n, seed);
            let spec = dft(&f).unwrap();
            let l2 = lp_norm(&f, 2.0).unwrap();
            prop_assert!((lp_norm(&spec, 2.0).unwrap() - l2).abs() <= 1e-10 * l2);
            let back = idft(&spec).unwrap();
            prop_assert!(lp_norm(&f.sub(&back).unwrap(), 2.0).unwrap() <= 1e-10 * l2);
        }
    }
}
