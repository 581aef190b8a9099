//! Sparse trigonometric polynomials `P(x) = Σ cᵢ e^{2πi mᵢ x / N}`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{Signal, Spectrum};
use crate::transform::DftPlan;

/// A trigonometric polynomial on ℤ_N. Frequencies may repeat until
/// [`TrigPoly::canonicalize`] merges them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigPoly<T = f64> {
    terms: Vec<(usize, Complex<T>)>,
    domain_size: usize,
}

impl<T: Real> TrigPoly<T> {
    pub fn new(domain_size: usize, terms: Vec<(usize, Complex<T>)>) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::EmptyDomain);
        }
        for (i, &(m, c)) in terms.iter().enumerate() {
            if m >= domain_size {
                return Err(Error::IndexOutOfRange {
                    index: m,
                    domain_size,
                });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite { index: i });
            }
        }
        Ok(Self { terms, domain_size })
    }

    pub fn zero(domain_size: usize) -> Result<Self> {
        Self::new(domain_size, Vec::new())
    }

    pub(crate) fn from_terms_unchecked(
        domain_size: usize,
        terms: Vec<(usize, Complex<T>)>,
    ) -> Self {
        Self { terms, domain_size }
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// Terms as stored, possibly with repeated frequencies.
    pub fn terms(&self) -> &[(usize, Complex<T>)] {
        &self.terms
    }

    /// Number of stored terms, counting repeats.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Number of distinct frequencies.
    pub fn degree(&self) -> usize {
        let mut seen: Vec<usize> = self.terms.iter().map(|t| t.0).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Merges repeated frequencies by summing their coefficients; terms come
    /// out sorted by frequency.
    pub fn canonicalize(&self) -> Self {
        let mut terms = self.terms.clone();
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(usize, Complex<T>)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == m => last.1 = last.1 + c,
                _ => merged.push((m, c)),
            }
        }
        Self::from_terms_unchecked(self.domain_size, merged)
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0 < w[1].0)
    }

    /// The spectrum `P̂`, i.e. `√N` times the summed coefficient at each
    /// frequency.
    pub fn spectrum(&self) -> Spectrum<T> {
        let root_n = T::of_usize(self.domain_size).sqrt();
        let mut values = vec![Complex::new(T::zero(), T::zero()); self.domain_size];
        for &(m, c) in &self.terms {
            values[m] = values[m] + c * root_n;
        }
        Spectrum::from_vec_unchecked(values)
    }

    /// Values of `P` on all of ℤ_N.
    pub fn eval(&self) -> Result<Signal<T>> {
        self.eval_with(&DftPlan::new(self.domain_size)?)
    }

    pub fn eval_with(&self, plan: &DftPlan<T>) -> Result<Signal<T>> {
        plan.idft(&self.spectrum())
    }

    /// `P(x)` at a single point by direct summation.
    pub fn eval_at(&self, x: usize) -> Complex<T> {
        let n = self.domain_size;
        let tau = T::TAU();
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &(m, c)| {
                let phase = tau * T::of_usize((m * (x % n)) % n) / T::of_usize(n);
                acc + c * Complex::from_polar(T::one(), phase)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn dense(p: &TrigPoly<f64>) -> Vec<Complex<f64>> {
        (0..p.domain_size()).map(|x| p.eval_at(x)).collect()
    }

    #[test]
    fn empty_and_constant() {
        let z = TrigPoly::<f64>::zero(5).unwrap();
        assert!(z.eval().unwrap().is_zero());
        let one = TrigPoly::new(7, vec![(0, Complex::new(1.0, 0.0))]).unwrap();
        for v in one.eval().unwrap().values() {
            assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn fast_eval_matches_direct_sum() {
        let mut rng = crate::seed::rng_from_seed(4);
        for n in [1usize, 2, 17, 32, 45] {
            let terms = (0..12)
                .map(|_| {
                    (
                        rng.random_range(0..n),
                        Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    )
                })
                .collect();
            let p = TrigPoly::new(n, terms).unwrap();
            let fast = p.eval().unwrap();
            for (a, b) in fast.values().iter().zip(dense(&p)) {
                assert!((a - b).norm() < 1e-12, "N = {n}");
            }
        }
    }

    #[test]
    fn canonicalize_merges_duplicates() {
        let p = TrigPoly::new(
            8,
            vec![
                (3, Complex::new(1.0, 0.0)),
                (1, Complex::new(0.0, 1.0)),
                (3, Complex::new(0.5, -1.0)),
            ],
        )
        .unwrap();
        assert_eq!(p.degree(), 2);
        assert!(!p.is_canonical());
        let c = p.canonicalize();
        assert!(c.is_canonical());
        assert_eq!(
            c.terms(),
            &[(1, Complex::new(0.0, 1.0)), (3, Complex::new(1.5, -1.0))]
        );
        let (a, b) = (p.eval().unwrap(), c.eval().unwrap());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(matches!(
            TrigPoly::new(4, vec![(4, Complex::new(1.0, 0.0))]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            TrigPoly::new(4, vec![(0, Complex::new(f64::NAN, 0.0))]),
            Err(Error::NonFinite { index: 0 })
        ));
        assert_eq!(TrigPoly::<f64>::zero(0).unwrap_err(), Error::EmptyDomain);
    }
}
