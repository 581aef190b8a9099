//! Time- and frequency-domain containers on the cyclic group of order N, and
//! index subsets of it.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

fn validate<T: Real>(values: &[Complex<T>]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if let Some(index) = values
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

macro_rules! complex_series {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize)]
        pub struct $name<T = f64> {
            values: Vec<Complex<T>>,
        }

        impl<T: Real> $name<T> {
            /// Validates length `N >= 1` and that every entry is finite.
            pub fn new(values: Vec<Complex<T>>) -> Result<Self> {
                validate(&values)?;
                Ok(Self { values })
            }

            /// Real-valued data with zero imaginary part.
            pub fn from_real(values: &[T]) -> Result<Self> {
                Self::new(values.iter().map(|&v| Complex::new(v, T::zero())).collect())
            }

            pub fn zeros(domain_size: usize) -> Result<Self> {
                Self::new(vec![Complex::new(T::zero(), T::zero()); domain_size])
            }

            /// Builds `g(x)` for every `x` in `[0, N)`.
            pub fn from_fn(domain_size: usize, g: impl FnMut(usize) -> Complex<T>) -> Result<Self> {
                Self::new((0..domain_size).map(g).collect())
            }

            pub(crate) fn from_vec_unchecked(values: Vec<Complex<T>>) -> Self {
                debug_assert!(validate(&values).is_ok());
                Self { values }
            }

            #[inline]
            pub fn domain_size(&self) -> usize {
                self.values.len()
            }

            #[inline]
            pub fn values(&self) -> &[Complex<T>] {
                &self.values
            }

            pub fn into_values(self) -> Vec<Complex<T>> {
                self.values
            }

            pub fn is_zero(&self) -> bool {
                self.values.iter().all(|z| z.re == T::zero() && z.im == T::zero())
            }

            /// Multiplies every entry by `alpha`.
            pub fn scaled(&self, alpha: Complex<T>) -> Self {
                Self::from_vec_unchecked(self.values.iter().map(|&z| z * alpha).collect())
            }

            /// Entrywise sum; both operands must share the domain.
            pub fn add(&self, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a + b)
            }

            /// Entrywise difference; both operands must share the domain.
            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a - b)
            }

            fn zip_with(
                &self,
                other: &Self,
                op: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
            ) -> Result<Self> {
                if self.domain_size() != other.domain_size() {
                    return Err(Error::LengthMismatch {
                        expected: self.domain_size(),
                        found: other.domain_size(),
                    });
                }
                Self::new(
                    self.values
                        .iter()
                        .zip(&other.values)
                        .map(|(&a, &b)| op(a, b))
                        .collect(),
                )
            }

            /// Zeroes every entry outside `set`.
            pub fn restricted_to(&self, set: &IndexSet) -> Result<Self> {
                set.check_domain(self.domain_size())?;
                let mut values = vec![Complex::new(T::zero(), T::zero()); self.domain_size()];
                for &i in set.members() {
                    values[i] = self.values[i];
                }
                Ok(Self::from_vec_unchecked(values))
            }

            /// Indicator function of `set`.
            pub fn indicator(set: &IndexSet) -> Self {
                let mut values = vec![Complex::new(T::zero(), T::zero()); set.domain_size()];
                for &i in set.members() {
                    values[i] = Complex::new(T::one(), T::zero());
                }
                Self::from_vec_unchecked(values)
            }
        }

        impl<T> AsRef<[Complex<T>]> for $name<T> {
            fn as_ref(&self) -> &[Complex<T>] {
                &self.values
            }
        }
    };
}

complex_series!(
    /// A complex-valued function on ℤ_N in the time domain.
    Signal
);

complex_series!(
    /// A complex-valued function on ℤ_N in the frequency domain, as produced
    /// by the unitary DFT.
    Spectrum
);

impl<T: Real> Spectrum<T> {
    /// Reinterprets the spectrum as a time-domain signal, for transforming
    /// it a second time.
    pub fn into_signal(self) -> Signal<T> {
        Signal::from_vec_unchecked(self.values)
    }
}

impl<T: Real> Signal<T> {
    /// Reinterprets the signal as frequency-domain data.
    pub fn into_spectrum(self) -> Spectrum<T> {
        Spectrum::from_vec_unchecked(self.values)
    }
}

/// Sorted, duplicate-free subset of `[0, N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IndexSet {
    members: Vec<usize>,
    domain_size: usize,
}

impl IndexSet {
    /// Accepts members in any order; duplicates are collapsed.
    pub fn new(domain_size: usize, mut members: Vec<usize>) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::EmptyDomain);
        }
        if let Some(&index) = members.iter().find(|&&i| i >= domain_size) {
            return Err(Error::IndexOutOfRange { index, domain_size });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self {
            members,
            domain_size,
        })
    }

    pub fn empty(domain_size: usize) -> Result<Self> {
        Self::new(domain_size, Vec::new())
    }

    pub fn full(domain_size: usize) -> Result<Self> {
        Self::new(domain_size, (0..domain_size).collect())
    }

    /// Members of a boolean mask.
    pub fn from_mask(mask: &[bool]) -> Result<Self> {
        Self::new(
            mask.len(),
            mask.iter()
                .enumerate()
                .filter_map(|(i, &keep)| keep.then_some(i))
                .collect(),
        )
    }

    /// The arithmetic progression `{0, step, 2 step, ...}` inside ℤ_N.
    /// With `N = p q` and `step = q` this is the embedded copy of ℤ_p.
    pub fn multiples(domain_size: usize, step: usize) -> Result<Self> {
        if step == 0 {
            return Self::new(domain_size, vec![0]);
        }
        Self::new(domain_size, (0..domain_size).step_by(step).collect())
    }

    #[inline]
    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    #[inline]
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, usize>> {
        self.members.iter().copied()
    }

    pub fn complement(&self) -> Self {
        let mask = self.to_mask();
        Self {
            members: (0..self.domain_size).filter(|&i| !mask[i]).collect(),
            domain_size: self.domain_size,
        }
    }

    pub fn to_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.domain_size];
        for &i in &self.members {
            mask[i] = true;
        }
        mask
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.domain_size == other.domain_size && self.members.iter().all(|&i| other.contains(i))
    }

    pub(crate) fn check_domain(&self, domain_size: usize) -> Result<()> {
        if self.domain_size != domain_size {
            return Err(Error::LengthMismatch {
                expected: domain_size,
                found: self.domain_size,
            });
        }
        Ok(())
    }
}
