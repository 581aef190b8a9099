//! The Fourier ratio `FR(f) = ‖f̂‖₁ / ‖f̂‖₂` and related complexity measures.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::norms::{lp_norm, restricted_lp_norm};
use crate::scalar::Real;
use crate::signal::{IndexSet, Signal, Spectrum};
use crate::transform::DftPlan;

/// `‖g‖₁ / ‖g‖₂` of a raw coefficient vector; errors on the zero vector.
pub fn l1_l2_ratio<T: Real>(g: &(impl AsRef<[Complex<T>]> + ?Sized)) -> Result<T> {
    let l2 = lp_norm(g, T::of(2.0))?;
    if l2 == T::zero() {
        return Err(Error::ZeroSignal);
    }
    Ok(lp_norm(g, T::one())? / l2)
}

/// Fourier ratio of `f`.
pub fn fourier_ratio<T: Real>(f: &Signal<T>) -> Result<T> {
    fourier_ratio_with(&DftPlan::new(f.domain_size())?, f)
}

/// Fourier ratio using a prepared transform plan.
pub fn fourier_ratio_with<T: Real>(plan: &DftPlan<T>, f: &Signal<T>) -> Result<T> {
    l1_l2_ratio(&plan.dft(f)?)
}

/// Fourier ratio of a signal whose spectrum is already known.
pub fn fourier_ratio_of_spectrum<T: Real>(spectrum: &Spectrum<T>) -> Result<T> {
    l1_l2_ratio(spectrum)
}

/// `FR(f)`, `FR(f̂)` and their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiFourierRatio<T> {
    pub bi_fr: T,
    pub fr: T,
    pub fr_hat: T,
}

/// `min(FR(f), FR(f̂))`, where `FR(f̂)` transforms `f̂` a second time as if it
/// were a time-domain signal.
pub fn bi_fourier_ratio<T: Real>(f: &Signal<T>) -> Result<BiFourierRatio<T>> {
    let plan = DftPlan::new(f.domain_size())?;
    let spectrum = plan.dft(f)?;
    let fr = l1_l2_ratio(&spectrum)?;
    let fr_hat = l1_l2_ratio(&plan.dft(&spectrum.into_signal())?)?;
    Ok(BiFourierRatio {
        bi_fr: fr.min(fr_hat),
        fr,
        fr_hat,
    })
}

/// `μ(f) = N ‖f‖∞² / ‖f‖₂²`, in `[1, N]`.
pub fn coherence<T: Real>(f: &Signal<T>) -> Result<T> {
    let l2 = lp_norm(f, T::of(2.0))?;
    if l2 == T::zero() {
        return Err(Error::ZeroSignal);
    }
    let linf = lp_norm(f, T::infinity())?;
    Ok(T::of_usize(f.domain_size()) * (linf / l2).powi(2))
}

/// `ns(g) = (‖g‖₁ / ‖g‖₂)²`.
pub fn numerical_sparsity<T: Real>(g: &(impl AsRef<[Complex<T>]> + ?Sized)) -> Result<T> {
    Ok(l1_l2_ratio(g)?.powi(2))
}

/// Summary of the complexity measures of one signal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrReport<T> {
    pub fr: T,
    pub fr_hat: T,
    pub bi_fr: T,
    pub coherence: T,
    pub numerical_sparsity: T,
    pub l1_spectral_norm: T,
    pub l2_norm: T,
    pub domain_size: usize,
}

impl<T: Real> FrReport<T> {
    pub fn analyze(f: &Signal<T>) -> Result<Self> {
        let plan = DftPlan::new(f.domain_size())?;
        let spectrum = plan.dft(f)?;
        let fr = l1_l2_ratio(&spectrum)?;
        let fr_hat = l1_l2_ratio(&plan.dft(&spectrum.clone().into_signal())?)?;
        Ok(Self {
            fr,
            fr_hat,
            bi_fr: fr.min(fr_hat),
            coherence: coherence(f)?,
            numerical_sparsity: numerical_sparsity(&spectrum)?,
            l1_spectral_norm: lp_norm(&spectrum, T::one())?,
            l2_norm: lp_norm(f, T::of(2.0))?,
            domain_size: f.domain_size(),
        })
    }
}

/// Concentration defects of `f` on `E` (time, L²) and of `f̂` on `S`
/// (frequency, L¹).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationLevels<T> {
    /// `‖f‖_{L²(Eᶜ)} / ‖f‖₂`.
    pub a: T,
    /// `‖f̂‖_{L¹(Sᶜ)} / ‖f̂‖₁`.
    pub b: T,
    pub e_size: usize,
    pub s_size: usize,
    pub domain_size: usize,
}

pub fn concentration_levels<T: Real>(
    f: &Signal<T>,
    e: &IndexSet,
    s: &IndexSet,
) -> Result<ConcentrationLevels<T>> {
    let spectrum = crate::transform::dft(f)?;
    concentration_levels_with_spectrum(f, &spectrum, e, s)
}

fn concentration_levels_with_spectrum<T: Real>(
    f: &Signal<T>,
    spectrum: &Spectrum<T>,
    e: &IndexSet,
    s: &IndexSet,
) -> Result<ConcentrationLevels<T>> {
    let two = T::of(2.0);
    let l2 = lp_norm(f, two)?;
    if l2 == T::zero() {
        return Err(Error::ZeroSignal);
    }
    let a = restricted_lp_norm(f, &e.complement(), two)? / l2;
    let b = restricted_lp_norm(spectrum, &s.complement(), T::one())? / lp_norm(spectrum, T::one())?;
    Ok(ConcentrationLevels {
        a: a.min(T::one()),
        b: b.min(T::one()),
        e_size: e.len(),
        s_size: s.len(),
        domain_size: f.domain_size(),
    })
}

/// Both sides of `(1-a)² N/|E| ≤ FR(f)² ≤ |S|/(1-b)²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintyCheck<T> {
    pub levels: ConcentrationLevels<T>,
    pub lower: T,
    pub fr_sq: T,
    /// `+∞` when `b = 1`.
    pub upper: T,
    pub lower_vacuous: bool,
    pub upper_vacuous: bool,
    pub holds: bool,
}

/// Evaluates the Fourier-ratio uncertainty bounds for concentration sets
/// `E` (time) and `S` (frequency). `holds` must be true for every input.
pub fn uncertainty_check<T: Real>(
    f: &Signal<T>,
    e: &IndexSet,
    s: &IndexSet,
) -> Result<UncertaintyCheck<T>> {
    if e.is_empty() {
        return Err(Error::Degenerate("time concentration set E is empty"));
    }
    let spectrum = crate::transform::dft(f)?;
    let levels = concentration_levels_with_spectrum(f, &spectrum, e, s)?;
    let one = T::one();
    let n = T::of_usize(f.domain_size());
    let fr_sq = l1_l2_ratio(&spectrum)?.powi(2);
    let lower = (one - levels.a).powi(2) * n / T::of_usize(e.len());
    let upper_vacuous = levels.b >= one;
    let upper = if upper_vacuous {
        T::infinity()
    } else {
        T::of_usize(s.len()) / (one - levels.b).powi(2)
    };
    let tol = T::check_tol();
    let holds = lower <= fr_sq * (one + tol) && fr_sq <= upper * (one + tol);
    Ok(UncertaintyCheck {
        lower_vacuous: levels.a >= one,
        levels,
        lower,
        fr_sq,
        upper,
        upper_vacuous,
        holds,
    })
}

/// `√(N / |supp f|)`, a lower bound for `FR(f)`. Entries with modulus at most
/// `threshold` count as outside the support; pass zero for the exact support.
pub fn support_lower_bound<T: Real>(f: &Signal<T>, threshold: T) -> Result<T> {
    if threshold.is_nan() || threshold < T::zero() {
        return Err(invalid("threshold", threshold.as_f64(), "must be >= 0"));
    }
    let support = f.values().iter().filter(|z| z.norm() > threshold).count();
    if support == 0 {
        return Err(Error::ZeroSignal);
    }
    Ok((T::of_usize(f.domain_size()) / T::of_usize(support)).sqrt())
}

/// Base-2 logarithm of the statistical-query dimension bound for the class of
/// ±1 signals with Fourier ratio at most `r`:
/// `ε^{-d} (e/d)^d N^d` with `d = r²/ε²` and `ε = 1/(4(1+2r))`.
pub fn sq_dimension_log2_bound<T: Real>(r: T, domain_size: usize) -> Result<T> {
    if r.is_nan() || r < T::one() {
        return Err(invalid("r", r.as_f64(), "Fourier ratio bound must be >= 1"));
    }
    if domain_size == 0 {
        return Err(Error::EmptyDomain);
    }
    let one = T::one();
    let eps = one / (T::of(4.0) * (one + T::of(2.0) * r));
    let d = (r / eps).powi(2);
    let n = T::of_usize(domain_size);
    Ok(d * ((one / eps).log2() + (T::E() / d).log2() + n.log2()))
}
