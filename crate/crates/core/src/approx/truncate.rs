//! Deterministic approximation by keeping only the large Fourier coefficients.

use serde::Serialize;

use super::poly::TrigPoly;
use crate::error::{invalid, Error, Result};
use crate::norms::lp_norm;
use crate::scalar::Real;
use crate::signal::{IndexSet, Signal, Spectrum};
use crate::transform::DftPlan;

fn check_eta<T: Real>(eta: T) -> Result<()> {
    if !(eta > T::zero()) || eta.is_infinite() {
        return Err(invalid("eta", eta.as_f64(), "must be positive and finite"));
    }
    Ok(())
}

fn large_spectrum_of<T: Real>(f: &Signal<T>, spectrum: &Spectrum<T>, eta: T) -> Result<IndexSet> {
    let n = f.domain_size();
    let l2 = lp_norm(f, T::of(2.0))?;
    if l2 == T::zero() {
        return Err(Error::ZeroSignal);
    }
    let cutoff = eta * l2 / T::of_usize(n).sqrt();
    let members = spectrum
        .values()
        .iter()
        .enumerate()
        .filter_map(|(m, z)| (z.norm() >= cutoff).then_some(m))
        .collect();
    IndexSet::new(n, members)
}

/// `Γ = {m : |f̂(m)| ≥ η ‖f‖_{L²(μ)}}`. Always `|Γ| ≤ FR(f) √N / η`.
pub fn large_spectrum<T: Real>(f: &Signal<T>, eta: T) -> Result<IndexSet> {
    check_eta(eta)?;
    large_spectrum_of(f, &crate::transform::dft(f)?, eta)
}

/// Truncation `P = N^{-1/2} Σ_{m∈Γ} f̂(m) χ(mx)` and its exact error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralTruncation<T = f64> {
    pub poly: TrigPoly<T>,
    pub large_spectrum: IndexSet,
    /// `‖f - P‖₂`, the energy of the discarded coefficients.
    pub error: T,
    /// `η ‖f‖₂`, which `error` never exceeds.
    pub bound: T,
}

pub fn spectral_truncation<T: Real>(f: &Signal<T>, eta: T) -> Result<SpectralTruncation<T>> {
    check_eta(eta)?;
    let plan = DftPlan::new(f.domain_size())?;
    let spectrum = plan.dft(f)?;
    let gamma = large_spectrum_of(f, &spectrum, eta)?;
    let scale = T::one() / T::of_usize(f.domain_size()).sqrt();
    let terms = gamma
        .iter()
        .map(|m| (m, spectrum.values()[m] * scale))
        .collect();
    let poly = TrigPoly::from_terms_unchecked(f.domain_size(), terms);
    let error = lp_norm(&f.sub(&poly.eval_with(&plan)?)?, T::of(2.0))?;
    Ok(SpectralTruncation {
        poly,
        large_spectrum: gamma,
        error,
        bound: eta * lp_norm(f, T::of(2.0))?,
    })
}
