//! ℓᵖ norms and their probability-normalized counterparts
//! `‖g‖_{Lᵖ(μ)} = (N⁻¹ Σ |g|ᵖ)^{1/p}`.
//!
//! Exponents are passed as a real `p >= 1`; `T::infinity()` selects the
//! supremum norm.

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::signal::IndexSet;

fn check_exponent<T: Real>(p: T) -> Result<()> {
    if p.is_nan() || p < T::one() {
        return Err(invalid(
            "p",
            p.as_f64(),
            "exponent must be >= 1 or infinite",
        ));
    }
    Ok(())
}

fn norm_of_moduli<T: Real>(moduli: impl Iterator<Item = T> + Clone, p: T) -> T {
    if p.is_infinite() {
        return moduli.fold(T::zero(), T::max);
    }
    if p == T::one() {
        return moduli.sum();
    }
    // Rescale by the largest modulus so large exponents cannot overflow.
    let peak = moduli.clone().fold(T::zero(), T::max);
    if peak == T::zero() {
        return T::zero();
    }
    if p == T::of(2.0) {
        let s: T = moduli.map(|a| (a / peak) * (a / peak)).sum();
        return peak * s.sqrt();
    }
    let s: T = moduli.map(|a| (a / peak).powf(p)).sum();
    peak * s.powf(p.recip())
}

/// `(Σ_x |g(x)|ᵖ)^{1/p}`, or `max |g|` for infinite `p`.
pub fn lp_norm<T: Real>(g: &(impl AsRef<[Complex<T>]> + ?Sized), p: T) -> Result<T> {
    check_exponent(p)?;
    Ok(norm_of_moduli(g.as_ref().iter().map(|z| z.norm()), p))
}

/// `N^{-1/p} ‖g‖_p`; equal to the ℓ^∞ norm for infinite `p`.
pub fn lp_mu_norm<T: Real>(g: &(impl AsRef<[Complex<T>]> + ?Sized), p: T) -> Result<T> {
    let norm = lp_norm(g, p)?;
    if p.is_infinite() {
        return Ok(norm);
    }
    let n = T::of_usize(g.as_ref().len());
    Ok(norm * n.powf(-p.recip()))
}

/// ℓᵖ norm of `g` summed over the members of `set` only. The empty set gives 0.
pub fn restricted_lp_norm<T: Real>(
    g: &(impl AsRef<[Complex<T>]> + ?Sized),
    set: &IndexSet,
    p: T,
) -> Result<T> {
    check_exponent(p)?;
    let values = g.as_ref();
    set.check_domain(values.len())?;
    Ok(norm_of_moduli(set.iter().map(|i| values[i].norm()), p))
}
