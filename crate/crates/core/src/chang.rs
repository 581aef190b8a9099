//! Dissociated subsets of large spectra and the generalized Chang bounds.
//!
//! A set Λ ⊂ ℤ_N is dissociated when the only `{-1, 0, 1}` combination of its
//! elements that vanishes mod N is the trivial one. A maximal dissociated
//! subset Λ of Γ spans Γ: every element of Γ is a signed sum of elements of Λ.

use serde::Serialize;

use crate::approx::large_spectrum;
use crate::error::{invalid, Error, Result};
use crate::norms::lp_norm;
use crate::scalar::Real;
use crate::signal::{IndexSet, Signal};

/// Default cap on `|Λ|`; enumeration costs `3^|Λ|`.
pub const DEFAULT_GUARD: usize = 16;
/// Largest accepted cap.
pub const MAX_GUARD: usize = 20;

fn check_guard(guard: usize) -> Result<()> {
    if guard == 0 || guard > MAX_GUARD {
        return Err(invalid("guard", guard as f64, "must lie in [1, 20]"));
    }
    Ok(())
}

/// Visits every `{-1, 0, 1}` combination of `elements` mod `n`, passing the
/// residue and whether the combination is nontrivial. Stops early when the
/// visitor returns false.
fn for_each_signed_sum(elements: &[usize], n: usize, visit: &mut impl FnMut(usize, bool) -> bool) {
    fn walk(
        elements: &[usize],
        n: usize,
        acc: usize,
        nontrivial: bool,
        visit: &mut impl FnMut(usize, bool) -> bool,
    ) -> bool {
        match elements.split_first() {
            None => visit(acc, nontrivial),
            Some((&e, rest)) => {
                let e = e % n;
                walk(rest, n, acc, nontrivial, visit)
                    && walk(rest, n, (acc + e) % n, true, visit)
                    && walk(rest, n, (acc + n - e) % n, true, visit)
            }
        }
    }
    walk(elements, n, 0, false, visit);
}

/// Brute-force dissociation test over all `3^|Λ|` signed sums.
pub fn is_dissociated(lambda: &IndexSet, guard: usize) -> Result<bool> {
    check_guard(guard)?;
    if lambda.len() > guard {
        return Err(Error::GuardExceeded { limit: guard });
    }
    let mut dissociated = true;
    for_each_signed_sum(
        lambda.members(),
        lambda.domain_size(),
        &mut |r, nontrivial| {
            if nontrivial && r == 0 {
                dissociated = false;
            }
            dissociated
        },
    );
    Ok(dissociated)
}

/// Whether every member of Γ is a signed sum of elements of Λ, by enumerating
/// all `3^|Λ|` sums.
pub fn verify_span(gamma: &IndexSet, lambda: &IndexSet, guard: usize) -> Result<bool> {
    check_guard(guard)?;
    gamma.check_domain(lambda.domain_size())?;
    if lambda.len() > guard {
        return Err(Error::GuardExceeded { limit: guard });
    }
    let mut reached = vec![false; lambda.domain_size()];
    for_each_signed_sum(lambda.members(), lambda.domain_size(), &mut |r, _| {
        reached[r] = true;
        true
    });
    Ok(gamma.iter().all(|m| reached[m]))
}

/// Greedy maximal dissociated subset of Γ, scanning Γ in ascending order and
/// adding `m` whenever it lies outside the signed span of the elements kept so
/// far. Fails once more than `guard` elements would be needed.
pub fn maximal_dissociated_subset(gamma: &IndexSet, guard: usize) -> Result<IndexSet> {
    check_guard(guard)?;
    let n = gamma.domain_size();
    let mut span = vec![false; n];
    span[0] = true;
    let mut lambda = Vec::new();
    for m in gamma.iter() {
        if span[m] {
            continue;
        }
        if lambda.len() == guard {
            return Err(Error::GuardExceeded { limit: guard });
        }
        lambda.push(m);
        let prev = span.clone();
        for (r, hit) in prev.iter().enumerate() {
            if *hit {
                span[(r + m) % n] = true;
                span[(r + n - m) % n] = true;
            }
        }
    }
    IndexSet::new(n, lambda)
}

/// Right-hand sides of the two Chang-type bounds with the absolute constant
/// set to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangBounds {
    /// `η⁻² (‖f‖_{p'} / ‖f‖₂)² ln N` with `p' = ln N / (ln N - 1)`.
    pub lognorm: f64,
    /// `η⁻² (‖f‖₁/‖f‖₂)² ln((‖f‖₂/‖f‖₁)² N)`, present only when
    /// `‖f‖₁/‖f‖₂ ≤ √N / e`.
    pub l2l1: Option<f64>,
    pub p_prime: f64,
    pub l1_l2_ratio: f64,
}

pub fn chang_bounds<T: Real>(f: &Signal<T>, eta: T) -> Result<ChangBounds> {
    if !(eta > T::zero()) || eta.is_infinite() {
        return Err(invalid("eta", eta.as_f64(), "must be positive and finite"));
    }
    let n = f.domain_size();
    if n < 3 {
        return Err(invalid("N", n as f64, "bounds need ln N > 1, i.e. N >= 3"));
    }
    let l2 = lp_norm(f, T::of(2.0))?.as_f64();
    if l2 == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let ln_n = (n as f64).ln();
    let p_prime = ln_n / (ln_n - 1.0);
    let lp = lp_norm(f, T::of(p_prime))?.as_f64();
    let eta = eta.as_f64();
    let lognorm = (lp / l2).powi(2) * ln_n / (eta * eta);
    let ratio = lp_norm(f, T::one())?.as_f64() / l2;
    let l2l1 = (ratio <= (n as f64).sqrt() / std::f64::consts::E)
        .then(|| ratio * ratio * (n as f64 / (ratio * ratio)).ln() / (eta * eta));
    Ok(ChangBounds {
        lognorm,
        l2l1,
        p_prime,
        l1_l2_ratio: ratio,
    })
}

/// Large spectrum, a maximal dissociated subset of it, brute-force checks of
/// both defining properties, and the bounds it is measured against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DissociationCertificate {
    pub lambda: IndexSet,
    pub gamma: IndexSet,
    pub span_verified: bool,
    pub dissociation_verified: bool,
    pub bounds: ChangBounds,
    /// `|Λ| / lognorm`, an empirical lower estimate of the absolute constant.
    pub ratio_lognorm: f64,
    pub ratio_l2l1: Option<f64>,
}

pub fn dissociation_certificate<T: Real>(
    f: &Signal<T>,
    eta: T,
    guard: usize,
) -> Result<DissociationCertificate> {
    let gamma = large_spectrum(f, eta)?;
    let lambda = maximal_dissociated_subset(&gamma, guard)?;
    let bounds = chang_bounds(f, eta)?;
    let size = lambda.len() as f64;
    Ok(DissociationCertificate {
        span_verified: verify_span(&gamma, &lambda, guard)?,
        dissociation_verified: is_dissociated(&lambda, guard)?,
        ratio_lognorm: size / bounds.lognorm,
        ratio_l2l1: bounds.l2l1.map(|b| size / b),
        bounds,
        lambda,
        gamma,
    })
}
