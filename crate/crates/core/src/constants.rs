//! Monte-Carlo estimates of the Talagrand constant `C_T` and the Bourgain
//! constant `C(q)` over random ("generic") subsets of ℤ_N.
//!
//! For a set `M` the test function is `h = 1_M` in the time domain, so `ĥ` is
//! the random exponential sum `N^{-1/2} Σ_{x∈M} e^{-2πixm/N}`. The two ratios
//! are
//!
//! * `talagrand = ‖ĥ‖_{L²(μ)} / ‖ĥ‖_{L¹(μ)}`
//! * `bourgain  = ‖ĥ‖_{Lq(μ)} / ‖ĥ‖_{L²(μ)}`
//!
//! and Hölder gives `talagrand ≤ bourgain^{q/(q-2)}` for every draw.

use num_complex::Complex;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::norms::lp_mu_norm;
use crate::seed::{child_seed, rng_from_seed};
use crate::signal::IndexSet;
use crate::stats::percentile;
use crate::transform::DftPlan;

fn check_q(q: f64) -> Result<()> {
    if !(q > 2.0) || q.is_infinite() {
        return Err(invalid("q", q, "exponent must be finite and > 2"));
    }
    Ok(())
}

/// `⌈N^{2/q}⌉`, capped at `N`.
pub fn generic_set_size(domain_size: usize, q: f64) -> Result<usize> {
    check_q(q)?;
    if domain_size == 0 {
        return Err(Error::EmptyDomain);
    }
    // Guard against 10⁴^{1/2} landing on 100.00000000000001.
    let target = (domain_size as f64).powf(2.0 / q);
    let size = (target - 1e-9 * target).ceil() as usize;
    Ok(size.clamp(1, domain_size))
}

/// Uniformly random subset of size `⌈N^{2/q}⌉`.
pub fn generic_set(domain_size: usize, q: f64, seed: u64) -> Result<IndexSet> {
    let size = generic_set_size(domain_size, q)?;
    let mut rng = rng_from_seed(seed);
    IndexSet::new(domain_size, sample(&mut rng, domain_size, size).into_vec())
}

/// Each element kept independently with probability `N^{2/q} / N`, so the
/// expected size matches [`generic_set`]. May be empty.
pub fn generic_set_bernoulli(domain_size: usize, q: f64, seed: u64) -> Result<IndexSet> {
    check_q(q)?;
    if domain_size == 0 {
        return Err(Error::EmptyDomain);
    }
    let n = domain_size as f64;
    let p = (n.powf(2.0 / q) / n).min(1.0);
    let mut rng = rng_from_seed(seed);
    let members = (0..domain_size).filter(|_| rng.random_bool(p)).collect();
    IndexSet::new(domain_size, members)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericSampler {
    #[default]
    FixedSize,
    Bernoulli,
}

fn indicator_transform(plan: &DftPlan<f64>, set: &IndexSet) -> Result<Vec<Complex<f64>>> {
    if set.domain_size() != plan.domain_size() {
        return Err(Error::LengthMismatch {
            expected: plan.domain_size(),
            found: set.domain_size(),
        });
    }
    if set.is_empty() {
        return Err(Error::EmptyMask);
    }
    let mut buffer = vec![Complex::new(0.0, 0.0); plan.domain_size()];
    for x in set.iter() {
        buffer[x] = Complex::new(1.0, 0.0);
    }
    plan.forward_in_place(&mut buffer)?;
    Ok(buffer)
}

/// `‖ĥ‖_{L²(μ)} / ‖ĥ‖_{L¹(μ)}` for `h = 1_M`.
pub fn talagrand_ratio(set: &IndexSet) -> Result<f64> {
    talagrand_ratio_with(&DftPlan::new(set.domain_size())?, set)
}

pub fn talagrand_ratio_with(plan: &DftPlan<f64>, set: &IndexSet) -> Result<f64> {
    let h_hat = indicator_transform(plan, set)?;
    Ok(lp_mu_norm(&h_hat, 2.0)? / lp_mu_norm(&h_hat, 1.0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BourgainRatio {
    /// `‖ĥ‖_{Lq(μ)} / ‖ĥ‖_{L²(μ)}`.
    pub ratio: f64,
    /// `ratio^{q/(q-2)}`.
    pub ratio_exp: f64,
}

pub fn bourgain_ratio(set: &IndexSet, q: f64) -> Result<BourgainRatio> {
    bourgain_ratio_with(&DftPlan::new(set.domain_size())?, set, q)
}

pub fn bourgain_ratio_with(plan: &DftPlan<f64>, set: &IndexSet, q: f64) -> Result<BourgainRatio> {
    check_q(q)?;
    let h_hat = indicator_transform(plan, set)?;
    Ok(bourgain_from_transform(&h_hat, q))
}

fn bourgain_from_transform(h_hat: &[Complex<f64>], q: f64) -> BourgainRatio {
    let l2 = lp_mu_norm(h_hat, 2.0).expect("finite exponent");
    let ratio = lp_mu_norm(h_hat, q).expect("finite exponent") / l2;
    BourgainRatio {
        ratio,
        ratio_exp: ratio.powf(q / (q - 2.0)),
    }
}

/// Both ratios for one set from a single transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetRatios {
    pub set_size: usize,
    pub talagrand: f64,
    pub bourgain: BourgainRatio,
}

pub fn set_ratios(plan: &DftPlan<f64>, set: &IndexSet, q: f64) -> Result<SetRatios> {
    check_q(q)?;
    let h_hat = indicator_transform(plan, set)?;
    let talagrand = lp_mu_norm(&h_hat, 2.0)? / lp_mu_norm(&h_hat, 1.0)?;
    Ok(SetRatios {
        set_size: set.len(),
        talagrand,
        bourgain: bourgain_from_transform(&h_hat, q),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantConfig {
    pub n_grid: Vec<usize>,
    pub q_grid: Vec<f64>,
    pub trials: usize,
    pub percentile: f64,
    pub seed: u64,
    pub sampler: GenericSampler,
}

impl Default for ConstantConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![100, 1_000, 10_000],
            q_grid: vec![3.0, 3.25, 3.5, 3.75, 4.0],
            trials: 10_000,
            percentile: 90.0,
            seed: 0,
            sampler: GenericSampler::FixedSize,
        }
    }
}

/// Percentile estimates on an `N × q` grid; matrices are indexed
/// `[n_index][q_index]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub n_grid: Vec<usize>,
    pub q_grid: Vec<f64>,
    pub trials: usize,
    pub percentile: f64,
    pub seed: u64,
    pub sampler: GenericSampler,
    pub ct_estimates: Vec<Vec<f64>>,
    pub cq_estimates: Vec<Vec<f64>>,
    pub cq_exp_estimates: Vec<Vec<f64>>,
    /// Draws with `talagrand > bourgain^{q/(q-2)}` beyond rounding; zero
    /// unless something is broken.
    pub holder_violations: Vec<Vec<usize>>,
    /// Mean `|M|` over the draws (constant for the fixed-size sampler).
    pub mean_set_sizes: Vec<Vec<f64>>,
}

impl ConstantEstimate {
    pub fn total_holder_violations(&self) -> usize {
        self.holder_violations.iter().flatten().sum()
    }

    /// `ct ≤ cq_exp` entrywise.
    pub fn ct_below_cq_exp(&self) -> bool {
        self.ct_estimates
            .iter()
            .flatten()
            .zip(self.cq_exp_estimates.iter().flatten())
            .all(|(ct, cq)| *ct <= cq + 1e-9)
    }
}

/// Draws used for one grid cell; exposed for callers that want the raw
/// samples rather than percentiles.
pub fn sample_set_ratios(
    plan: &DftPlan<f64>,
    q: f64,
    trials: usize,
    seed: u64,
    sampler: GenericSampler,
) -> Result<Vec<SetRatios>> {
    let n = plan.domain_size();
    (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let cell_seed = child_seed(seed, &[n as u64, q.to_bits(), trial]);
            let set = match sampler {
                GenericSampler::FixedSize => generic_set(n, q, cell_seed)?,
                GenericSampler::Bernoulli => {
                    // Redraw the (rare) empty set deterministically.
                    let mut attempt = 0u64;
                    loop {
                        let s = generic_set_bernoulli(n, q, child_seed(cell_seed, &[attempt]))?;
                        if !s.is_empty() {
                            break s;
                        }
                        attempt += 1;
                    }
                }
            };
            set_ratios(plan, &set, q)
        })
        .collect()
}

pub fn estimate_constants(
    n_grid: &[usize],
    q_grid: &[f64],
    trials: usize,
    pct: f64,
    seed: u64,
) -> Result<ConstantEstimate> {
    estimate_constants_with(&ConstantConfig {
        n_grid: n_grid.to_vec(),
        q_grid: q_grid.to_vec(),
        trials,
        percentile: pct,
        seed,
        sampler: GenericSampler::FixedSize,
    })
}

pub fn estimate_constants_with(cfg: &ConstantConfig) -> Result<ConstantEstimate> {
    if cfg.n_grid.is_empty() || cfg.q_grid.is_empty() {
        return Err(Error::Degenerate(
            "constant grid needs at least one N and one q",
        ));
    }
    if cfg.trials < 100 {
        return Err(invalid(
            "trials",
            cfg.trials as f64,
            "need at least 100 draws per cell",
        ));
    }
    if !(cfg.percentile > 0.0 && cfg.percentile < 100.0) {
        return Err(invalid(
            "percentile",
            cfg.percentile,
            "must lie in (0, 100)",
        ));
    }
    for &q in &cfg.q_grid {
        check_q(q)?;
    }
    let rows = cfg.n_grid.len();
    let cols = cfg.q_grid.len();
    let mut out = ConstantEstimate {
        n_grid: cfg.n_grid.clone(),
        q_grid: cfg.q_grid.clone(),
        trials: cfg.trials,
        percentile: cfg.percentile,
        seed: cfg.seed,
        sampler: cfg.sampler,
        ct_estimates: vec![vec![0.0; cols]; rows],
        cq_estimates: vec![vec![0.0; cols]; rows],
        cq_exp_estimates: vec![vec![0.0; cols]; rows],
        holder_violations: vec![vec![0; cols]; rows],
        mean_set_sizes: vec![vec![0.0; cols]; rows],
    };
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        if n < 2 {
            return Err(invalid("N", n as f64, "grid sizes must be at least 2"));
        }
        let plan = DftPlan::new(n)?;
        for (j, &q) in cfg.q_grid.iter().enumerate() {
            let draws = sample_set_ratios(&plan, q, cfg.trials, cfg.seed, cfg.sampler)?;
            let ct: Vec<f64> = draws.iter().map(|d| d.talagrand).collect();
            let cq: Vec<f64> = draws.iter().map(|d| d.bourgain.ratio).collect();
            let cq_exp: Vec<f64> = draws.iter().map(|d| d.bourgain.ratio_exp).collect();
            let pick = |v: &[f64]| percentile(v, cfg.percentile).expect("nonempty draws");
            out.ct_estimates[i][j] = pick(&ct);
            out.cq_estimates[i][j] = pick(&cq);
            out.cq_exp_estimates[i][j] = pick(&cq_exp);
            out.holder_violations[i][j] = draws
                .iter()
                .filter(|d| d.talagrand > d.bourgain.ratio_exp * (1.0 + 1e-9) + 1e-9)
                .count();
            out.mean_set_sizes[i][j] =
                draws.iter().map(|d| d.set_size as f64).sum::<f64>() / draws.len() as f64;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcentrationRegime {
    /// Factor `C_T √(ln N · ln ln N)`.
    Log,
    /// Factor `C_T`, valid when `|M| ≤ N^{1-ε}`.
    PowerLaw,
}

/// Lower bound on `FR(f)` when a fraction `1 - r` of `‖f‖₂` sits on a
/// generic set: `√N ((1-r) - rL) / L` with `L` the regime factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationBound {
    pub r: f64,
    pub domain_size: usize,
    pub regime: ConcentrationRegime,
    pub c_t: f64,
    pub factor: f64,
    /// `r < (1-r)/L`. When false the value is still reported but is `≤ 0`.
    pub restriction_ok: bool,
    pub value: f64,
}

pub fn concentration_fr_bound(
    r: f64,
    domain_size: usize,
    regime: ConcentrationRegime,
    c_t: f64,
) -> Result<ConcentrationBound> {
    if !(0.0..1.0).contains(&r) {
        return Err(invalid("r", r, "must lie in [0, 1)"));
    }
    if !(c_t > 0.0) || c_t.is_infinite() {
        return Err(invalid("c_t", c_t, "must be finite and positive"));
    }
    let n = domain_size as f64;
    let factor = match regime {
        ConcentrationRegime::PowerLaw => c_t,
        ConcentrationRegime::Log => {
            let lnln = n.ln().ln();
            if !(lnln > 0.0) {
                return Err(invalid("N", n, "log regime needs N >= 3"));
            }
            c_t * (n.ln() * lnln).sqrt()
        }
    };
    Ok(ConcentrationBound {
        r,
        domain_size,
        regime,
        c_t,
        factor,
        restriction_ok: r < (1.0 - r) / factor,
        value: n.sqrt() * ((1.0 - r) - r * factor) / factor,
    })
}
