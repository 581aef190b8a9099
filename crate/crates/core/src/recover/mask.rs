//! Random sampling masks.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::seed::rng_from_seed;
use crate::signal::IndexSet;

/// How a mask was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SamplingScheme {
    /// `q` independent uniform draws, duplicates collapsed.
    UniformQ { q: usize },
    /// Each index kept independently with probability `p`.
    BernoulliP { p: f64 },
    /// Supplied by the caller.
    Given,
}

/// Observed index set together with how it was drawn.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleMask {
    pub indices: IndexSet,
    pub scheme: SamplingScheme,
    pub seed: Option<u64>,
}

impl SampleMask {
    pub fn given(indices: IndexSet) -> Self {
        Self {
            indices,
            scheme: SamplingScheme::Given,
            seed: None,
        }
    }

    pub fn domain_size(&self) -> usize {
        self.indices.domain_size()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `|X| / N`.
    pub fn fraction(&self) -> f64 {
        self.indices.len() as f64 / self.domain_size() as f64
    }
}

pub fn sample_uniform(domain_size: usize, q: usize, seed: u64) -> Result<SampleMask> {
    if q == 0 {
        return Err(invalid("q", 0.0, "need at least one sample"));
    }
    if domain_size == 0 {
        return Err(crate::error::Error::EmptyDomain);
    }
    let mut rng = rng_from_seed(seed);
    let draws = (0..q).map(|_| rng.random_range(0..domain_size)).collect();
    Ok(SampleMask {
        indices: IndexSet::new(domain_size, draws)?,
        scheme: SamplingScheme::UniformQ { q },
        seed: Some(seed),
    })
}

pub fn sample_bernoulli(domain_size: usize, p: f64, seed: u64) -> Result<SampleMask> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p", p, "must lie in (0, 1]"));
    }
    if domain_size == 0 {
        return Err(crate::error::Error::EmptyDomain);
    }
    let mut rng = rng_from_seed(seed);
    let kept = (0..domain_size).filter(|_| rng.random_bool(p)).collect();
    Ok(SampleMask {
        indices: IndexSet::new(domain_size, kept)?,
        scheme: SamplingScheme::BernoulliP { p },
        seed: Some(seed),
    })
}
