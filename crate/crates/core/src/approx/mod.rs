//! Sparse trigonometric approximation: randomized approximants in L¹, L² and
//! L∞, large-spectrum truncation, and fixed-point encoding of the result.

mod poly;
mod quantize;
mod random;
mod sampler;
mod truncate;

pub use poly::TrigPoly;
pub use quantize::{
    fraction_bits, frequency_bits, l2_distance, rate_distortion_encode, rate_shape, QuantizedPoly,
    RateDistortion,
};
pub use random::{
    approx_l1, approx_l2, approx_linf, approximate, degree_above, random_approximant, ApproxConfig,
    ApproxNorm, ApproxOutcome, Approximator,
};
pub use sampler::{sample_frequency, FrequencySampler};
pub use truncate::{large_spectrum, spectral_truncation, SpectralTruncation};
