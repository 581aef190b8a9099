//! Fourier-side complexity of signals on the cyclic group ℤ_N.
//!
//! The central quantity is the Fourier ratio `FR(f) = ‖f̂‖₁ / ‖f̂‖₂` under the
//! unitary DFT, which lies in `[1, √N]`. Small values mean the signal is
//! close to a short trigonometric polynomial; the modules here measure it and
//! put that to work:
//!
//! * [`transform`], [`norms`]: unitary DFT and ℓᵖ / Lᵖ(μ) norms.
//! * [`fr`]: Fourier ratio, bi-ratio, coherence, numerical sparsity,
//!   uncertainty bounds.
//! * [`approx`]: randomized and deterministic low-degree approximation,
//!   quantized encoding.
//! * [`chang`]: dissociated subsets of the large spectrum.
//! * [`recover`]: ℓ¹ spectral imputation from random samples and restricted
//!   estimators.
//! * [`noise`]: stability of the ratio under perturbation and averaging.
//! * [`constants`]: Monte-Carlo estimates of the Talagrand and Bourgain
//!   constants.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below are the double-precision instantiations used by the CLI.

pub mod approx;
pub mod chang;
pub mod constants;
pub mod error;
pub mod fr;
pub mod noise;
pub mod norms;
pub mod recover;
pub mod scalar;
pub mod seed;
pub mod signal;
pub mod stats;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;
pub use signal::{IndexSet, Signal, Spectrum};
pub use transform::{dft, idft, DftPlan};

pub type Signal64 = Signal<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type Signal32 = Signal<f32>;
pub type Spectrum32 = Spectrum<f32>;
pub type TrigPoly64 = approx::TrigPoly<f64>;
pub type TrigPoly32 = approx::TrigPoly<f32>;
