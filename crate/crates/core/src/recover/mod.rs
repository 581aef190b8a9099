//! Recovery of missing samples and estimates computed from random
//! restrictions.

mod mask;
mod restriction;
mod solver;
mod sweep;

pub use mask::{sample_bernoulli, sample_uniform, SampleMask, SamplingScheme};
pub use restriction::{
    restricted_fr, restricted_fr_with, restriction_coverage, unimodular_signal, RestrictedEstimate,
    RestrictionCoverage,
};
pub use solver::{
    certified_bounds, impute, CertifiedBounds, ImputationResult, SolverConfig, RECOVERY_CONSTANT,
};
pub use sweep::{
    recovery_sweep, sparse_recovery_trial, sparse_spectrum_signal, RecoveryPoint, RecoverySweep,
    RecoverySweepConfig, RecoveryTrial,
};
