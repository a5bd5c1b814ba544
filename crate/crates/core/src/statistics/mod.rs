//! Monte Carlo emulation of the experiment, count analysis with Poisson
//! error bars, bootstrap error propagation and HOM dip analysis.

mod bootstrap;
mod counts;
mod estimators;
mod hom;

pub use bootstrap::{
    b13_with_error, chsh_with_error, parametric_bootstrap, EstimateWithError, MIN_RESAMPLES,
};
pub use counts::{counts_to_table, sample_counts, CountsTable, SHARD_SIZE};
pub use estimators::{
    fidelity_to_visibility, hom_visibility_bound, noise_parameter, qrng_basis_fidelity,
    visibility_estimate,
};
pub use hom::{dip_model, hom_dip_fit, read_dip_csv, DipPoint, HomFit, MIN_POINTS};
