//! The finite-`N` log-gas on the line.
//!
//! Gibbs weight convention: a configuration `x` of `N` points has density
//! proportional to `exp(-(beta / 2) * w_N(x))` with `w_N` from
//! [`hamiltonian`]. With `V(x) = x^2` and `N = 1` this is a centered
//! Gaussian of variance `1 / beta`.

pub mod equilibrium;
pub mod hamiltonian;
pub mod mcmc;
pub mod potential;
pub mod stats;

pub use equilibrium::{equilibrium_oracle, DiscreteMeasure, EquilibriumGrid};
pub use hamiltonian::{fekete_optimize, hamiltonian, hamiltonian_gradient, FeketeResult};
pub use mcmc::{mcmc_sample, McmcOptions, SampleSet};
pub use potential::Potential;
pub use stats::{
    empirical_pair_correlation, lattice_probe, rescaled_gap_variance, sweep_beta, BetaRow,
    SweepBetaOptions, SweepBetaReport,
};
