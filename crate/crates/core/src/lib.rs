//! Numerical laboratory for the one-dimensional log-gas.
//!
//! * [`torus`]: periodic configurations and their defect tables.
//! * [`energy`]: closed-form renormalized energy, its gradient, the defect
//!   lower bound and energy minimization.
//! * [`field`]: the periodic electric field in the plane and the
//!   excised-ball energy computed by quadrature, an independent route to
//!   the same energy.
//! * [`process`]: two-point correlation pairings of the stationary
//!   processes built from periodic configurations, counting statistics.
//! * [`gibbs`]: the finite-`N` Hamiltonian, weighted Fekete points,
//!   Metropolis sampling and the equilibrium-measure oracle.
//! * [`io`]: file formats shared with the command-line front end.

pub mod energy;
pub mod error;
pub mod field;
pub mod gibbs;
pub mod io;
pub mod numeric;
pub mod process;
pub mod torus;

pub use error::{LogGasError, Result};
pub use torus::{lattice, perturb_lattice, TorusConfiguration};

/// Seed used wherever a caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_1dea;
