//! Stationary point processes built from periodic configurations.

pub mod counts;
pub mod pairing;
pub mod test_function;

pub use counts::{count_statistics, CountStats};
pub use pairing::{
    correlation_gap, pair_sum, pairing_lattice, pairing_monte_carlo, pairing_periodic,
    theorem1_check, theorem1_sweep, ConfigWindow, PairingMethod, PairingResult, SweepPoint,
    Theorem1Record,
};
pub use test_function::{Bump, GridFunction, Shape, TestFunction2D};
