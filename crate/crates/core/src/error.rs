use thiserror::Error;

/// Every failure the library can report.
///
/// Variants carry enough context to be rendered as a machine-readable
/// error record by the command-line front end (see [`LogGasError::kind`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogGasError {
    #[error("expected {expected} points, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("period must be at least 2, got {0}")]
    BadPeriod(usize),
    #[error("point {0} is not a finite real")]
    NonFinite(f64),
    #[error("points {first} and {second} coincide modulo the period")]
    DuplicatePoint { first: f64, second: f64 },
    #[error("perturbation amplitude {amplitude} breaks ordering (|eps| must be < 1/2)")]
    AmplitudeTooLarge { amplitude: f64 },
    #[error("perturbation mode {mode} outside 1..={max}")]
    BadMode { mode: usize, max: usize },
    #[error("two points are closer than {threshold:e}, energy is numerically singular")]
    NearCoincidence { threshold: f64 },
    #[error("density must be positive, got {0}")]
    NonpositiveDensity(f64),
    #[error("defect functional vanishes: configuration is a lattice translate")]
    ZeroDefect,
    #[error("energy gap {0:e} too small for a ratio")]
    ZeroGap(f64),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("two points merged during descent")]
    OrderingCollapse,
    #[error("evaluation point lies on a charge")]
    AtCharge,
    #[error("invalid quadrature parameters: {0}")]
    BadQuadrature(String),
    #[error("eta extrapolation not converged: finest estimates differ by {difference:e} > {tolerance:e}")]
    MeshTooCoarse { difference: f64, tolerance: f64 },
    #[error("point window [{lo}, {hi}] does not cover the support box [-{t}, {t}]")]
    WindowTooSmall { lo: f64, hi: f64, t: f64 },
    #[error("adaptive quadrature exceeded its depth budget")]
    QuadratureFailure,
    #[error("invalid test function: {0}")]
    BadTestFunction(String),
    #[error("invalid potential: {0}")]
    BadPotential(String),
    #[error("points coincide, Hamiltonian diverges")]
    Coincidence,
    #[error("invalid sampling schedule: {0}")]
    BadSchedule(String),
    #[error("no pairs fell in the support of the test function")]
    EmptyWindow,
    #[error("equilibrium solver failed: {0}")]
    SolverFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl LogGasError {
    /// Stable identifier used in error reports.
    pub fn kind(&self) -> &'static str {
        use LogGasError::*;
        match self {
            BadLength { .. } => "BadLength",
            BadPeriod(_) => "BadPeriod",
            NonFinite(_) => "NonFinite",
            DuplicatePoint { .. } => "DuplicatePoint",
            AmplitudeTooLarge { .. } => "AmplitudeTooLarge",
            BadMode { .. } => "BadMode",
            NearCoincidence { .. } => "NearCoincidence",
            NonpositiveDensity(_) => "NonpositiveDensity",
            ZeroDefect => "ZeroDefect",
            ZeroGap(_) => "ZeroGap",
            MaxIterations { .. } => "MaxIterations",
            OrderingCollapse => "OrderingCollapse",
            AtCharge => "AtCharge",
            BadQuadrature(_) => "BadQuadrature",
            MeshTooCoarse { .. } => "MeshTooCoarse",
            WindowTooSmall { .. } => "WindowTooSmall",
            QuadratureFailure => "QuadratureFailure",
            BadTestFunction(_) => "BadTestFunction",
            BadPotential(_) => "BadPotential",
            Coincidence => "Coincidence",
            BadSchedule(_) => "BadSchedule",
            EmptyWindow => "EmptyWindow",
            SolverFailure(_) => "SolverFailure",
            Parse(_) => "ParseError",
            InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, LogGasError>;
