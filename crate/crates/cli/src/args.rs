use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use loggas::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "loggas", version, about = "One-dimensional log-gas laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Renormalized energy, energy gap and defect functionals of a configuration.
    Energy(EnergyArgs),
    /// Defect functional under one normalization.
    Defect(DefectArgs),
    /// Energy gap over defect functional across a random corpus.
    QlbSweep(QlbSweepArgs),
    /// Gradient descent on the renormalized energy.
    Minimize(MinimizeArgs),
    /// Flux and circulation checks of the electric field.
    FieldCheck(FieldCheckArgs),
    /// Two-point correlation pairing against a test function.
    Correlate(CorrelateArgs),
    /// Mean and variance of the number of points in [-T, T].
    Counts(CountsArgs),
    /// Correlation gap versus square-root energy gap over perturbed lattices.
    Theorem1Sweep(Theorem1SweepArgs),
    /// Weighted Fekete points of a potential.
    Fekete(FeketeArgs),
    /// Metropolis samples of the finite log-gas.
    Sample(SampleArgs),
    /// Crystallization statistics across inverse temperatures.
    SweepBeta(SweepBetaArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Energy(_) => "energy",
            Command::Defect(_) => "defect",
            Command::QlbSweep(_) => "qlb-sweep",
            Command::Minimize(_) => "minimize",
            Command::FieldCheck(_) => "field-check",
            Command::Correlate(_) => "correlate",
            Command::Counts(_) => "counts",
            Command::Theorem1Sweep(_) => "theorem1-sweep",
            Command::Fekete(_) => "fekete",
            Command::Sample(_) => "sample",
            Command::SweepBeta(_) => "sweep-beta",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArg {
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EnergyArgs {
    /// Configuration file (`.json` or `.csv`).
    #[arg(long)]
    pub config: PathBuf,
    /// Also compute the energy from the electric field by quadrature.
    #[arg(long)]
    pub via_definition: bool,
    /// Excision radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub eta_levels: Option<Vec<f64>>,
    #[arg(long)]
    pub ymax: Option<f64>,
    /// Tolerance on the extrapolation indicator.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: ReportArg,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationArg {
    PaperRhs,
    Prefactored,
}

#[derive(Debug, Args, Serialize)]
pub struct DefectArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum, default_value = "paper-rhs")]
    pub normalization: NormalizationArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: ReportArg,
}

#[derive(Debug, Args, Serialize)]
pub struct QlbSweepArgs {
    /// Periods, comma separated.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: ReportArg,
}

#[derive(Debug, Args, Serialize)]
pub struct MinimizeArgs {
    /// Starting configuration; a seeded random one of size `--N` otherwise.
    #[arg(long, conflicts_with = "n")]
    pub config: Option<PathBuf>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the minimizer as a configuration JSON file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Args, Serialize)]
pub struct FieldCheckArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Circle radii around each charge, each below the minimal gap.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.4")]
    pub radii: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: ReportArg,
}

#[derive(Debug, Args, Serialize)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// `product:...`, `sheared:...` or `grid:<path to grid JSON>`.
    #[arg(long, default_value = LATTICE_PROBE)]
    pub phi: String,
    /// Quadrature (default).
    #[arg(long, conflicts_with = "mc")]
    pub exact: bool,
    /// Monte Carlo over translations.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: ReportArg,
}

pub const LATTICE_PROBE: &str = "sheared:amp=1,gc=0,gw=1.5,hc=1,hw=0.5";

#[derive(Debug, Args, Serialize)]
pub struct CountsArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Half-width of the counting window.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: ReportArg,
}

#[derive(Debug, Args, Serialize)]
pub struct Theorem1SweepArgs {
    #[arg(long = "N", value_delimiter = ',', default_value = "16,32,64")]
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    /// Perturbation modes; `N/k` means the period divided by `k`.
    #[arg(long, value_delimiter = ',', default_value = "1,2,N/4")]
    pub modes: Vec<String>,
    #[arg(long, default_value_t = 1e-3)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 0.2)]
    pub eps_max: f64,
    /// Number of geometrically spaced amplitudes.
    #[arg(long, default_value_t = 9)]
    pub eps_count: usize,
    /// Test functions; may be repeated.
    #[arg(long, default_values_t = default_sweep_phis())]
    pub phi: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: ReportArg,
}

pub fn default_sweep_phis() -> Vec<String> {
    [
        "product:amp=1,gc=0.1,gw=0.7,hc=0.9,hw=0.6",
        "sheared:amp=1,gc=0.3,gw=0.5,hc=1.3,hw=0.8",
        "sheared:amp=1,gc=0,gw=1,hc=-2.2,hw=1.1",
    ]
    .map(String::from)
    .to_vec()
}

#[derive(Debug, Args, Serialize)]
pub struct FeketeArgs {
    /// `quad`, `quartic` or `poly:c0,c1,...`.
    #[arg(long, default_value = "quad")]
    pub potential: String,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: ReportArg,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, default_value = "quad")]
    pub potential: String,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long)]
    pub beta: f64,
    /// Total sweeps including burn-in.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 10)]
    pub thinning: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Sample CSV destination.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepBetaArgs {
    #[arg(long, default_value = "quad")]
    pub potential: String,
    #[arg(long = "N", default_value_t = 32)]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,4,16,64")]
    pub betas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 6_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 5)]
    pub thinning: usize,
    /// Bulk point around which pairings are taken.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center: f64,
    #[arg(long, default_value = LATTICE_PROBE)]
    pub phi: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: ReportArg,
}
