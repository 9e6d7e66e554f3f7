//! Two-point correlation pairings `<rho_2, phi>` of the stationary process
//! obtained by averaging a periodic configuration over translations.
//!
//! Every pairing reduces to the diagonal integrals
//! `G(d) = int phi(s, s + d) ds`: the lattice pairing is `sum_{k != 0} G(k)`
//! and the periodic pairing is `(1/N) sum_i sum_{p != 0} G(u_{p,i})`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::test_function::TestFunction2D;
use crate::energy::energy_periodic;
use crate::error::{LogGasError, Result};
use crate::numeric::{adaptive_integrate, pairwise_sum};
use crate::torus::TorusConfiguration;

const DIAGONAL_TOL: f64 = 1e-12;
const DIAGONAL_DEPTH: usize = 40;

/// Translation samples in [`pairing_monte_carlo`] by default.
pub const DEFAULT_MC_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PairingMethod {
    ExactQuadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingResult {
    pub value: f64,
    pub method: PairingMethod,
    /// Summed panel-refinement differences for quadrature, one standard
    /// error for Monte Carlo.
    pub error_estimate: f64,
}

/// Finite set of points lying in `[lo, hi]`, standing in for a locally
/// finite configuration restricted to a window.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigWindow {
    pub lo: f64,
    pub hi: f64,
    pub points: Vec<f64>,
}

impl ConfigWindow {
    /// All periodic images of `config` shifted by `-t` that fall in `[lo, hi]`.
    pub fn from_config(config: &TorusConfiguration, t: f64, lo: f64, hi: f64) -> Self {
        let n = config.period() as f64;
        let mut points = Vec::new();
        for &a in config.points() {
            let mut m = ((lo + t - a) / n).ceil();
            loop {
                let x = a + m * n - t;
                if x > hi {
                    break;
                }
                if x >= lo {
                    points.push(x);
                }
                m += 1.0;
            }
        }
        points.sort_by(f64::total_cmp);
        Self { lo, hi, points }
    }
}

/// `sum_{x != y} phi(x, y)` over ordered pairs of distinct window points.
pub fn pair_sum(window: &ConfigWindow, phi: &TestFunction2D) -> Result<f64> {
    let t = phi.support_half_width();
    if window.lo > -t || window.hi < t {
        return Err(LogGasError::WindowTooSmall {
            lo: window.lo,
            hi: window.hi,
            t,
        });
    }
    let inside: Vec<f64> = window
        .points
        .iter()
        .copied()
        .filter(|x| x.abs() <= t)
        .collect();
    let mut terms = Vec::with_capacity(inside.len() * inside.len());
    for (i, &x) in inside.iter().enumerate() {
        for (j, &y) in inside.iter().enumerate() {
            if i != j {
                terms.push(phi.evaluate(x, y));
            }
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `G(d) = int phi(s, s + d) ds` and its quadrature error.
pub fn diagonal_integral(phi: &TestFunction2D, d: f64) -> Result<(f64, f64)> {
    let t = phi.support_half_width();
    let (lo, hi) = ((-t).max(-t - d), t.min(t - d));
    if lo >= hi {
        return Ok((0.0, 0.0));
    }
    let tol = DIAGONAL_TOL * (1.0 + phi.sup_norm()) * (hi - lo);
    let r = adaptive_integrate(
        |s| phi.evaluate(s, s + d),
        lo,
        hi,
        &phi.diagonal_breaks(d),
        tol,
        DIAGONAL_DEPTH,
    )?;
    Ok((r.value, r.error))
}

fn sum_diagonals(phi: &TestFunction2D, ds: &[f64]) -> Result<PairingResult> {
    let parts: Vec<(f64, f64)> = ds
        .par_iter()
        .map(|&d| diagonal_integral(phi, d))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = parts.iter().map(|p| p.0).collect();
    Ok(PairingResult {
        value: pairwise_sum(&values),
        method: PairingMethod::ExactQuadrature,
        error_estimate: parts.iter().map(|p| p.1).sum(),
    })
}

/// Pairing against the stationarized integer lattice:
/// `sum_{k != 0, |k| <= 2T} G(k)`.
pub fn pairing_lattice(phi: &TestFunction2D) -> Result<PairingResult> {
    let kmax = (2.0 * phi.support_half_width()).floor() as i64;
    let ds: Vec<f64> = (-kmax..=kmax)
        .filter(|&k| k != 0)
        .map(|k| k as f64)
        .collect();
    sum_diagonals(phi, &ds)
}

/// Neighbor spacings `u_{p,i}`, `p != 0`, with `|u| <= reach`, in `(i, p)` order.
fn spacings_within(config: &TorusConfiguration, reach: f64) -> Vec<f64> {
    let n = config.len() as isize;
    let mut out = Vec::new();
    for i in 0..n {
        let a = config.point(i);
        for dir in [1isize, -1] {
            let mut p = dir;
            loop {
                let u = config.point(i + p) - a;
                if u.abs() > reach {
                    break;
                }
                out.push(u);
                p += dir;
            }
        }
    }
    out
}

/// Pairing against the process `P_Lambda` of a periodic configuration, by
/// quadrature of the diagonal integrals. Weighted by `1/N`.
pub fn pairing_periodic(config: &TorusConfiguration, phi: &TestFunction2D) -> Result<PairingResult> {
    let ds = spacings_within(config, 2.0 * phi.support_half_width());
    let r = sum_diagonals(phi, &ds)?;
    let n = config.len() as f64;
    Ok(PairingResult {
        value: r.value / n,
        error_estimate: r.error_estimate / n,
        ..r
    })
}

/// Monte Carlo estimate of [`pairing_periodic`]: the mean of [`pair_sum`]
/// over `samples` uniform translations in `[0, N)`.
pub fn pairing_monte_carlo(
    config: &TorusConfiguration,
    phi: &TestFunction2D,
    samples: usize,
    seed: u64,
) -> Result<PairingResult> {
    if samples < 2 {
        return Err(LogGasError::InvalidArgument(format!(
            "Monte Carlo needs at least 2 samples, got {samples}"
        )));
    }
    let t = phi.support_half_width();
    let n = config.period() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<f64> = (0..samples).map(|_| rng.random_range(0.0..n)).collect();
    let values: Vec<f64> = shifts
        .par_iter()
        .map(|&s| pair_sum(&ConfigWindow::from_config(config, s, -t, t), phi))
        .collect::<Result<_>>()?;
    let m = samples as f64;
    let mean = pairwise_sum(&values) / m;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (m - 1.0);
    Ok(PairingResult {
        value: mean,
        method: PairingMethod::MonteCarlo,
        error_estimate: (var / m).sqrt(),
    })
}

/// `|<rho_{2,P_Lambda} - rho_{2,P_Z}, phi>|`.
pub fn correlation_gap(config: &TorusConfiguration, phi: &TestFunction2D) -> Result<f64> {
    Ok((pairing_periodic(config, phi)?.value - pairing_lattice(phi)?.value).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Record {
    pub lhs: f64,
    pub sqrt_gap: f64,
    pub ratio: f64,
}

/// Energy gaps at or below this are treated as zero.
pub const ZERO_GAP_THRESHOLD: f64 = 1e-14;

/// Compares the correlation gap with the square root of the energy gap.
pub fn theorem1_check(config: &TorusConfiguration, phi: &TestFunction2D) -> Result<Theorem1Record> {
    let gap = energy_periodic(config)? - crate::energy::w_lattice();
    if gap <= ZERO_GAP_THRESHOLD {
        return Err(LogGasError::ZeroGap(gap));
    }
    let lhs = correlation_gap(config, phi)?;
    let sqrt_gap = gap.sqrt();
    Ok(Theorem1Record {
        lhs,
        sqrt_gap,
        ratio: lhs / sqrt_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub mode: usize,
    pub eps: f64,
    pub phi_index: usize,
    pub record: Theorem1Record,
}

/// Runs [`theorem1_check`] on `perturb_lattice(n, q, eps)` over the grid of
/// parameters. Points where the energy gap underflows are skipped.
pub fn theorem1_sweep(
    ns: &[usize],
    modes: &dyn Fn(usize) -> Vec<usize>,
    eps: &[f64],
    phis: &[TestFunction2D],
) -> Result<Vec<SweepPoint>> {
    let mut tasks = Vec::new();
    for &n in ns {
        let mut qs = modes(n);
        qs.sort_unstable();
        qs.dedup();
        for q in qs {
            for &e in eps {
                for k in 0..phis.len() {
                    tasks.push((n, q, e, k));
                }
            }
        }
    }
    let out: Vec<Option<SweepPoint>> = tasks
        .par_iter()
        .map(|&(n, q, e, k)| {
            let config = crate::torus::perturb_lattice(n, q, e)?;
            match theorem1_check(&config, &phis[k]) {
                Ok(record) => Ok(Some(SweepPoint {
                    n,
                    mode: q,
                    eps: e,
                    phi_index: k,
                    record,
                })),
                Err(LogGasError::ZeroGap(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}
