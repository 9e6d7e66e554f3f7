//! Statistics of Gibbs samples at the microscopic scale: gaps and pairings
//! after blowing up around a bulk point by `N m_0`.

use rayon::prelude::*;
use serde::Serialize;

use super::equilibrium::{equilibrium_oracle, DiscreteMeasure, EquilibriumGrid};
use super::mcmc::{mcmc_sample, McmcOptions, SampleSet};
use super::potential::Potential;
use crate::error::{LogGasError, Result};
use crate::numeric::pairwise_sum;
use crate::process::{pair_sum, pairing_lattice, ConfigWindow, PairingMethod, PairingResult, TestFunction2D};

/// Fraction of the support radius around the center used for pairings.
pub const BULK_FRACTION: f64 = 0.2;
/// Fraction of the support radius, around its midpoint, whose gaps enter
/// [`rescaled_gap_variance`].
pub const GAP_FRACTION: f64 = 0.5;

fn support_radius(measure: &DiscreteMeasure) -> (f64, f64) {
    let (a, b) = measure.support();
    (0.5 * (a + b), 0.5 * (b - a))
}

/// Pooled variance of nearest-neighbor gaps scaled by `N m_0(midpoint)`,
/// over gaps whose midpoint lies in the central half of the support.
pub fn rescaled_gap_variance(samples: &SampleSet, measure: &DiscreteMeasure) -> Result<f64> {
    let (mid, radius) = support_radius(measure);
    let n = samples.n as f64;
    let gaps: Vec<f64> = samples
        .states
        .iter()
        .flat_map(|s| s.windows(2).map(|p| (0.5 * (p[0] + p[1]), p[1] - p[0])))
        .filter(|&(c, _)| (c - mid).abs() <= GAP_FRACTION * radius)
        .map(|(c, g)| n * measure.density(c) * g)
        .collect();
    if gaps.len() < 2 {
        return Err(LogGasError::EmptyWindow);
    }
    let m = pairwise_sum(&gaps) / gaps.len() as f64;
    let dev: Vec<f64> = gaps.iter().map(|g| (g - m) * (g - m)).collect();
    Ok(pairwise_sum(&dev) / (gaps.len() - 1) as f64)
}

/// Average over recorded states of the pair sum of `phi` over points mapped
/// by `x -> N m_0(center) (x - center)`, restricted to the bulk window.
pub fn empirical_pair_correlation(
    samples: &SampleSet,
    phi: &TestFunction2D,
    center: f64,
    measure: &DiscreteMeasure,
) -> Result<PairingResult> {
    if samples.is_empty() {
        return Err(LogGasError::EmptyWindow);
    }
    let m0 = measure.density(center);
    let (a, b) = measure.support();
    if !(m0 > 0.0 && center > a && center < b) {
        return Err(LogGasError::InvalidArgument(format!(
            "center {center} is not inside the equilibrium support [{a}, {b}]"
        )));
    }
    let (_, radius) = support_radius(measure);
    let scale = samples.n as f64 * m0;
    let half = BULK_FRACTION * radius * scale;
    let t = phi.support_half_width();
    let mut pairs = 0usize;
    let values: Vec<f64> = samples
        .states
        .iter()
        .map(|state| {
            let points: Vec<f64> = state
                .iter()
                .map(|x| scale * (x - center))
                .filter(|y| y.abs() <= half)
                .collect();
            let k = points.iter().filter(|y| y.abs() <= t).count();
            pairs += k * k.saturating_sub(1);
            pair_sum(
                &ConfigWindow {
                    lo: -half,
                    hi: half,
                    points,
                },
                phi,
            )
        })
        .collect::<Result<_>>()?;
    if pairs == 0 {
        return Err(LogGasError::EmptyWindow);
    }
    let m = values.len() as f64;
    let mean = pairwise_sum(&values) / m;
    let error = if values.len() > 1 {
        let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        (pairwise_sum(&dev) / (m - 1.0) / m).sqrt()
    } else {
        0.0
    };
    Ok(PairingResult {
        value: mean,
        method: PairingMethod::MonteCarlo,
        error_estimate: error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepBetaOptions {
    pub betas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub steps: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub center: f64,
    pub grid: EquilibriumGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaRow {
    pub beta: f64,
    /// One entry per seed, in seed order.
    pub gap_variance: Vec<f64>,
    pub acceptance_rate: Vec<f64>,
    /// Pairing over the states of all seeds together.
    pub pairing: PairingResult,
    pub lattice_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepBetaReport {
    pub lattice_pairing: f64,
    pub rows: Vec<BetaRow>,
    /// Seeds whose gap variance strictly decreases along the beta list.
    pub monotone_seeds: usize,
    pub monotone_majority: bool,
    /// Pairing at the last beta strictly closer to the lattice pairing than
    /// at the first.
    pub pairing_trend: bool,
}

pub fn sweep_beta(
    v: &Potential,
    n: usize,
    phi: &TestFunction2D,
    opts: &SweepBetaOptions,
) -> Result<SweepBetaReport> {
    if opts.betas.is_empty() || opts.seeds.is_empty() {
        return Err(LogGasError::InvalidArgument("need at least one beta and one seed".into()));
    }
    let measure = equilibrium_oracle(v, opts.grid)?;
    let lattice = pairing_lattice(phi)?.value;
    let tasks: Vec<(f64, u64)> = opts
        .betas
        .iter()
        .flat_map(|&b| opts.seeds.iter().map(move |&s| (b, s)))
        .collect();
    let sets: Vec<SampleSet> = tasks
        .par_iter()
        .map(|&(beta, seed)| {
            mcmc_sample(
                v,
                n,
                McmcOptions {
                    beta,
                    steps: opts.steps,
                    burn_in: opts.burn_in,
                    thinning: opts.thinning,
                    seed,
                },
            )
        })
        .collect::<Result<_>>()?;

    let per_beta = opts.seeds.len();
    let mut rows = Vec::with_capacity(opts.betas.len());
    for (bi, &beta) in opts.betas.iter().enumerate() {
        let chunk = &sets[bi * per_beta..(bi + 1) * per_beta];
        let gap_variance = chunk
            .iter()
            .map(|s| rescaled_gap_variance(s, &measure))
            .collect::<Result<Vec<_>>>()?;
        let mut pooled = chunk[0].clone();
        for s in &chunk[1..] {
            pooled.states.extend(s.states.iter().cloned());
            pooled.steps.extend(&s.steps);
        }
        let pairing = empirical_pair_correlation(&pooled, phi, opts.center, &measure)?;
        rows.push(BetaRow {
            beta,
            gap_variance,
            acceptance_rate: chunk.iter().map(|s| s.acceptance_rate).collect(),
            lattice_distance: (pairing.value - lattice).abs(),
            pairing,
        });
    }
    let monotone_seeds = (0..per_beta)
        .filter(|&k| rows.windows(2).all(|w| w[1].gap_variance[k] < w[0].gap_variance[k]))
        .count();
    let pairing_trend = rows.last().map(|r| r.lattice_distance) < rows.first().map(|r| r.lattice_distance);
    Ok(SweepBetaReport {
        lattice_pairing: lattice,
        monotone_majority: 2 * monotone_seeds > per_beta,
        monotone_seeds,
        rows,
        pairing_trend,
    })
}

/// Test function used for crystallization checks: weights each particle in
/// a window of half-width 1.5 by a bump of the distance to its right
/// neighbor centered at the lattice spacing.
pub fn lattice_probe() -> TestFunction2D {
    "sheared:amp=1,gc=0,gw=1.5,hc=1,hw=0.5"
        .parse()
        .expect("built-in probe is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_measure() -> DiscreteMeasure {
        equilibrium_oracle(&Potential::quadratic(), EquilibriumGrid::default()).unwrap()
    }

    fn run(beta: f64, steps: usize, seed: u64) -> SampleSet {
        mcmc_sample(
            &Potential::quadratic(),
            32,
            McmcOptions {
                beta,
                steps,
                burn_in: steps / 5,
                thinning: 2,
                seed,
            },
        )
        .unwrap()
    }

    #[test]
    fn disjoint_support_single_state() {
        let mu = quad_measure();
        let q = Potential::quadratic();
        let mut s = run(4.0, 50, 1).truncated(1);
        s.states[0] = crate::gibbs::fekete_optimize(&q, 32, &crate::gibbs::hamiltonian::default_init(&q, 32), 1e-9)
            .unwrap()
            .points;
        // Rescaled Fekete points near the center sit close to consecutive
        // integers, so no pair difference falls in (0.3, 0.7).
        let phi: TestFunction2D = "sheared:amp=1,gc=0,gw=1,hc=0.5,hw=0.2".parse().unwrap();
        let r = empirical_pair_correlation(&s, &phi, 0.0, &mu).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn standard_error_shrinks_like_root_two() {
        let mu = quad_measure();
        let s = run(4.0, 8000, 5);
        let half = s.truncated(s.len() / 2);
        let phi = lattice_probe();
        let a = empirical_pair_correlation(&half, &phi, 0.0, &mu).unwrap();
        let b = empirical_pair_correlation(&s, &phi, 0.0, &mu).unwrap();
        let q = a.error_estimate / b.error_estimate;
        assert!((q / 2f64.sqrt() - 1.0).abs() <= 0.2, "ratio {q}");
    }

    #[test]
    fn crystallization_orderings() {
        let mu = quad_measure();
        let phi = lattice_probe();
        let lattice = pairing_lattice(&phi).unwrap().value;
        let hot = run(1.0, 3000, 2);
        let cold = run(64.0, 3000, 2);
        assert!(rescaled_gap_variance(&cold, &mu).unwrap() < rescaled_gap_variance(&hot, &mu).unwrap());
        let dh = (empirical_pair_correlation(&hot, &phi, 0.0, &mu).unwrap().value - lattice).abs();
        let dc = (empirical_pair_correlation(&cold, &phi, 0.0, &mu).unwrap().value - lattice).abs();
        assert!(dc < dh, "{dc} vs {dh}");
    }

    #[test]
    fn rejects_center_outside_support() {
        let mu = quad_measure();
        let s = run(4.0, 50, 1);
        assert!(empirical_pair_correlation(&s, &lattice_probe(), 2.5, &mu).is_err());
    }
}
