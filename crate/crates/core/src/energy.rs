//! Closed-form renormalized energy of periodic configurations.
//!
//! For `N` points `a_i` on the torus of circumference `N`,
//!
//! ```text
//! W = -(pi/N) sum_{i != j} log|2 sin(pi (a_i - a_j) / N)| - pi log(2 pi / N)
//! ```
//!
//! The lattice value is `-pi log(2 pi)` for every `N`, and `W` is minimal
//! there. The defect functional measures how far the neighbour spacings are
//! from those of the lattice and bounds `W - W(Z)` from below up to an
//! unknown constant; this module never assumes a value for that constant,
//! it reports empirical ratios instead.
//!
//! Note on curvature: with `F(x) = log|2 sin x|` one has `F''(x) = -1/sin^2 x`.
//! Only the magnitude `csc^2 x >= 1` matters for the lower bound.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LogGasError, Result};
use crate::numeric::pairwise_sum;
use crate::torus::{
    defect_table, random_config, Density, TorusConfiguration, DUPLICATE_TOLERANCE,
};

/// `W(Z) = -pi log(2 pi)`, the minimum over unit-density configurations.
pub fn w_lattice() -> f64 {
    -PI * (2.0 * PI).ln()
}

/// Minimum of `W` at density `m`: `-pi m log(2 pi m)`.
pub fn w_lattice_at_density(m: Density) -> f64 {
    let m = m.get();
    -PI * m * (2.0 * PI * m).ln()
}

fn check_separation(config: &TorusConfiguration) -> Result<()> {
    let threshold = DUPLICATE_TOLERANCE * config.len() as f64;
    if config.min_gap() < threshold {
        return Err(LogGasError::NearCoincidence { threshold });
    }
    Ok(())
}

pub fn energy_periodic(config: &TorusConfiguration) -> Result<f64> {
    check_separation(config)?;
    Ok(energy_of(config.points(), config.len()))
}

/// `dW/da_i = -(2 pi^2 / N^2) sum_{j != i} cot(pi (a_i - a_j) / N)`.
pub fn energy_gradient(config: &TorusConfiguration) -> Result<Vec<f64>> {
    check_separation(config)?;
    Ok(gradient_of(config.points(), config.len()))
}

fn gradient_of(a: &[f64], n: usize) -> Vec<f64> {
    let nf = n as f64;
    let scale = -2.0 * PI * PI / (nf * nf);
    (0..n)
        .map(|i| {
            let terms: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (PI * (a[i] - a[j]) / nf).tan())
                .collect();
            scale * pairwise_sum(&terms)
        })
        .collect()
}

fn energy_of(a: &[f64], n: usize) -> f64 {
    let nf = n as f64;
    let rows: Vec<f64> = (0..n)
        .map(|i| {
            let terms: Vec<f64> = (i + 1..n)
                .map(|j| (2.0 * (PI * (a[j] - a[i]) / nf).sin()).abs().ln())
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    -(PI / nf) * 2.0 * pairwise_sum(&rows) - PI * (2.0 * PI / nf).ln()
}

/// Scaling relation between densities: `W_m = m (W_1 - pi log m)`.
pub fn scale_energy(w_unit: f64, m: f64) -> Result<f64> {
    let m = Density::new(m)?.get();
    Ok(m * (w_unit - PI * m.ln()))
}

/// Normalization of the defect sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `sum_{p=1}^{N/2} (1/N) sum_i min(b_{p,i}^2 / p^2, 1)`.
    #[default]
    PaperRhs,
    /// The same sum divided once more by `N`.
    Prefactored,
}

pub fn defect_functional(config: &TorusConfiguration, normalization: Normalization) -> f64 {
    let n = config.len();
    let nf = n as f64;
    let table = defect_table(config);
    let per_p: Vec<f64> = (1..=n / 2)
        .map(|p| {
            let p2 = (p * p) as f64;
            let terms: Vec<f64> = table
                .b_row(p)
                .iter()
                .map(|b| (b * b / p2).min(1.0))
                .collect();
            pairwise_sum(&terms) / nf
        })
        .collect();
    let sum = pairwise_sum(&per_p);
    match normalization {
        Normalization::PaperRhs => sum,
        Normalization::Prefactored => sum / nf,
    }
}

/// `(W - W(Z)) / defect_functional`.
pub fn qlb_ratio(config: &TorusConfiguration, normalization: Normalization) -> Result<f64> {
    let defect = defect_functional(config, normalization);
    if defect == 0.0 {
        return Err(LogGasError::ZeroDefect);
    }
    Ok((energy_periodic(config)? - w_lattice()) / defect)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub w: f64,
    pub gap: f64,
    pub defect_paper_rhs: f64,
    pub defect_prefactored: f64,
    /// `gap / defect_paper_rhs`, absent for lattice translates.
    pub ratio: Option<f64>,
}

impl EnergyReport {
    pub fn new(config: &TorusConfiguration) -> Result<Self> {
        let w = energy_periodic(config)?;
        let gap = w - w_lattice();
        let defect_paper_rhs = defect_functional(config, Normalization::PaperRhs);
        let defect_prefactored = defect_functional(config, Normalization::Prefactored);
        let ratio = (defect_paper_rhs > 0.0).then(|| gap / defect_paper_rhs);
        Ok(Self {
            w,
            gap,
            defect_paper_rhs,
            defect_prefactored,
            ratio,
        })
    }
}

/// Budget and thresholds for [`minimize_energy_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Target sup-norm of the gradient.
    pub tol: f64,
    pub max_iterations: usize,
    /// Switch from line search to fixed-step polishing below this
    /// gradient sup-norm.
    pub polish_below: f64,
}

impl MinimizeOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_iterations: 200_000,
            polish_below: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimized {
    pub config: TorusConfiguration,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

pub fn minimize_energy(init: &TorusConfiguration, tol: f64) -> Result<TorusConfiguration> {
    minimize_energy_with(init, &MinimizeOptions::new(tol)).map(|m| m.config)
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn cyclic_order_ok(x: &[f64], n: usize) -> bool {
    let floor = DUPLICATE_TOLERANCE * n as f64;
    x.windows(2).all(|w| w[1] - w[0] > floor) && x[0] + n as f64 - x[n - 1] > floor
}

/// Gradient descent with Armijo backtracking, then fixed-step polishing.
///
/// The polishing step is `N / pi^3`, the inverse of the largest Hessian
/// eigenvalue at the lattice (`lambda_q = 4 pi^3 q (N - q) / N^3`).
/// Candidate steps that would reorder points are rejected.
pub fn minimize_energy_with(
    init: &TorusConfiguration,
    opts: &MinimizeOptions,
) -> Result<Minimized> {
    if !(opts.tol > 0.0) {
        return Err(LogGasError::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    check_separation(init)?;
    let n = init.len();
    let nf = n as f64;
    let mut x = init.points().to_vec();
    let mut w = energy_of(&x, n);
    let mut g = gradient_of(&x, n);
    let polish_step = nf / PI.powi(3);
    let mut step = polish_step;
    let mut polishing = false;
    let mut polish_alpha = polish_step;

    for iteration in 0..opts.max_iterations {
        let gnorm = sup_norm(&g);
        if gnorm <= opts.tol {
            let config = TorusConfiguration::new(x, n)?;
            return Ok(Minimized {
                energy: energy_periodic(&config)?,
                config,
                grad_norm: gnorm,
                iterations: iteration,
            });
        }
        if !polishing && gnorm <= opts.polish_below {
            polishing = true;
        }
        if polishing {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - polish_alpha * gi).collect();
            if !cyclic_order_ok(&trial, n) {
                return Err(LogGasError::OrderingCollapse);
            }
            let g_trial = gradient_of(&trial, n);
            if sup_norm(&g_trial) > 10.0 * gnorm {
                polish_alpha *= 0.5;
                continue;
            }
            x = trial;
            g = g_trial;
            continue;
        }

        let g2: f64 = g.iter().map(|v| v * v).sum();
        let mut alpha = step;
        let mut accepted = false;
        for _ in 0..80 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - alpha * gi).collect();
            if cyclic_order_ok(&trial, n) {
                let w_trial = energy_of(&trial, n);
                if w_trial <= w - 1e-4 * alpha * g2 {
                    x = trial;
                    w = w_trial;
                    g = gradient_of(&x, n);
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if accepted {
            step = (2.0 * alpha).min(4.0 * polish_step);
        } else {
            // round-off floor of the energy reached; continue on the gradient alone
            polishing = true;
        }
    }
    Err(LogGasError::MaxIterations {
        iterations: opts.max_iterations,
        residual: sup_norm(&g),
    })
}

/// Per-period summary of a random corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QlbSummary {
    pub n: usize,
    pub count: usize,
    pub min_gap: f64,
    pub min_ratio_paper_rhs: f64,
    pub max_ratio_paper_rhs: f64,
    pub min_ratio_prefactored: f64,
    pub nonpositive_ratios: usize,
}

/// Random-corpus survey of `gap / defect_functional`.
///
/// Configurations are drawn sequentially from one seeded generator and then
/// evaluated in parallel, so results do not depend on the thread count.
pub fn qlb_sweep(ns: &[usize], count: usize, seed: u64) -> Result<Vec<QlbSummary>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpora = Vec::with_capacity(ns.len());
    for &n in ns {
        let configs = (0..count)
            .map(|_| random_config(n, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        corpora.push((n, configs));
    }
    corpora
        .into_iter()
        .map(|(n, configs)| {
            let rows = configs
                .par_iter()
                .map(|c| {
                    let gap = energy_periodic(c)? - w_lattice();
                    let d1 = defect_functional(c, Normalization::PaperRhs);
                    let d2 = defect_functional(c, Normalization::Prefactored);
                    Ok((gap, gap / d1, gap / d2))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(QlbSummary {
                n,
                count,
                min_gap: rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
                min_ratio_paper_rhs: rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
                max_ratio_paper_rhs: rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
                min_ratio_prefactored: rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min),
                nonpositive_ratios: rows.iter().filter(|r| !(r.1 > 0.0)).count(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{lattice, perturb_lattice, random_config};
    use proptest::prelude::*;

    fn two_point() -> TorusConfiguration {
        TorusConfiguration::new(vec![0.0, 1.5], 2).unwrap()
    }

    #[test]
    fn lattice_energy_is_minus_pi_log_two_pi() {
        for n in [2, 3, 5, 16, 100, 512] {
            let w = energy_periodic(&lattice(n).unwrap()).unwrap();
            assert!((w - w_lattice()).abs() < 1e-10, "n={n} w={w}");
        }
        assert!((w_lattice() + 5.773_861_09).abs() < 1e-8);
    }

    #[test]
    fn two_point_closed_form() {
        // N = 2: W - W(Z) = -pi log cos(pi d / 2) with d = 0.5
        let expected = w_lattice() - PI * (PI / 4.0).cos().ln();
        let w = energy_periodic(&two_point()).unwrap();
        assert!((w - expected).abs() < 1e-13);
        assert!((w + 4.685_068).abs() < 1e-6);
        let shifted = TorusConfiguration::new(vec![0.3, 1.3], 2).unwrap();
        assert!((energy_periodic(&shifted).unwrap() - w_lattice()).abs() < 1e-13);
    }

    #[test]
    fn gradient_vanishes_on_lattice() {
        let g = energy_gradient(&lattice(9).unwrap()).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn gradient_matches_finite_differences_two_point() {
        let c = two_point();
        let g = energy_gradient(&c).unwrap();
        let h = 1e-6;
        for i in 0..2 {
            let mut plus = c.points().to_vec();
            let mut minus = c.points().to_vec();
            plus[i] += h;
            minus[i] -= h;
            let fd = (energy_of(&plus, 2) - energy_of(&minus, 2)) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-6 * g[i].abs(), "i={i} fd={fd} g={}", g[i]);
        }
    }

    #[test]
    fn scaling_relation() {
        let w = -1.234;
        assert_eq!(scale_energy(w, 1.0).unwrap(), w);
        let at2 = scale_energy(w_lattice(), 2.0).unwrap();
        assert!((at2 + 2.0 * PI * (4.0 * PI).ln()).abs() < 1e-12);
        let at_half = scale_energy(w_lattice(), 0.5).unwrap();
        assert!((at_half + 0.5 * PI * PI.ln()).abs() < 1e-12);
        assert_eq!(
            scale_energy(w, 0.0),
            Err(LogGasError::NonpositiveDensity(0.0))
        );
        assert!(scale_energy(w, -1.0).is_err());
    }

    #[test]
    fn scaling_matches_density_minimum() {
        for m in [0.5, 1.0, 2.0, 3.0] {
            let lhs = scale_energy(energy_periodic(&lattice(12).unwrap()).unwrap(), m).unwrap();
            let rhs = w_lattice_at_density(Density::new(m).unwrap());
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn defect_functional_values() {
        assert_eq!(defect_functional(&lattice(6).unwrap(), Normalization::PaperRhs), 0.0);
        assert_eq!(defect_functional(&lattice(6).unwrap(), Normalization::Prefactored), 0.0);
        assert!((defect_functional(&two_point(), Normalization::PaperRhs) - 0.25).abs() < 1e-15);
        assert!((defect_functional(&two_point(), Normalization::Prefactored) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn qlb_ratio_cases() {
        let r = qlb_ratio(&two_point(), Normalization::PaperRhs).unwrap();
        let expected = (-PI * (PI / 4.0).cos().ln()) / 0.25;
        assert!((r - expected).abs() < 1e-12);
        assert!((r - 4.355).abs() < 1e-3);
        assert_eq!(
            qlb_ratio(&lattice(8).unwrap(), Normalization::PaperRhs),
            Err(LogGasError::ZeroDefect)
        );
    }

    #[test]
    fn qlb_ratio_stable_at_small_amplitude() {
        let ratios: Vec<f64> = [1e-3, 1e-2, 1e-1]
            .iter()
            .map(|&e| qlb_ratio(&perturb_lattice(16, 1, e).unwrap(), Normalization::PaperRhs).unwrap())
            .collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
        assert!(hi / lo < 1.10, "{ratios:?}");
    }

    #[test]
    fn minimizer_keeps_lattice() {
        let l = lattice(8).unwrap();
        assert_eq!(minimize_energy(&l, 1e-8).unwrap(), l);
    }

    #[test]
    fn minimizer_recovers_lattice_from_perturbation() {
        let m = minimize_energy(&perturb_lattice(16, 3, 0.2).unwrap(), 1e-8).unwrap();
        assert!(m.gaps().iter().all(|g| (g - 1.0).abs() < 1e-6), "{:?}", m.gaps());
    }

    #[test]
    fn minimizer_reaches_lattice_energy_from_random_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let init = random_config(8, &mut rng).unwrap();
        let m = minimize_energy_with(&init, &MinimizeOptions::new(1e-8)).unwrap();
        assert!((m.energy - w_lattice()).abs() < 1e-8);
        assert!(m.grad_norm <= 1e-8);
    }

    #[test]
    fn energy_blows_up_near_coincidence() {
        // just above the duplicate floor: finite, and far above the lattice value
        let squeezed = TorusConfiguration::new(vec![0.0, 1e-10, 2.0, 3.0], 4).unwrap();
        let w = energy_periodic(&squeezed).unwrap();
        assert!(w.is_finite() && w - w_lattice() > 10.0);
        assert!(TorusConfiguration::new(vec![0.0, 1e-13, 2.0, 3.0], 4).is_err());
    }

    #[test]
    fn report_fields() {
        let r = EnergyReport::new(&two_point()).unwrap();
        assert!((r.gap - (r.w - w_lattice())).abs() < 1e-15);
        assert!(r.ratio.is_some());
        assert!(EnergyReport::new(&lattice(4).unwrap()).unwrap().ratio.is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn energy_translation_invariant(seed in any::<u64>(), n in 2usize..32, c in -10.0f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cfg = random_config(n, &mut rng).unwrap();
            let moved = TorusConfiguration::new(cfg.translated(c).points().to_vec(), n).unwrap();
            let (w0, w1) = (energy_periodic(&cfg).unwrap(), energy_periodic(&moved).unwrap());
            // Reducing translated points modulo N perturbs each by a few ulps of N + |c|.
            let g1: f64 = energy_gradient(&cfg).unwrap().iter().map(|v| v.abs()).sum();
            let tol = 1e-12 + 16.0 * f64::EPSILON * (n as f64 + c.abs()) * g1;
            prop_assert!((w0 - w1).abs() < tol, "{} vs {} (tol {})", w0, w1, tol);
        }

        #[test]
        fn gradient_sums_to_zero(seed in any::<u64>(), n in 2usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = energy_gradient(&random_config(n, &mut rng).unwrap()).unwrap();
            let s: f64 = g.iter().sum();
            let scale = g.iter().map(|v| v.abs()).fold(1.0, f64::max);
            prop_assert!(s.abs() < 1e-10 * scale);
        }

        #[test]
        fn energy_at_least_lattice(seed in any::<u64>(), n in 2usize..64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_config(n, &mut rng).unwrap();
            let gap = energy_periodic(&c).unwrap() - w_lattice();
            prop_assert!(gap > 0.0);
            prop_assert!(qlb_ratio(&c, Normalization::PaperRhs).unwrap() > 0.0);
        }
    }
}
