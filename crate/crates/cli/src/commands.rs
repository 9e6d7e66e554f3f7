use std::f64::consts::PI;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use loggas::energy::{
    defect_functional, energy_periodic, minimize_energy_with, qlb_sweep, w_lattice, EnergyReport,
    MinimizeOptions, Minimized, Normalization, QlbSummary,
};
use loggas::field::{energy_via_definition, DefinitionEnergy, FieldEval, Planar, QuadratureSpec};
use loggas::gibbs::{
    equilibrium_oracle, fekete_optimize, hamiltonian::default_init, mcmc_sample, sweep_beta,
    EquilibriumGrid, FeketeResult, McmcOptions, Potential, SweepBetaOptions, SweepBetaReport,
};
use loggas::io::{parse_config_csv, parse_config_json, parse_grid_json, write_config_json, write_samples_csv};
use loggas::process::{
    count_statistics, pairing_lattice, pairing_monte_carlo, pairing_periodic, theorem1_sweep,
    CountStats, PairingResult, Shape, SweepPoint, TestFunction2D,
};
use loggas::torus::random_config;
use loggas::{LogGasError, TorusConfiguration};

use crate::args::*;
use crate::report::{read_text, write_text, CliError, CliResult};

pub fn load_config(path: &Path) -> CliResult<TorusConfiguration> {
    let text = read_text(path)?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok(if is_csv {
        parse_config_csv(&text)?
    } else {
        parse_config_json(&text)?
    })
}

pub fn load_phi(spec: &str) -> CliResult<TestFunction2D> {
    match spec.strip_prefix("grid:") {
        Some(path) => {
            let grid = parse_grid_json(&read_text(Path::new(path))?)?;
            Ok(TestFunction2D::new(Shape::Grid(grid))?)
        }
        None => Ok(spec.parse()?),
    }
}

fn load_potential(spec: &str) -> CliResult<Potential> {
    Ok(spec.parse()?)
}

#[derive(Serialize)]
pub struct EnergyOut {
    #[serde(flatten)]
    report: EnergyReport,
    w_lattice: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    definition: Option<DefinitionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    difference: Option<f64>,
}

#[derive(Serialize)]
struct DefinitionOut {
    #[serde(flatten)]
    energy: DefinitionEnergy,
    quadrature: QuadratureSpec,
}

pub fn energy(a: &EnergyArgs) -> CliResult<EnergyOut> {
    let config = load_config(&a.config)?;
    let report = EnergyReport::new(&config)?;
    let mut out = EnergyOut {
        w_lattice: w_lattice(),
        definition: None,
        difference: None,
        report,
    };
    if a.via_definition {
        let mut spec = QuadratureSpec::for_config(&config);
        if let Some(levels) = &a.eta_levels {
            spec.eta_levels = levels.clone();
        }
        if let Some(y) = a.ymax {
            spec.y_max = y;
        }
        if let Some(tol) = a.tol {
            spec.tol = tol;
        }
        let energy = energy_via_definition(&config, &spec)?;
        out.difference = Some(energy.value - out.report.w);
        out.definition = Some(DefinitionOut {
            energy,
            quadrature: spec,
        });
    } else if a.eta_levels.is_some() || a.ymax.is_some() || a.tol.is_some() {
        return Err(CliError::Usage(
            "--eta-levels, --ymax and --tol require --via-definition".into(),
        ));
    }
    Ok(out)
}

#[derive(Serialize)]
pub struct DefectOut {
    normalization: NormalizationArg,
    defect: f64,
    gap: f64,
    /// Absent for lattice translates.
    ratio: Option<f64>,
}

pub fn defect(a: &DefectArgs) -> CliResult<DefectOut> {
    let config = load_config(&a.config)?;
    let normalization = match a.normalization {
        NormalizationArg::PaperRhs => Normalization::PaperRhs,
        NormalizationArg::Prefactored => Normalization::Prefactored,
    };
    let defect = defect_functional(&config, normalization);
    let gap = energy_periodic(&config)? - w_lattice();
    Ok(DefectOut {
        normalization: a.normalization,
        defect,
        gap,
        ratio: (defect > 0.0).then(|| gap / defect),
    })
}

#[derive(Serialize)]
pub struct QlbOut {
    rows: Vec<QlbSummary>,
}

pub fn qlb(a: &QlbSweepArgs) -> CliResult<QlbOut> {
    Ok(QlbOut {
        rows: qlb_sweep(&a.n, a.count, a.seed)?,
    })
}

#[derive(Serialize)]
pub struct MinimizeOut {
    initial_energy: f64,
    #[serde(flatten)]
    result: Minimized,
    gap: f64,
    is_lattice_translate: bool,
}

pub fn minimize(a: &MinimizeArgs) -> CliResult<MinimizeOut> {
    let init = match (&a.config, a.n) {
        (Some(path), _) => load_config(path)?,
        (None, Some(n)) => random_config(n, &mut ChaCha8Rng::seed_from_u64(a.seed))?,
        (None, None) => return Err(CliError::Usage("one of --config or --N is required".into())),
    };
    let result = minimize_energy_with(&init, &MinimizeOptions::new(a.tol))?;
    if let Some(path) = &a.out {
        write_text(path, &write_config_json(&result.config))?;
    }
    Ok(MinimizeOut {
        initial_energy: energy_periodic(&init)?,
        gap: result.energy - w_lattice(),
        is_lattice_translate: result.config.is_lattice_translate(1e-6),
        result,
    })
}

#[derive(Serialize)]
struct FluxRow {
    charge: usize,
    radius: f64,
    flux: f64,
    expected: f64,
}

#[derive(Serialize)]
struct CirculationRow {
    rectangle: [f64; 4],
    circulation: f64,
}

#[derive(Serialize)]
pub struct FieldCheckOut {
    flux: Vec<FluxRow>,
    max_flux_error: f64,
    circulation: Vec<CirculationRow>,
    max_circulation: f64,
}

pub fn field_check(a: &FieldCheckArgs) -> CliResult<FieldCheckOut> {
    let config = load_config(&a.config)?;
    let min_gap = config.min_gap();
    for &r in &a.radii {
        if !(r > 0.0 && r < min_gap && r < 0.5) {
            return Err(LogGasError::InvalidArgument(format!(
                "radius {r} must lie in (0, min(min_gap, 1/2)) = (0, {})",
                min_gap.min(0.5)
            ))
            .into());
        }
    }
    let field = FieldEval::new(&config);
    let mut flux = Vec::new();
    let mut max_flux_error = 0.0f64;
    for (i, &x) in config.points().iter().enumerate() {
        for &r in &a.radii {
            let value = field.flux_through_circle(Planar::new(x, 0.0), r)?;
            let expected = 2.0 * PI * (1.0 - 2.0 * r);
            max_flux_error = max_flux_error.max((value - expected).abs());
            flux.push(FluxRow {
                charge: i,
                radius: r,
                flux: value,
                expected,
            });
        }
    }
    let mut circulation = Vec::new();
    let mut max_circulation = 0.0f64;
    let n = config.len();
    for i in 0..n {
        let (lo, hi) = (config.point(i as isize), config.point(i as isize + 1));
        let margin = 0.25 * (hi - lo);
        let rects = [
            [lo + margin, hi - margin, -0.5, 0.5],
            [lo - 0.5, hi + 0.5, 0.25, 1.5],
        ];
        for rect in rects {
            let c = field.circulation_rectangle(rect[0], rect[1], rect[2], rect[3])?;
            max_circulation = max_circulation.max(c.abs());
            circulation.push(CirculationRow {
                rectangle: rect,
                circulation: c,
            });
        }
    }
    Ok(FieldCheckOut {
        flux,
        max_flux_error,
        circulation,
        max_circulation,
    })
}

#[derive(Serialize)]
pub struct CorrelateOut {
    #[serde(flatten)]
    pairing: PairingResult,
    lattice_value: f64,
    correlation_gap: f64,
    support_half_width: f64,
    sup_norm: f64,
    grad_sup_norm: f64,
}

pub fn correlate(a: &CorrelateArgs) -> CliResult<CorrelateOut> {
    let config = load_config(&a.config)?;
    let phi = load_phi(&a.phi)?;
    let pairing = if a.mc {
        pairing_monte_carlo(&config, &phi, a.samples, a.seed)?
    } else {
        pairing_periodic(&config, &phi)?
    };
    let lattice_value = pairing_lattice(&phi)?.value;
    Ok(CorrelateOut {
        correlation_gap: (pairing.value - lattice_value).abs(),
        lattice_value,
        pairing,
        support_half_width: phi.support_half_width(),
        sup_norm: phi.sup_norm(),
        grad_sup_norm: phi.grad_sup_norm(),
    })
}

pub fn counts(a: &CountsArgs) -> CliResult<CountStats> {
    let config = load_config(&a.config)?;
    Ok(count_statistics(&config, a.t)?)
}

fn parse_mode(spec: &str, n: usize) -> CliResult<usize> {
    let bad = || CliError::Usage(format!("bad mode `{spec}`: expected an integer or N/k"));
    let s = spec.trim();
    match s.strip_prefix("N/") {
        Some(k) => {
            let k: usize = k.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            Ok(n / k)
        }
        None if s == "N" => Ok(n),
        None => s.parse().map_err(|_| bad()),
    }
}

pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> CliResult<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite() && count >= 1) {
        return Err(CliError::Usage(format!(
            "need 0 < eps-min <= eps-max and eps-count >= 1, got {lo}, {hi}, {count}"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count)
        .map(|k| if k + 1 == count { hi } else { lo * (step * k as f64).exp() })
        .collect())
}

#[derive(Serialize)]
pub struct Theorem1Out {
    phis: Vec<String>,
    eps: Vec<f64>,
    points: Vec<SweepPoint>,
    min_ratio: f64,
    max_ratio: f64,
    spread: f64,
    /// Largest `|pairing gap| / sqrt(energy gap)` seen over the sweep.
    empirical_constant: f64,
}

pub fn theorem1(a: &Theorem1SweepArgs) -> CliResult<Theorem1Out> {
    let phis = a
        .phi
        .iter()
        .map(|s| load_phi(s))
        .collect::<CliResult<Vec<_>>>()?;
    let eps = geometric_grid(a.eps_min, a.eps_max, a.eps_count)?;
    let mut modes_by_n = Vec::new();
    for &n in &a.n {
        let qs = a
            .modes
            .iter()
            .map(|m| parse_mode(m, n))
            .collect::<CliResult<Vec<_>>>()?;
        modes_by_n.push((n, qs));
    }
    let modes = |n: usize| {
        modes_by_n
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, q)| q.clone())
            .unwrap_or_default()
    };
    let points = theorem1_sweep(&a.n, &modes, &eps, &phis)?;
    if points.is_empty() {
        return Err(LogGasError::EmptyWindow.into());
    }
    let ratios = points.iter().map(|p| p.record.ratio);
    let min_ratio = ratios.clone().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.fold(0.0, f64::max);
    Ok(Theorem1Out {
        phis: a.phi.clone(),
        eps,
        spread: max_ratio / min_ratio,
        empirical_constant: max_ratio,
        min_ratio,
        max_ratio,
        points,
    })
}

#[derive(Serialize)]
pub struct FeketeOut {
    potential: Potential,
    #[serde(flatten)]
    result: FeketeResult,
    equilibrium_residual: f64,
    kolmogorov_distance: f64,
}

pub fn fekete(a: &FeketeArgs) -> CliResult<FeketeOut> {
    let v = load_potential(&a.potential)?;
    let result = fekete_optimize(&v, a.n, &default_init(&v, a.n), a.tol)?;
    let measure = equilibrium_oracle(&v, EquilibriumGrid::default())?;
    Ok(FeketeOut {
        equilibrium_residual: measure.residual,
        kolmogorov_distance: measure.kolmogorov_distance(&result.points),
        potential: v,
        result,
    })
}

#[derive(Serialize)]
pub struct SampleOut {
    potential: Potential,
    recorded: usize,
    first_step: Option<usize>,
    last_step: Option<usize>,
    acceptance_rate: f64,
    proposal_width: f64,
    acceptance_warning: bool,
}

pub fn sample(a: &SampleArgs) -> CliResult<SampleOut> {
    let v = load_potential(&a.potential)?;
    let set = mcmc_sample(
        &v,
        a.n,
        McmcOptions {
            beta: a.beta,
            steps: a.steps,
            burn_in: a.burn_in,
            thinning: a.thinning,
            seed: a.seed,
        },
    )?;
    write_text(&a.out, &write_samples_csv(&set))?;
    Ok(SampleOut {
        potential: v,
        recorded: set.len(),
        first_step: set.steps.first().copied(),
        last_step: set.steps.last().copied(),
        acceptance_rate: set.acceptance_rate,
        proposal_width: set.proposal_width,
        acceptance_warning: set.acceptance_warning,
    })
}

#[derive(Serialize)]
pub struct SweepBetaOut {
    potential: Potential,
    grid: EquilibriumGrid,
    #[serde(flatten)]
    report: SweepBetaReport,
}

pub fn sweep(a: &SweepBetaArgs) -> CliResult<SweepBetaOut> {
    let v = load_potential(&a.potential)?;
    let phi = load_phi(&a.phi)?;
    let grid = EquilibriumGrid::default();
    let report = sweep_beta(
        &v,
        a.n,
        &phi,
        &SweepBetaOptions {
            betas: a.betas.clone(),
            seeds: a.seeds.clone(),
            steps: a.steps,
            burn_in: a.burn_in,
            thinning: a.thinning,
            center: a.center,
            grid,
        },
    )?;
    Ok(SweepBetaOut {
        potential: v,
        grid,
        report,
    })
}
