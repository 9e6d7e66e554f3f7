//! Discrete equilibrium measure: the minimizer of
//! `I(mu) = iint -log|x - y| dmu dmu + int V dmu` over probability measures
//! with piecewise-constant density on a uniform grid of cells.
//!
//! The double integral of the log kernel over a pair of cells is exact
//! (closed-form antiderivatives), so the discrete problem is a convex
//! quadratic program on the simplex. It is solved by an active-set method.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::potential::Potential;
use crate::error::{LogGasError, Result};
use crate::numeric::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumGrid {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

impl Default for EquilibriumGrid {
    fn default() -> Self {
        Self {
            lo: -3.0,
            hi: 3.0,
            cells: 480,
        }
    }
}

impl EquilibriumGrid {
    fn width(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    fn edge(&self, k: usize) -> f64 {
        self.lo + k as f64 * self.width()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    pub grid: EquilibriumGrid,
    /// Mass of each cell.
    pub masses: Vec<f64>,
    /// Value of `2 U^mu + V` on the support.
    pub constant: f64,
    /// Largest deviation of `2 U^mu(x) + V(x)` from `constant` over the
    /// midpoints of cells carrying mass.
    pub residual: f64,
}

/// `F(u) = u^2 log|u| / 2 - 3 u^2 / 4`, so that `F'' = log|u|`.
fn log_second_antiderivative(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        0.5 * u * u * u.abs().ln() - 0.75 * u * u
    }
}

/// `F(u) = u log|u| - u`, so that `F' = log|u|`.
fn log_antiderivative(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u.abs().ln() - u
    }
}

/// `(1/h^2) int_{cell} int_{cell + d} -log|x - y| dy dx` for cells of width `h`.
fn cell_kernel(d: f64, h: f64) -> f64 {
    let f = log_second_antiderivative;
    (2.0 * f(d) - f(d - h) - f(d + h)) / (h * h)
}

const MAX_ACTIVE_SET_ROUNDS: usize = 2000;

pub fn equilibrium_oracle(v: &Potential, grid: EquilibriumGrid) -> Result<DiscreteMeasure> {
    if !v.growth_ok() {
        return Err(LogGasError::BadPotential(format!(
            "{v} does not dominate 2 log|x| at infinity"
        )));
    }
    if !(grid.lo < grid.hi && grid.cells >= 8 && grid.lo.is_finite() && grid.hi.is_finite()) {
        return Err(LogGasError::InvalidArgument(format!(
            "equilibrium grid needs lo < hi and at least 8 cells, got {grid:?}"
        )));
    }
    let m = grid.cells;
    let h = grid.width();
    let toeplitz: Vec<f64> = (0..m).map(|k| cell_kernel(k as f64 * h, h)).collect();
    let kernel = DMatrix::from_fn(m, m, |i, j| toeplitz[i.abs_diff(j)]);
    let rule = GaussLegendre::cached(8);
    let vbar: Vec<f64> = (0..m)
        .map(|k| rule.integrate(grid.edge(k), grid.edge(k + 1), |x| v.evaluate(x)) / h)
        .collect();

    // Minimize mu' K mu + vbar' mu subject to sum mu = 1, mu >= 0.
    let mut free: Vec<bool> = vec![true; m];
    let mut mu = vec![0.0; m];
    let mut lambda = 0.0;
    let mut converged = false;
    for _ in 0..MAX_ACTIVE_SET_ROUNDS {
        let idx: Vec<usize> = (0..m).filter(|&k| free[k]).collect();
        if idx.is_empty() {
            return Err(LogGasError::SolverFailure("active set emptied".into()));
        }
        let f = idx.len();
        let mut a = DMatrix::zeros(f + 1, f + 1);
        let mut b = DVector::zeros(f + 1);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                a[(r, c)] = 2.0 * kernel[(i, j)];
            }
            a[(r, f)] = 1.0;
            a[(f, r)] = 1.0;
            b[r] = -vbar[i];
        }
        b[f] = 1.0;
        let sol = a
            .lu()
            .solve(&b)
            .ok_or_else(|| LogGasError::SolverFailure("singular KKT system".into()))?;
        let negative: Vec<usize> = idx
            .iter()
            .enumerate()
            .filter(|&(r, _)| sol[r] < 0.0)
            .map(|(_, &i)| i)
            .collect();
        if !negative.is_empty() {
            for i in negative {
                free[i] = false;
            }
            continue;
        }
        mu.iter_mut().for_each(|x| *x = 0.0);
        for (r, &i) in idx.iter().enumerate() {
            mu[i] = sol[r];
        }
        // Stationarity 2 K mu + vbar + lambda = 0 on the free set; a fixed
        // cell whose reduced gradient is negative should carry mass.
        lambda = sol[f];
        let grad = &kernel * DVector::from_column_slice(&mu) * 2.0;
        let worst = (0..m)
            .filter(|&k| !free[k])
            .map(|k| (k, grad[k] + vbar[k] + lambda))
            .filter(|&(_, r)| r < -1e-12)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match worst {
            Some((k, _)) => free[k] = true,
            None => {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(LogGasError::SolverFailure(format!(
            "active set did not settle in {MAX_ACTIVE_SET_ROUNDS} rounds"
        )));
    }
    let total: f64 = mu.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(LogGasError::SolverFailure(format!("mass {total} drifted from 1")));
    }

    let mut measure = DiscreteMeasure {
        grid,
        masses: mu,
        constant: -lambda,
        residual: 0.0,
    };
    let support: Vec<usize> = (0..m).filter(|&k| measure.masses[k] > 0.0).collect();
    let values: Vec<f64> = support
        .iter()
        .map(|&k| measure.euler_lagrange(v, 0.5 * (grid.edge(k) + grid.edge(k + 1))))
        .collect();
    measure.constant = values.iter().sum::<f64>() / values.len() as f64;
    measure.residual = values
        .iter()
        .fold(0.0f64, |r, x| r.max((x - measure.constant).abs()));
    Ok(measure)
}

impl DiscreteMeasure {
    /// `2 int -log|x - y| dmu(y) + V(x)`.
    pub fn euler_lagrange(&self, v: &Potential, x: f64) -> f64 {
        let h = self.grid.width();
        let potential: f64 = self
            .masses
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(k, &m)| {
                let (y0, y1) = (self.grid.edge(k), self.grid.edge(k + 1));
                m / h * (log_antiderivative(x - y1) - log_antiderivative(x - y0))
            })
            .sum();
        2.0 * potential + v.evaluate(x)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn density(&self, x: f64) -> f64 {
        let h = self.grid.width();
        let k = ((x - self.grid.lo) / h).floor();
        if k < 0.0 || k >= self.grid.cells as f64 {
            0.0
        } else {
            self.masses[k as usize] / h
        }
    }

    /// Distribution function, linear inside each cell.
    pub fn cdf(&self, x: f64) -> f64 {
        let h = self.grid.width();
        let pos = (x - self.grid.lo) / h;
        if pos <= 0.0 {
            return 0.0;
        }
        if pos >= self.grid.cells as f64 {
            return 1.0;
        }
        let k = pos.floor() as usize;
        let below: f64 = self.masses[..k].iter().sum();
        (below + (pos - k as f64) * self.masses[k]).min(1.0)
    }

    /// Outer edges of the cells carrying mass.
    pub fn support(&self) -> (f64, f64) {
        let first = self.masses.iter().position(|&m| m > 0.0).unwrap_or(0);
        let last = self
            .masses
            .iter()
            .rposition(|&m| m > 0.0)
            .unwrap_or(self.grid.cells - 1);
        (self.grid.edge(first), self.grid.edge(last + 1))
    }

    /// Kolmogorov distance between the empirical measure of `points` and this one.
    pub fn kolmogorov_distance(&self, points: &[f64]) -> f64 {
        let mut xs = points.to_vec();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
            let f = self.cdf(x);
            d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
        })
    }
}
