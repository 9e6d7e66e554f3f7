//! The `N`-particle log-gas Hamiltonian
//! `w_N(x) = -sum_{i != j} log|x_i - x_j| + N sum_i V(x_i)`
//! and its minimizers (weighted Fekete sets).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::potential::Potential;
use crate::error::{LogGasError, Result};

/// Relative separation below which two points count as coincident.
const COINCIDENCE: f64 = 1e-300;

fn check_distinct(points: &[f64]) -> Result<()> {
    if points.iter().any(|x| !x.is_finite()) {
        return Err(LogGasError::NonFinite(
            points.iter().copied().find(|x| !x.is_finite()).unwrap_or(f64::NAN),
        ));
    }
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            if (x - y).abs() <= COINCIDENCE * x.abs().max(y.abs()).max(1.0) {
                return Err(LogGasError::Coincidence);
            }
        }
    }
    Ok(())
}

pub fn hamiltonian(points: &[f64], v: &Potential) -> Result<f64> {
    check_distinct(points)?;
    let n = points.len() as f64;
    let mut interaction = 0.0;
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            interaction += (x - y).abs().ln();
        }
    }
    let confinement: f64 = points.iter().map(|&x| v.evaluate(x)).sum();
    Ok(-2.0 * interaction + n * confinement)
}

pub fn hamiltonian_gradient(points: &[f64], v: &Potential) -> Result<Vec<f64>> {
    check_distinct(points)?;
    Ok(gradient_unchecked(points, v))
}

fn gradient_unchecked(points: &[f64], v: &Potential) -> Vec<f64> {
    let n = points.len() as f64;
    points
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let repulsion: f64 = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &y)| 1.0 / (x - y))
                .sum();
            -2.0 * repulsion + n * v.derivative(x)
        })
        .collect()
}

fn hessian(points: &[f64], v: &Potential) -> DMatrix<f64> {
    let n = points.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = n as f64 * v.second_derivative(points[i]);
        for j in 0..n {
            if j != i {
                let c = 2.0 / (points[i] - points[j]).powi(2);
                h[(i, j)] = -c;
                diag += c;
            }
        }
        h[(i, i)] = diag;
    }
    h
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeketeResult {
    pub points: Vec<f64>,
    pub w_value: f64,
    /// Largest absolute gradient component.
    pub grad_norm: f64,
    pub iterations: usize,
    /// `w_N` after every accepted step, starting from the initial value.
    #[serde(skip)]
    pub energy_trace: Vec<f64>,
}

pub const FEKETE_MAX_ITERATIONS: usize = 500;

/// Damped Newton descent on `w_N` with Armijo backtracking. Steps that would
/// reorder the points are shortened. The Hessian is shifted towards the
/// identity when it fails to be positive definite.
pub fn fekete_optimize(v: &Potential, n: usize, init: &[f64], tol: f64) -> Result<FeketeResult> {
    if init.len() != n {
        return Err(LogGasError::BadLength {
            expected: n,
            got: init.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(LogGasError::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut x = init.to_vec();
    x.sort_by(f64::total_cmp);
    let mut w = hamiltonian(&x, v)?;
    let mut g = gradient_unchecked(&x, v);
    let mut trace = vec![w];
    for it in 0..FEKETE_MAX_ITERATIONS {
        let gn = sup_norm(&g);
        if gn <= tol {
            return Ok(FeketeResult {
                points: x,
                w_value: w,
                grad_norm: gn,
                iterations: it,
                energy_trace: trace,
            });
        }
        let dir = newton_direction(&x, &g, v);
        let slope: f64 = dir.iter().zip(&g).map(|(d, gi)| d * gi).sum();
        let noise = 64.0 * f64::EPSILON * w.abs().max(1.0);
        let mut t = max_ordered_step(&x, &dir);
        let mut accepted = None;
        if -slope > noise {
            for _ in 0..60 {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, d)| xi + t * d).collect();
                if trial.windows(2).all(|p| p[1] > p[0]) {
                    if let Ok(wt) = hamiltonian(&trial, v) {
                        if wt <= w + 1e-4 * t * slope {
                            accepted = Some((trial, wt));
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
        }
        if accepted.is_none() {
            // Energy differences below rounding: accept a step that keeps the
            // energy within rounding and reduces the gradient.
            let mut t = max_ordered_step(&x, &dir);
            for _ in 0..8 {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, d)| xi + t * d).collect();
                if trial.windows(2).all(|p| p[1] > p[0]) {
                    if let Ok(wt) = hamiltonian(&trial, v) {
                        if wt <= w + noise && sup_norm(&gradient_unchecked(&trial, v)) < gn {
                            accepted = Some((trial, wt));
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
        }
        match accepted {
            Some((trial, wt)) => {
                x = trial;
                w = wt;
                g = gradient_unchecked(&x, v);
                trace.push(w);
                let scale = x.iter().fold(1.0f64, |m, xi| m.max(xi.abs()));
                if x.windows(2).any(|p| p[1] - p[0] <= 1e-14 * scale) {
                    return Err(LogGasError::OrderingCollapse);
                }
            }
            None => {
                return Err(LogGasError::MaxIterations {
                    iterations: it,
                    residual: gn,
                })
            }
        }
    }
    Err(LogGasError::MaxIterations {
        iterations: FEKETE_MAX_ITERATIONS,
        residual: sup_norm(&g),
    })
}

fn newton_direction(x: &[f64], g: &[f64], v: &Potential) -> Vec<f64> {
    let h = hessian(x, v);
    let rhs = -DVector::from_column_slice(g);
    let scale = h.diagonal().amax().max(1.0);
    let mut shift = 0.0;
    loop {
        let mut m = h.clone();
        for i in 0..x.len() {
            m[(i, i)] += shift;
        }
        if let Some(chol) = m.cholesky() {
            return chol.solve(&rhs).iter().copied().collect();
        }
        shift = if shift == 0.0 { 1e-8 * scale } else { shift * 10.0 };
        if shift > 1e8 * scale {
            return rhs.iter().map(|r| r / scale).collect();
        }
    }
}

/// Largest `t <= 1` keeping every gap at least half its current size.
fn max_ordered_step(x: &[f64], dir: &[f64]) -> f64 {
    let mut t = 1.0f64;
    for k in 1..x.len() {
        let closing = dir[k - 1] - dir[k];
        if closing > 0.0 {
            t = t.min(0.5 * (x[k] - x[k - 1]) / closing);
        }
    }
    t
}

/// Starting points spread over `[-r, r]` with `r` adapted to the growth of
/// `V` at the scale of the equilibrium support.
pub fn default_init(v: &Potential, n: usize) -> Vec<f64> {
    let r = (1..=8)
        .map(|k| 0.5 * k as f64)
        .find(|&r| v.evaluate(r).min(v.evaluate(-r)) - v.evaluate(0.0) >= 2.0)
        .unwrap_or(4.0);
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| -r + 2.0 * r * (i as f64 + 0.5) / n as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hamiltonian_examples() {
        let q = Potential::quadratic();
        assert!((hamiltonian(&[-0.5, 0.5], &q).unwrap() - 1.0).abs() < 1e-15);
        let zero: Potential = "poly:0".parse().unwrap();
        let w = hamiltonian(&[0.0, 1.0, 2.0], &zero).unwrap();
        assert!((w + 2.0 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(hamiltonian(&[1.0, 1.0], &q), Err(LogGasError::Coincidence));
    }

    #[test]
    fn gradient_examples() {
        let q = Potential::quadratic();
        let g = hamiltonian_gradient(&[-0.5, 0.5], &q).unwrap();
        assert!(g.iter().all(|c| c.abs() < 1e-15));
        let zero: Potential = "poly:0".parse().unwrap();
        let g = hamiltonian_gradient(&[0.0, 1.0, 2.0, 3.0], &zero).unwrap();
        assert!(g.iter().sum::<f64>().abs() < 1e-14);
        assert!((g[0] + g[3]).abs() < 1e-14 && (g[1] + g[2]).abs() < 1e-14);
    }

    #[test]
    fn two_point_fekete() {
        let r = fekete_optimize(&Potential::quadratic(), 2, &[-1.0, 1.0], 1e-10).unwrap();
        assert!((r.points[0] + 0.5).abs() < 1e-10 && (r.points[1] - 0.5).abs() < 1e-10);
        assert!((r.w_value - 1.0).abs() < 1e-12);
        assert!(r.grad_norm <= 1e-10);
    }

    #[test]
    fn fekete_is_fixed_point_and_descends() {
        let v = Potential::quartic();
        let r = fekete_optimize(&v, 40, &default_init(&v, 40), 1e-9).unwrap();
        assert!(r.energy_trace.windows(2).all(|p| p[1] <= p[0] + 1e-12 * p[0].abs()));
        assert!(r.points.windows(2).all(|p| p[1] > p[0]));
        let again = fekete_optimize(&v, 40, &r.points, 1e-9).unwrap();
        assert_eq!(again.iterations, 0);
        assert_eq!(again.points, r.points);
    }

    #[test]
    fn rejects_bad_input() {
        let q = Potential::quadratic();
        assert!(fekete_optimize(&q, 3, &[0.0, 1.0], 1e-8).is_err());
        assert_eq!(
            fekete_optimize(&q, 2, &[0.5, 0.5], 1e-8).unwrap_err(),
            LogGasError::Coincidence
        );
        assert!(fekete_optimize(&q, 2, &[0.0, 1.0], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_and_fd_consistent(mut xs in proptest::collection::vec(-3.0f64..3.0, 2..12), seed in any::<u64>()) {
            xs.sort_by(f64::total_cmp);
            xs.dedup_by(|a, b| (*a - *b).abs() < 0.05);
            prop_assume!(xs.len() >= 2);
            let v: Potential = "poly:0.1,-0.2,1,0,0.3".parse().unwrap();
            let w = hamiltonian(&xs, &v).unwrap();
            let mut perm = xs.clone();
            perm.rotate_left((seed % xs.len() as u64) as usize);
            perm.reverse();
            prop_assert!((hamiltonian(&perm, &v).unwrap() - w).abs() <= 1e-12 * w.abs().max(1.0));
            let g = hamiltonian_gradient(&xs, &v).unwrap();
            for i in 0..xs.len() {
                let at = |d: f64| {
                    let mut y = xs.clone();
                    y[i] += d;
                    hamiltonian(&y, &v).unwrap()
                };
                let h = 2e-4;
                let fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
                prop_assert!((fd - g[i]).abs() <= 1e-6 * g[i].abs().max(1.0), "{} vs {}", fd, g[i]);
            }
        }
    }
}
