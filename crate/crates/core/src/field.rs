//! The periodic electric field of a torus configuration and the
//! excised-ball energy computed from it by quadrature.
//!
//! With `H(z) = sum_i -log|2 sin(pi (z - a_i) / N)| + pi |y|` one has
//! `-Laplace H = 2 pi (sum_i delta_{a_i} - delta_R)`. The field returned here
//! is `E = -grad H`, the orientation for which `div E = 2 pi (nu - delta_R)`:
//! the outward flux through a small circle of radius `r` around a charge is
//! `2 pi (1 - 2 r)`. `|E|^2`, and hence every energy, is the same for either
//! orientation.
//!
//! In complex notation, with `S(z) = sum_i cot(pi (z - a_i) / N)`,
//! `E = (pi/N) (Re S, -Im S) - (0, pi sign y)`. Above the line the two terms
//! cancel exponentially, so for `|y|` of order `N` the field is evaluated
//! through `cot w + i = -2 i q / (1 - q)`, `q = exp(2 i w)`, which carries no
//! cancellation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LogGasError, Result};
use crate::numeric::{extrapolate_to_zero, pairwise_sum, GaussLegendre};
use crate::torus::TorusConfiguration;

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Planar {
    pub x: f64,
    pub y: f64,
}

impl Planar {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Closed-form field evaluator bound to one configuration.
#[derive(Debug, Clone)]
pub struct FieldEval<'a> {
    config: &'a TorusConfiguration,
}

impl<'a> FieldEval<'a> {
    pub fn new(config: &'a TorusConfiguration) -> Self {
        Self { config }
    }

    pub fn config(&self) -> &TorusConfiguration {
        self.config
    }

    /// `E(z)`; fails on (or within `1e-14 N` of) a charge.
    pub fn at(&self, z: Planar) -> Result<[f64; 2]> {
        let n = self.config.len() as f64;
        if z.y.abs() < 1e-14 * n {
            for &a in self.config.points() {
                let d = (z.x - a).rem_euclid(n);
                if d.min(n - d).hypot(z.y) < 1e-14 * n {
                    return Err(LogGasError::AtCharge);
                }
            }
        }
        Ok(self.eval_unchecked(z))
    }

    /// `|E(z)|^2` without the charge check (quadrature nodes never sit on a
    /// charge).
    fn norm2(&self, x: f64, y: f64) -> f64 {
        let [ex, ey] = self.eval_unchecked(Planar::new(x, y));
        ex * ex + ey * ey
    }

    fn eval_unchecked(&self, z: Planar) -> [f64; 2] {
        let n = self.config.len() as f64;
        let k = PI / n;
        let v = k * z.y.abs();
        let (ex, ey_upper) = if v < 1.0 {
            let mut s = Complex64::new(0.0, 0.0);
            for &a in self.config.points() {
                let u = k * (z.x - a);
                // cot(u + iv) = (sin 2u - i sinh 2v) / (2 (sin^2 u + sinh^2 v))
                let den = 2.0 * (u.sin().powi(2) + v.sinh().powi(2));
                s += Complex64::new((2.0 * u).sin() / den, -(2.0 * v).sinh() / den);
            }
            (k * s.re, -k * s.im - PI)
        } else {
            let mut d = Complex64::new(0.0, 0.0);
            for &a in self.config.points() {
                let u = k * (z.x - a);
                let q = Complex64::from_polar((-2.0 * v).exp(), 2.0 * u);
                d += Complex64::new(0.0, -2.0) * q / (Complex64::new(1.0, 0.0) - q);
            }
            (k * d.re, -k * d.im)
        };
        // E_x is even in y, E_y odd; on the line itself report the mean of
        // the one-sided limits
        let ey = if z.y > 0.0 {
            ey_upper
        } else if z.y < 0.0 {
            -ey_upper
        } else {
            0.0
        };
        [ex, ey]
    }

    /// Outward flux through the circle of radius `r` about `center`.
    ///
    /// The field jumps across the real line, so the two half-circles are
    /// integrated separately with composite Gauss-Legendre.
    pub fn flux_through_circle(&self, center: Planar, r: f64) -> Result<f64> {
        let rule = GaussLegendre::cached(20);
        let panels = 16;
        let mut terms = Vec::new();
        for half in 0..2 {
            let base = PI * half as f64;
            for p in 0..panels {
                let lo = base + PI * p as f64 / panels as f64;
                let hi = base + PI * (p + 1) as f64 / panels as f64;
                for (theta, w) in rule.mapped(lo, hi) {
                    let (c, s) = (theta.cos(), theta.sin());
                    let e = self.at(Planar::new(center.x + r * c, center.y + r * s))?;
                    terms.push(w * r * (e[0] * c + e[1] * s));
                }
            }
        }
        Ok(pairwise_sum(&terms))
    }

    /// Counter-clockwise circulation around an axis-aligned rectangle.
    pub fn circulation_rectangle(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<f64> {
        let rule = GaussLegendre::cached(20);
        let mut terms = Vec::new();
        let mut segment = |from: Planar, to: Planar| -> Result<()> {
            let mut cuts = vec![0.0, 1.0];
            if (from.y < 0.0 && to.y > 0.0) || (from.y > 0.0 && to.y < 0.0) {
                cuts.insert(1, from.y / (from.y - to.y));
            }
            let (dx, dy) = (to.x - from.x, to.y - from.y);
            for w in cuts.windows(2) {
                let pieces = 8;
                for p in 0..pieces {
                    let lo = w[0] + (w[1] - w[0]) * p as f64 / pieces as f64;
                    let hi = w[0] + (w[1] - w[0]) * (p + 1) as f64 / pieces as f64;
                    for (t, wt) in rule.mapped(lo, hi) {
                        let e = self.at(Planar::new(from.x + t * dx, from.y + t * dy))?;
                        terms.push(wt * (e[0] * dx + e[1] * dy));
                    }
                }
            }
            Ok(())
        };
        segment(Planar::new(x0, y0), Planar::new(x1, y0))?;
        segment(Planar::new(x1, y0), Planar::new(x1, y1))?;
        segment(Planar::new(x1, y1), Planar::new(x0, y1))?;
        segment(Planar::new(x0, y1), Planar::new(x0, y0))?;
        Ok(pairwise_sum(&terms))
    }
}

pub fn field_at(config: &TorusConfiguration, z: Planar) -> Result<[f64; 2]> {
    FieldEval::new(config).at(z)
}

/// Parameters of the excised-ball quadrature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Excision radii, at least two, all below half the minimal gap.
    pub eta_levels: Vec<f64>,
    /// Vertical truncation height, at least `N`.
    pub y_max: f64,
    /// Gauss-Legendre order per panel direction.
    pub order: usize,
    /// Allowed disagreement between the full extrapolation and the one
    /// using only the two finest levels. This indicator overstates the
    /// actual error by orders of magnitude.
    pub tol: f64,
}

impl QuadratureSpec {
    /// Three halving levels below `min(0.1, 0.4 * min_gap / 2)` and
    /// `y_max = 2 N`.
    pub fn for_config(config: &TorusConfiguration) -> Self {
        let top = 0.1f64.min(0.2 * config.min_gap());
        Self {
            eta_levels: vec![top, top / 2.0, top / 4.0],
            y_max: 2.0 * config.len() as f64,
            order: 12,
            tol: 5e-2,
        }
    }

    pub fn validate(&self, config: &TorusConfiguration) -> Result<()> {
        let half_gap = 0.5 * config.min_gap();
        if self.eta_levels.len() < 2 {
            return Err(LogGasError::BadQuadrature(
                "need at least two eta levels".into(),
            ));
        }
        for &eta in &self.eta_levels {
            if !(eta > 0.0 && eta < half_gap) {
                return Err(LogGasError::BadQuadrature(format!(
                    "eta {eta} must lie in (0, {half_gap})"
                )));
            }
        }
        let mut sorted = self.eta_levels.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(LogGasError::BadQuadrature("eta levels must be distinct".into()));
        }
        if !(self.y_max >= config.len() as f64) || !self.y_max.is_finite() {
            return Err(LogGasError::BadQuadrature(format!(
                "y_max {} must be at least N = {}",
                self.y_max,
                config.len()
            )));
        }
        if self.order < 2 {
            return Err(LogGasError::BadQuadrature("order must be at least 2".into()));
        }
        if !(self.tol > 0.0) {
            return Err(LogGasError::BadQuadrature("tol must be positive".into()));
        }
        Ok(())
    }
}

/// Excised-ball energy and its extrapolation diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefinitionEnergy {
    /// Extrapolated `eta -> 0` value.
    pub value: f64,
    /// `(eta, bracket(eta))` before extrapolation, finest last.
    pub levels: Vec<(f64, f64)>,
    /// `|extrapolation(all) - extrapolation(two finest)|`.
    pub extrapolation_error: f64,
    /// Slope of the bracket between the two finest levels (the first-order
    /// coefficient in `eta`).
    pub eta_slope: f64,
}

/// `(1/N) [ 1/2 int |E|^2 over one period strip minus balls B(a_i, eta)
/// + pi N log eta ]`, extrapolated to `eta = 0`.
///
/// One period window replaces the cut-off family because the field is
/// periodic. Each charge sits in a square box of half-side `h = min_gap/2`
/// integrated in polar coordinates with logarithmic radius; the rest of the
/// strip is tiled by tensor Gauss-Legendre cells graded geometrically away
/// from the charges. Only `y > 0` is integrated (`|E|^2` is even in `y`).
pub fn energy_via_definition(
    config: &TorusConfiguration,
    spec: &QuadratureSpec,
) -> Result<DefinitionEnergy> {
    spec.validate(config)?;
    let field = FieldEval::new(config);
    let n = config.len();
    let nf = n as f64;
    let h = 0.5 * config.min_gap();
    let rule = GaussLegendre::cached(spec.order);

    let bulk = bulk_integral(&field, h, spec.y_max, &rule);

    let mut levels: Vec<(f64, f64)> = spec
        .eta_levels
        .iter()
        .map(|&eta| {
            let boxes: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|i| box_integral(&field, config.points()[i], h, eta, &rule))
                .collect();
            let total = bulk + pairwise_sum(&boxes);
            (eta, total / nf + PI * eta.ln())
        })
        .collect();
    levels.sort_by(|a, b| b.0.total_cmp(&a.0));

    let hs: Vec<f64> = levels.iter().map(|l| l.0).collect();
    let vs: Vec<f64> = levels.iter().map(|l| l.1).collect();
    let value = extrapolate_to_zero(&hs, &vs);
    let k = hs.len();
    let coarse = extrapolate_to_zero(&hs[k - 2..], &vs[k - 2..]);
    let extrapolation_error = (value - coarse).abs();
    let eta_slope = (vs[k - 2] - vs[k - 1]) / (hs[k - 2] - hs[k - 1]);
    if extrapolation_error > spec.tol {
        return Err(LogGasError::MeshTooCoarse {
            difference: extrapolation_error,
            tolerance: spec.tol,
        });
    }
    Ok(DefinitionEnergy {
        value,
        levels,
        extrapolation_error,
        eta_slope,
    })
}

/// `int_{box minus B(a, eta), y > 0} |E|^2` in polar coordinates about `a`,
/// radius written as `r = exp(s)` so the `1/r^2` singularity becomes a
/// bounded integrand.
fn box_integral(field: &FieldEval, a: f64, h: f64, eta: f64, rule: &GaussLegendre) -> f64 {
    let quarter = PI / 4.0;
    let theta_panels = 4;
    let mut terms = Vec::new();
    for sector in 0..4 {
        let (lo, hi) = (sector as f64 * quarter, (sector + 1) as f64 * quarter);
        for tp in 0..theta_panels {
            let t0 = lo + (hi - lo) * tp as f64 / theta_panels as f64;
            let t1 = lo + (hi - lo) * (tp + 1) as f64 / theta_panels as f64;
            for (theta, wt) in rule.mapped(t0, t1) {
                let (c, s) = (theta.cos(), theta.sin());
                let rho = h / c.abs().max(s);
                let (s0, s1) = (eta.ln(), rho.ln());
                let s_panels = ((s1 - s0) / 0.5).ceil().max(1.0) as usize;
                let mut inner = Vec::with_capacity(s_panels * rule.nodes.len());
                for sp in 0..s_panels {
                    let a0 = s0 + (s1 - s0) * sp as f64 / s_panels as f64;
                    let a1 = s0 + (s1 - s0) * (sp + 1) as f64 / s_panels as f64;
                    for (sv, ws) in rule.mapped(a0, a1) {
                        let r = sv.exp();
                        inner.push(ws * r * r * field.norm2(a + r * c, r * s));
                    }
                }
                terms.push(wt * pairwise_sum(&inner));
            }
        }
    }
    pairwise_sum(&terms)
}

/// `int |E|^2` over the upper half strip `[a_0 - h, a_0 - h + N] x [0, y_max]`
/// minus the upper halves of the charge boxes.
fn bulk_integral(field: &FieldEval, h: f64, y_max: f64, rule: &GaussLegendre) -> f64 {
    let config = field.config();
    let n = config.len();
    // column edges and whether the column is a charge box
    let mut columns: Vec<(f64, f64, bool)> = Vec::new();
    for i in 0..n as isize {
        let a = config.point(i);
        let next = config.point(i + 1);
        columns.push((a - h, a + h, true));
        let (lo, hi) = (a + h, next - h);
        if hi - lo > 1e-15 * n as f64 {
            let mid = 0.5 * (lo + hi);
            let mut edges = vec![lo];
            let mut d = 2.0 * h;
            while a + d < mid {
                edges.push(a + d);
                d *= 2.0;
            }
            let mut right = Vec::new();
            let mut d = 2.0 * h;
            while next - d > mid {
                right.push(next - d);
                d *= 2.0;
            }
            edges.push(mid);
            edges.extend(right.into_iter().rev());
            edges.push(hi);
            for w in edges.windows(2) {
                if w[1] > w[0] {
                    columns.push((w[0], w[1], false));
                }
            }
        }
    }

    // row edges above the boxes: geometric up to 1, then steps of 1/2
    let mut rows = Vec::new();
    let mut y = h;
    while y < 1.0 && y < y_max {
        let next = (2.0 * y).min(1.0).min(y_max);
        rows.push((y, next));
        y = next;
    }
    while y < y_max {
        let next = (y + 0.5).min(y_max);
        rows.push((y, next));
        y = next;
    }

    let per_column: Vec<f64> = columns
        .par_iter()
        .map(|&(x0, x1, is_box)| {
            let mut cells = Vec::new();
            if !is_box {
                cells.push(cell(field, rule, x0, x1, 0.0, h));
            }
            for &(y0, y1) in &rows {
                cells.push(cell(field, rule, x0, x1, y0, y1));
            }
            pairwise_sum(&cells)
        })
        .collect();
    pairwise_sum(&per_column)
}

fn cell(field: &FieldEval, rule: &GaussLegendre, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let mut terms = Vec::with_capacity(rule.nodes.len() * rule.nodes.len());
    for (x, wx) in rule.mapped(x0, x1) {
        for (y, wy) in rule.mapped(y0, y1) {
            terms.push(wx * wy * field.norm2(x, y));
        }
    }
    pairwise_sum(&terms)
}
