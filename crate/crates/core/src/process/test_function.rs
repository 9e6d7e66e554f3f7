//! Compactly supported C^1 test functions on the plane.
//!
//! Built-in shapes are products of quintic smoothstep bumps (C^2), either in
//! the coordinates `(x, y)` or in `(x, y - x)`; the latter probes a band of
//! pair distances directly. Sampled grids are interpolated with Catmull-Rom
//! splines (C^1) and extended by zero.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LogGasError, Result};

/// Maximum of the quintic smoothstep derivative, `30 u^2 (1-u)^2` at `u = 1/2`.
const SMOOTHSTEP_SLOPE: f64 = 1.875;

/// `s(1 - |t - center| / half_width)` with `s(u) = 6u^5 - 15u^4 + 10u^3`:
/// equal to 1 at the center, vanishing with two derivatives at the edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite() && center.is_finite()) {
            return Err(LogGasError::BadTestFunction(format!(
                "bump needs finite center and positive half-width, got ({center}, {half_width})"
            )));
        }
        Ok(Self { center, half_width })
    }

    pub fn value(&self, t: f64) -> f64 {
        let u = 1.0 - (t - self.center).abs() / self.half_width;
        if u <= 0.0 {
            0.0
        } else {
            u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let d = t - self.center;
        let u = 1.0 - d.abs() / self.half_width;
        if u <= 0.0 {
            0.0
        } else {
            -d.signum() * 30.0 * u * u * (1.0 - u) * (1.0 - u) / self.half_width
        }
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }

    fn slope_bound(&self) -> f64 {
        SMOOTHSTEP_SLOPE / self.half_width
    }

    /// `int bump = half_width` (the smoothstep integrates to 1/2 per side).
    pub fn integral(&self) -> f64 {
        self.half_width
    }
}

/// Sampled values on a uniform node grid, interpolated by bicubic
/// Catmull-Rom splines. The two outermost rings of nodes must be zero so the
/// interpolant, extended by zero, stays C^1 and vanishes off the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// `values[j][i]` at `(x_i, y_j)`.
    pub values: Vec<Vec<f64>>,
}

impl GridFunction {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LogGasError::BadTestFunction(msg));
        let ny = self.values.len();
        if ny < 5 {
            return bad(format!("grid needs at least 5 rows, got {ny}"));
        }
        let nx = self.values[0].len();
        if nx < 5 || self.values.iter().any(|r| r.len() != nx) {
            return bad("grid rows must share a length of at least 5".into());
        }
        if !(self.x_min < self.x_max && self.y_min < self.y_max)
            || ![self.x_min, self.x_max, self.y_min, self.y_max]
                .iter()
                .all(|v| v.is_finite())
        {
            return bad("grid extent must be finite and non-empty".into());
        }
        if self.values.iter().flatten().any(|v| !v.is_finite()) {
            return bad("grid values must be finite".into());
        }
        for j in 0..ny {
            for i in 0..nx {
                let ring = i.min(nx - 1 - i).min(j).min(ny - 1 - j);
                if ring < 2 && self.values[j][i] != 0.0 {
                    return bad(format!("node ({i}, {j}) on the outer two rings must be zero"));
                }
            }
        }
        Ok(())
    }

    fn nx(&self) -> usize {
        self.values[0].len()
    }

    fn ny(&self) -> usize {
        self.values.len()
    }

    fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx() - 1) as f64
    }

    fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny() - 1) as f64
    }

    fn node(&self, i: isize, j: isize) -> f64 {
        if i < 0 || j < 0 || i as usize >= self.nx() || j as usize >= self.ny() {
            0.0
        } else {
            self.values[j as usize][i as usize]
        }
    }

    /// Value and partial derivatives.
    fn eval(&self, x: f64, y: f64) -> (f64, f64, f64) {
        if x <= self.x_min || x >= self.x_max || y <= self.y_min || y >= self.y_max {
            return (0.0, 0.0, 0.0);
        }
        let (dx, dy) = (self.dx(), self.dy());
        let fx = (x - self.x_min) / dx;
        let fy = (y - self.y_min) / dy;
        let (i, j) = (fx.floor() as isize, fy.floor() as isize);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let (wx, dwx) = catmull_rom_weights(tx);
        let (wy, dwy) = catmull_rom_weights(ty);
        let (mut v, mut vx, mut vy) = (0.0, 0.0, 0.0);
        for (b, (wyb, dwyb)) in wy.iter().zip(&dwy).enumerate() {
            for (a, (wxa, dwxa)) in wx.iter().zip(&dwx).enumerate() {
                let p = self.node(i - 1 + a as isize, j - 1 + b as isize);
                v += wxa * wyb * p;
                vx += dwxa * wyb * p;
                vy += wxa * dwyb * p;
            }
        }
        (v, vx / dx, vy / dy)
    }

    /// Sampled bounds over the grid (8 samples per cell), inflated by 10%.
    fn sampled_norms(&self) -> (f64, f64) {
        let per_cell = 8;
        let sx = (self.nx() - 1) * per_cell;
        let sy = (self.ny() - 1) * per_cell;
        let (mut sup, mut grad) = (0.0f64, 0.0f64);
        for jj in 0..=sy {
            let y = self.y_min + (self.y_max - self.y_min) * jj as f64 / sy as f64;
            for ii in 0..=sx {
                let x = self.x_min + (self.x_max - self.x_min) * ii as f64 / sx as f64;
                let (v, gx, gy) = self.eval(x, y);
                sup = sup.max(v.abs());
                grad = grad.max(gx.hypot(gy));
            }
        }
        (1.1 * sup, 1.1 * grad)
    }
}

/// Weights (and their derivatives in `t`) of the four Catmull-Rom nodes.
fn catmull_rom_weights(t: f64) -> ([f64; 4], [f64; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        [
            0.5 * (-t + 2.0 * t2 - t3),
            0.5 * (2.0 - 5.0 * t2 + 3.0 * t3),
            0.5 * (t + 4.0 * t2 - 3.0 * t3),
            0.5 * (-t2 + t3),
        ],
        [
            0.5 * (-1.0 + 4.0 * t - 3.0 * t2),
            0.5 * (-10.0 * t + 9.0 * t2),
            0.5 * (1.0 + 8.0 * t - 9.0 * t2),
            0.5 * (-2.0 * t + 3.0 * t2),
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `amp * g(x) * h(y)`.
    Product { amp: f64, g: Bump, h: Bump },
    /// `amp * g(x) * h(y - x)`.
    Sheared { amp: f64, g: Bump, h: Bump },
    Grid(GridFunction),
}

/// A C^1 test function with its support box `[-T, T]^2` (`T >= 1`) and
/// declared bounds on `|phi|` and `|grad phi|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunction2D {
    shape: Shape,
    support: f64,
    sup_norm: f64,
    grad_sup_norm: f64,
}

impl TestFunction2D {
    pub fn new(shape: Shape) -> Result<Self> {
        let (support, sup_norm, grad_sup_norm) = match &shape {
            Shape::Product { amp, g, h } => {
                check_amp(*amp)?;
                let t = [g.lo(), g.hi(), h.lo(), h.hi()]
                    .iter()
                    .fold(0.0f64, |m, v| m.max(v.abs()));
                (t, amp.abs(), amp.abs() * g.slope_bound().hypot(h.slope_bound()))
            }
            Shape::Sheared { amp, g, h } => {
                check_amp(*amp)?;
                let t = [g.lo(), g.hi(), g.lo() + h.lo(), g.hi() + h.hi()]
                    .iter()
                    .fold(0.0f64, |m, v| m.max(v.abs()));
                let (sg, sh) = (g.slope_bound(), h.slope_bound());
                (t, amp.abs(), amp.abs() * (sg + sh).hypot(sh))
            }
            Shape::Grid(grid) => {
                grid.validate()?;
                let t = [grid.x_min, grid.x_max, grid.y_min, grid.y_max]
                    .iter()
                    .fold(0.0f64, |m, v| m.max(v.abs()));
                let (s, gs) = grid.sampled_norms();
                (t, s, gs)
            }
        };
        Ok(Self {
            shape,
            support: support.max(1.0),
            sup_norm,
            grad_sup_norm,
        })
    }

    pub fn product(amp: f64, g: Bump, h: Bump) -> Result<Self> {
        Self::new(Shape::Product { amp, g, h })
    }

    pub fn sheared(amp: f64, g: Bump, h: Bump) -> Result<Self> {
        Self::new(Shape::Sheared { amp, g, h })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// `T` such that the function vanishes outside `[-T, T]^2`.
    pub fn support_half_width(&self) -> f64 {
        self.support
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn grad_sup_norm(&self) -> f64 {
        self.grad_sup_norm
    }

    /// Same shape with the amplitude multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let shape = match &self.shape {
            Shape::Product { amp, g, h } => Shape::Product {
                amp: amp * s,
                g: *g,
                h: *h,
            },
            Shape::Sheared { amp, g, h } => Shape::Sheared {
                amp: amp * s,
                g: *g,
                h: *h,
            },
            Shape::Grid(grid) => {
                let mut grid = grid.clone();
                grid.values.iter_mut().flatten().for_each(|v| *v *= s);
                Shape::Grid(grid)
            }
        };
        Self::new(shape)
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        match &self.shape {
            Shape::Product { amp, g, h } => amp * g.value(x) * h.value(y),
            Shape::Sheared { amp, g, h } => amp * g.value(x) * h.value(y - x),
            Shape::Grid(grid) => grid.eval(x, y).0,
        }
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        match &self.shape {
            Shape::Product { amp, g, h } => [
                amp * g.derivative(x) * h.value(y),
                amp * g.value(x) * h.derivative(y),
            ],
            Shape::Sheared { amp, g, h } => {
                let (gv, gd) = (g.value(x), g.derivative(x));
                let (hv, hd) = (h.value(y - x), h.derivative(y - x));
                [amp * (gd * hv - gv * hd), amp * gv * hd]
            }
            Shape::Grid(grid) => {
                let (_, gx, gy) = grid.eval(x, y);
                [gx, gy]
            }
        }
    }

    /// Points in `s` where `s -> phi(s, s + d)` loses smoothness.
    pub fn diagonal_breaks(&self, d: f64) -> Vec<f64> {
        match &self.shape {
            Shape::Product { g, h, .. } => vec![
                g.lo(),
                g.center,
                g.hi(),
                h.lo() - d,
                h.center - d,
                h.hi() - d,
            ],
            Shape::Sheared { g, .. } => vec![g.lo(), g.center, g.hi()],
            Shape::Grid(grid) => {
                let mut b: Vec<f64> = (0..grid.nx())
                    .map(|i| grid.x_min + i as f64 * grid.dx())
                    .collect();
                b.extend((0..grid.ny()).map(|j| grid.y_min + j as f64 * grid.dy() - d));
                b
            }
        }
    }

    /// Checks the declared norms against a `samples x samples` grid over the
    /// support box and the gradient against central differences.
    pub fn check(&self, samples: usize) -> Result<()> {
        let t = self.support;
        let h = 1e-6;
        for j in 0..samples {
            let y = -t + 2.0 * t * (j as f64 + 0.5) / samples as f64;
            for i in 0..samples {
                let x = -t + 2.0 * t * (i as f64 + 0.5) / samples as f64;
                let v = self.evaluate(x, y);
                let g = self.gradient(x, y);
                if v.abs() > self.sup_norm * (1.0 + 1e-12) {
                    return Err(LogGasError::BadTestFunction(format!(
                        "|phi({x}, {y})| = {} exceeds declared sup norm {}",
                        v.abs(),
                        self.sup_norm
                    )));
                }
                if g[0].hypot(g[1]) > self.grad_sup_norm * (1.0 + 1e-12) {
                    return Err(LogGasError::BadTestFunction(format!(
                        "|grad phi({x}, {y})| exceeds declared bound {}",
                        self.grad_sup_norm
                    )));
                }
                if i % 7 == 0 && j % 7 == 0 {
                    let fx = (self.evaluate(x + h, y) - self.evaluate(x - h, y)) / (2.0 * h);
                    let fy = (self.evaluate(x, y + h) - self.evaluate(x, y - h)) / (2.0 * h);
                    let scale = 1.0 + self.grad_sup_norm;
                    if (fx - g[0]).abs() > 1e-6 * scale || (fy - g[1]).abs() > 1e-6 * scale {
                        return Err(LogGasError::BadTestFunction(format!(
                            "gradient at ({x}, {y}) disagrees with finite differences"
                        )));
                    }
                }
            }
        }
        let outside = [(t + 0.1, 0.0), (0.0, -t - 0.1), (t + 1.0, t + 1.0)];
        if outside.iter().any(|&(x, y)| self.evaluate(x, y) != 0.0) {
            return Err(LogGasError::BadTestFunction(
                "function does not vanish outside its support box".into(),
            ));
        }
        Ok(())
    }
}

fn check_amp(amp: f64) -> Result<()> {
    if amp.is_finite() {
        Ok(())
    } else {
        Err(LogGasError::BadTestFunction(format!("amplitude {amp} is not finite")))
    }
}

/// Parses the built-in family:
/// `product:amp=1,gc=0,gw=0.4,hc=1,hw=0.4` or `sheared:amp=1,gc=0,gw=2,hc=1,hw=0.5`.
/// Missing keys default to `amp = 1`, centers `0`, half-widths `0.5`.
impl FromStr for TestFunction2D {
    type Err = LogGasError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let (mut amp, mut gc, mut gw, mut hc, mut hw) = (1.0, 0.0, 0.5, 0.0, 0.5);
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| LogGasError::Parse(format!("expected key=value, got `{item}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| LogGasError::Parse(format!("bad number in `{item}`")))?;
            match key.trim() {
                "amp" => amp = value,
                "gc" => gc = value,
                "gw" => gw = value,
                "hc" => hc = value,
                "hw" => hw = value,
                other => return Err(LogGasError::Parse(format!("unknown key `{other}`"))),
            }
        }
        let (g, h) = (Bump::new(gc, gw)?, Bump::new(hc, hw)?);
        match kind.trim() {
            "product" => Self::product(amp, g, h),
            "sheared" => Self::sheared(amp, g, h),
            other => Err(LogGasError::Parse(format!("unknown test function kind `{other}`"))),
        }
    }
}
