//! Small numerical kernels shared by the energy, field and pairing code:
//! Gauss-Legendre rules, an adaptive 1D integrator, pairwise summation and
//! polynomial extrapolation to zero.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::error::{LogGasError, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Tricomi initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for k in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared instance for `n` nodes.
    pub fn cached(n: usize) -> std::sync::Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, std::sync::Arc<GaussLegendre>>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| std::sync::Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let terms: Vec<f64> = self.mapped(a, b).map(|(x, w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of [`adaptive_integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Absolute difference between the accepted fine-level sum and the
    /// coarse-level sum over the final panels.
    pub error: f64,
    pub panels: usize,
}

const ADAPTIVE_ORDER: usize = 10;

/// Globally adaptive bisection: every panel carries the difference between
/// its Gauss-Legendre value and the sum over its two halves, and the panel
/// with the largest difference is split until the differences sum to at
/// most `tol`. `breaks` are interior points where the integrand is known to
/// lose smoothness and seed the initial panels.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
    max_depth: usize,
) -> Result<Integral> {
    if !(a < b) {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    let rule = GaussLegendre::cached(ADAPTIVE_ORDER);
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let panel = |lo: f64, hi: f64, depth: usize| {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &f);
        let right = rule.integrate(mid, hi, &f);
        let coarse = rule.integrate(lo, hi, &f);
        Panel {
            lo,
            hi,
            value: left + right,
            error: (left + right - coarse).abs(),
            depth,
        }
    };
    let mut heap: BinaryHeap<Panel> = cuts.windows(2).map(|w| panel(w[0], w[1], 0)).collect();
    loop {
        let total: f64 = heap.iter().map(|p| p.error).sum();
        let magnitude: f64 = heap.iter().map(|p| p.value.abs()).sum();
        if total <= tol.max(4.0 * f64::EPSILON * magnitude) {
            break;
        }
        let worst = heap.pop().expect("at least one panel");
        if worst.depth >= max_depth {
            return Err(LogGasError::QuadratureFailure);
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(panel(worst.lo, mid, worst.depth + 1));
        heap.push(panel(mid, worst.hi, worst.depth + 1));
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    Ok(Integral {
        value: pairwise_sum(&values),
        error: panels.iter().map(|p| p.error).sum(),
        panels: panels.len(),
    })
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    depth: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Recursive pairwise summation; error grows like `log n` rather than `n`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        xs.iter().sum()
    } else {
        let (l, r) = xs.split_at(xs.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

/// Value at `h = 0` of the polynomial through `(h_k, v_k)` (Neville).
pub fn extrapolate_to_zero(hs: &[f64], vs: &[f64]) -> f64 {
    assert_eq!(hs.len(), vs.len());
    assert!(!hs.is_empty());
    let mut p = vs.to_vec();
    let n = hs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (hs[i + m] * p[i] - hs[i] * p[i + 1]) / (hs[i + m] - hs[i]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..=20 {
            let rule = GaussLegendre::new(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n}");
            for deg in 0..2 * n {
                let exact = if deg % 2 == 0 {
                    2.0 / (deg as f64 + 1.0)
                } else {
                    0.0
                };
                let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn adaptive_handles_kinks() {
        let r = adaptive_integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, &[], 1e-10, 60).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-9);
        let r = adaptive_integrate(|x: f64| x.abs(), -1.0, 2.0, &[0.0], 1e-12, 40).unwrap();
        assert!((r.value - 2.5).abs() < 1e-13);
        assert!(r.error >= 0.0);
    }

    #[test]
    fn adaptive_reports_depth_failure() {
        let r = adaptive_integrate(|x: f64| 1.0 / x.abs().sqrt(), -1.0, 1.0, &[], 1e-14, 3);
        assert_eq!(r, Err(LogGasError::QuadratureFailure));
    }

    #[test]
    fn extrapolation_removes_polynomial_bias() {
        let f = |h: f64| 3.0 + 2.0 * h - 5.0 * h * h;
        let hs = [0.1, 0.05, 0.025];
        let vs: Vec<f64> = hs.iter().map(|&h| f(h)).collect();
        assert!((extrapolate_to_zero(&hs, &vs) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
    }
}
