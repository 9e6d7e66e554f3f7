//! Periodic point configurations on the torus `R / N Z` at unit density and
//! their neighbour-spacing defect tables.
//!
//! A configuration of `N` points is stored sorted inside one fundamental
//! window `[a_1, a_1 + N)`. Indices outside `0..N` follow the periodic
//! extension `a_{k + N} = a_k + N`; [`TorusConfiguration::point`] is the only
//! place that arithmetic lives.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LogGasError, Result};

/// Relative separation below which two points count as coincident.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusConfiguration {
    points: Vec<f64>,
    period: usize,
}

impl TorusConfiguration {
    /// Validates and normalises `points` into one window of length `period`.
    ///
    /// The window starts at the smallest input value, so a configuration
    /// that is already normalised is returned bit-for-bit unchanged.
    pub fn new(points: Vec<f64>, period: usize) -> Result<Self> {
        if period < 2 {
            return Err(LogGasError::BadPeriod(period));
        }
        if points.len() != period {
            return Err(LogGasError::BadLength {
                expected: period,
                got: points.len(),
            });
        }
        if let Some(&bad) = points.iter().find(|x| !x.is_finite()) {
            return Err(LogGasError::NonFinite(bad));
        }
        let n = period as f64;
        let origin = points.iter().copied().fold(f64::INFINITY, f64::min);
        let mut reduced: Vec<f64> = points
            .into_iter()
            .map(|x| {
                let off = (x - origin).rem_euclid(n);
                // rem_euclid can round up to exactly n for tiny negative offsets
                if off >= n {
                    origin
                } else {
                    origin + off
                }
            })
            .collect();
        reduced.sort_by(f64::total_cmp);

        let tol = DUPLICATE_TOLERANCE * n;
        for k in 0..period {
            let (lo, hi) = if k + 1 < period {
                (reduced[k], reduced[k + 1])
            } else {
                (reduced[period - 1], reduced[0] + n)
            };
            if hi - lo < tol {
                return Err(LogGasError::DuplicatePoint {
                    first: lo,
                    second: hi,
                });
            }
        }
        Ok(Self {
            points: reduced,
            period,
        })
    }

    /// Number of points, which is also the circumference of the torus.
    pub fn len(&self) -> usize {
        self.period
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `a_k` for any integer `k` (zero-based), with `a_{k+N} = a_k + N`.
    pub fn point(&self, k: isize) -> f64 {
        let n = self.period as isize;
        let wraps = k.div_euclid(n);
        self.points[k.rem_euclid(n) as usize] + (wraps * n) as f64
    }

    /// Nearest-neighbour gaps `u_{1,i}`, including the wrap-around gap.
    pub fn gaps(&self) -> Vec<f64> {
        (0..self.period as isize)
            .map(|i| self.point(i + 1) - self.point(i))
            .collect()
    }

    pub fn min_gap(&self) -> f64 {
        self.gaps().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Every point shifted by `c`; the index order is kept.
    pub fn translated(&self, c: f64) -> Self {
        Self {
            points: self.points.iter().map(|x| x + c).collect(),
            period: self.period,
        }
    }

    /// True when all nearest-neighbour gaps equal 1 to within `tol`.
    pub fn is_lattice_translate(&self, tol: f64) -> bool {
        self.gaps().iter().all(|g| (g - 1.0).abs() <= tol)
    }
}

/// The perfect lattice `0, 1, ..., N-1`.
pub fn lattice(n: usize) -> Result<TorusConfiguration> {
    if n < 2 {
        return Err(LogGasError::BadPeriod(n));
    }
    Ok(TorusConfiguration {
        points: (0..n).map(|k| k as f64).collect(),
        period: n,
    })
}

/// Sinusoidal lattice perturbation `a_i = (i - 1) + eps * sin(2 pi q i / N)`
/// for `i = 1..N`.
///
/// Modes alias: `q` and `N - q` give mirror-image perturbations, and when
/// `q * 2 / N` is an integer every sample of the sine vanishes (e.g. `N = 2,
/// q = 1`), so the result is the plain lattice whatever `eps` is.
pub fn perturb_lattice(n: usize, mode: usize, eps: f64) -> Result<TorusConfiguration> {
    if n < 2 {
        return Err(LogGasError::BadPeriod(n));
    }
    if mode == 0 || mode >= n {
        return Err(LogGasError::BadMode {
            mode,
            max: n - 1,
        });
    }
    if !eps.is_finite() || eps.abs() >= 0.5 {
        return Err(LogGasError::AmplitudeTooLarge { amplitude: eps });
    }
    let nf = n as f64;
    let points = (1..=n)
        .map(|i| {
            let phase = 2.0 * std::f64::consts::PI * (mode * i) as f64 / nf;
            (i - 1) as f64 + eps * phase.sin()
        })
        .collect();
    TorusConfiguration::new(points, n)
}

/// `N` independent uniform points on `[0, N)`, redrawn until simple.
pub fn random_config<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TorusConfiguration> {
    let nf = n as f64;
    loop {
        let points: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * nf).collect();
        match TorusConfiguration::new(points, n) {
            Err(LogGasError::DuplicatePoint { .. }) => continue,
            other => return other,
        }
    }
}

/// Random configuration whose nearest-neighbour gaps are all at least
/// `min_gap` (< 1): gaps are `min_gap` plus a flat-Dirichlet share of the
/// remaining length, and the whole pattern gets a uniform random offset.
pub fn random_gapped_config<R: Rng + ?Sized>(
    n: usize,
    min_gap: f64,
    rng: &mut R,
) -> Result<TorusConfiguration> {
    if !(0.0..1.0).contains(&min_gap) {
        return Err(LogGasError::InvalidArgument(format!(
            "min_gap must lie in [0, 1), got {min_gap}"
        )));
    }
    let weights: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    let slack = (1.0 - min_gap) * n as f64;
    let mut x = rng.random::<f64>();
    let mut points = Vec::with_capacity(n);
    for w in &weights {
        points.push(x);
        x += min_gap + slack * w / total;
    }
    TorusConfiguration::new(points, n)
}

/// Spacings `u_{p,i} = a_{i+p} - a_i` and defects `b_{p,i} = u_{p,i} - p`
/// for `1 <= p <= N` and `1 <= i <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectTable {
    n: usize,
    // row-major, row p-1 holds u_{p,.}
    u: Vec<f64>,
}

impl DefectTable {
    pub fn period(&self) -> usize {
        self.n
    }

    /// `u_{p,i}` with `p` in `1..=N` and zero-based `i`.
    pub fn u(&self, p: usize, i: usize) -> f64 {
        self.u[(p - 1) * self.n + i]
    }

    pub fn b(&self, p: usize, i: usize) -> f64 {
        self.u(p, i) - p as f64
    }

    pub fn u_row(&self, p: usize) -> &[f64] {
        &self.u[(p - 1) * self.n..p * self.n]
    }

    pub fn b_row(&self, p: usize) -> Vec<f64> {
        self.u_row(p).iter().map(|u| u - p as f64).collect()
    }
}

pub fn defect_table(config: &TorusConfiguration) -> DefectTable {
    let n = config.len();
    let mut u = Vec::with_capacity(n * n);
    for p in 1..=n as isize {
        for i in 0..n as isize {
            u.push(config.point(i + p) - config.point(i));
        }
    }
    DefectTable { n, u }
}

/// Point density used by the scaling relation between admissible classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Density(f64);

impl Density {
    pub fn new(m: f64) -> Result<Self> {
        if m > 0.0 && m.is_finite() {
            Ok(Self(m))
        } else {
            Err(LogGasError::NonpositiveDensity(m))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn new_sorts_and_validates() {
        let c = TorusConfiguration::new(vec![1.0, 0.0], 2).unwrap();
        assert_eq!(c.points(), &[0.0, 1.0]);
        let c = TorusConfiguration::new(vec![0.0, 1.5], 2).unwrap();
        assert_eq!(c.points(), &[0.0, 1.5]);
    }

    #[test]
    fn new_rejects_duplicates_mod_n() {
        assert!(matches!(
            TorusConfiguration::new(vec![0.0, 2.0], 2),
            Err(LogGasError::DuplicatePoint { .. })
        ));
        assert!(TorusConfiguration::new(vec![0.0, 1.0 - 1e-13], 2).is_ok());
        assert!(matches!(
            TorusConfiguration::new(vec![0.0, 3.0, 2.0 + 1e-14], 3),
            Err(LogGasError::DuplicatePoint { .. })
        ));
    }

    #[test]
    fn new_rejects_bad_length_and_nan() {
        assert_eq!(
            TorusConfiguration::new(vec![0.0], 2),
            Err(LogGasError::BadLength {
                expected: 2,
                got: 1
            })
        );
        assert!(matches!(
            TorusConfiguration::new(vec![0.0, f64::NAN], 2),
            Err(LogGasError::NonFinite(_))
        ));
    }

    #[test]
    fn lattice_points() {
        assert_eq!(lattice(2).unwrap().points(), &[0.0, 1.0]);
        assert_eq!(lattice(4).unwrap().points(), &[0.0, 1.0, 2.0, 3.0]);
        let t = defect_table(&lattice(7).unwrap());
        for p in 1..=7 {
            assert!(t.b_row(p).iter().all(|&b| b == 0.0));
        }
    }

    #[test]
    fn periodic_accessor() {
        let c = TorusConfiguration::new(vec![0.0, 1.5], 2).unwrap();
        assert_eq!(c.point(2), 2.0);
        assert_eq!(c.point(3), 3.5);
        assert_eq!(c.point(-1), -0.5);
        assert_eq!(c.gaps(), vec![1.5, 0.5]);
    }

    #[test]
    fn perturbation_cases() {
        assert_eq!(perturb_lattice(8, 1, 0.0).unwrap(), lattice(8).unwrap());
        // sin(pi) and sin(2 pi) alias to the lattice up to round-off
        let c = perturb_lattice(2, 1, 0.25).unwrap();
        assert!((c.points()[0] - 0.0).abs() < 1e-15);
        assert!((c.points()[1] - 1.0).abs() < 1e-15);
        assert!(matches!(
            perturb_lattice(4, 1, 0.6),
            Err(LogGasError::AmplitudeTooLarge { .. })
        ));
        assert!(matches!(
            perturb_lattice(4, 4, 0.1),
            Err(LogGasError::BadMode { .. })
        ));
    }

    #[test]
    fn defect_table_hand_values() {
        let c = TorusConfiguration::new(vec![0.0, 1.5], 2).unwrap();
        let t = defect_table(&c);
        assert_eq!(t.u(1, 0), 1.5);
        assert_eq!(t.u(1, 1), 0.5);
        assert_eq!(t.b(1, 0), 0.5);
        assert_eq!(t.b(1, 1), -0.5);
        assert_eq!(t.u(2, 0), 2.0);
    }

    #[test]
    fn density_positive() {
        assert!(Density::new(0.5).is_ok());
        assert!(Density::new(0.0).is_err());
        assert!(Density::new(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn row_sums_are_pn(seed in any::<u64>(), n in 2usize..40) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let c = random_config(n, &mut rng).unwrap();
            let t = defect_table(&c);
            for p in 1..=n {
                let s: f64 = t.u_row(p).iter().sum();
                prop_assert!((s - (p * n) as f64).abs() <= 1e-12 * (n * n) as f64);
                prop_assert!(t.u_row(p).iter().all(|&u| u > 0.0));
            }
        }

        #[test]
        fn defect_table_translation_invariant(seed in any::<u64>(), n in 2usize..20, c in -50.0f64..50.0) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let cfg = random_config(n, &mut rng).unwrap();
            let moved = TorusConfiguration::new(cfg.translated(c).points().to_vec(), n).unwrap();
            let (t0, t1) = (defect_table(&cfg), defect_table(&moved));
            for p in 1..=n {
                for i in 0..n {
                    prop_assert!((t0.u(p, i) - t1.u(p, i)).abs() < 1e-11 * n as f64);
                }
            }
        }

        #[test]
        fn perturbation_close_to_lattice(n in 3usize..40, q in 1usize..40, eps in -0.49f64..0.49) {
            prop_assume!(q < n);
            let t = defect_table(&perturb_lattice(n, q, eps).unwrap());
            prop_assert!(t.b_row(1).iter().all(|b| b.abs() <= 2.0 * eps.abs() + 1e-12));
        }

        #[test]
        fn normalisation_is_idempotent(seed in any::<u64>(), n in 2usize..30) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let c = random_config(n, &mut rng).unwrap();
            let again = TorusConfiguration::new(c.points().to_vec(), n).unwrap();
            prop_assert_eq!(c, again);
        }
    }
}
