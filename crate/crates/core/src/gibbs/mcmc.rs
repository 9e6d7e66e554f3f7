use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{default_init, fekete_optimize};
use super::potential::Potential;
use crate::error::{LogGasError, Result};

/// Acceptance rate the proposal width is tuned towards during burn-in.
pub const TARGET_ACCEPTANCE: f64 = 0.4;
/// Sweeps between proposal-width adjustments during burn-in.
const TUNING_BATCH: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McmcOptions {
    pub beta: f64,
    /// Total sweeps, burn-in included. One sweep proposes a move for every
    /// particle in turn.
    pub steps: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub n: usize,
    pub beta: f64,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    /// Sweep index of every recorded state.
    pub steps: Vec<usize>,
    /// Sorted recorded states.
    pub states: Vec<Vec<f64>>,
    /// Post burn-in acceptance rate.
    pub acceptance_rate: f64,
    pub proposal_width: f64,
    /// Set when the post burn-in acceptance rate falls outside `(0.1, 0.7)`.
    pub acceptance_warning: bool,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Keeps the first `count` recorded states.
    pub fn truncated(&self, count: usize) -> Self {
        let mut out = self.clone();
        out.states.truncate(count);
        out.steps.truncate(count);
        out
    }
}

/// `w_N(x with x_i -> y) - w_N(x)`.
fn local_delta(x: &[f64], i: usize, y: f64, v: &Potential) -> f64 {
    let xi = x[i];
    let mut log_ratio = 0.0;
    for (j, &xj) in x.iter().enumerate() {
        if j != i {
            log_ratio += ((y - xj) / (xi - xj)).abs().ln();
        }
    }
    -2.0 * log_ratio + x.len() as f64 * (v.evaluate(y) - v.evaluate(xi))
}

/// Single-site random-walk Metropolis chain targeting
/// `exp(-(beta / 2) w_N)`, started from the weighted Fekete points.
pub fn mcmc_sample(v: &Potential, n: usize, opts: McmcOptions) -> Result<SampleSet> {
    let McmcOptions {
        beta,
        steps,
        burn_in,
        thinning,
        seed,
    } = opts;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(LogGasError::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    if n == 0 {
        return Err(LogGasError::InvalidArgument("need at least one particle".into()));
    }
    if steps <= burn_in {
        return Err(LogGasError::BadSchedule(format!(
            "steps ({steps}) must exceed burn-in ({burn_in})"
        )));
    }
    if thinning == 0 || thinning >= steps - burn_in {
        return Err(LogGasError::BadSchedule(format!(
            "thinning {thinning} must be in 1..{}",
            steps - burn_in
        )));
    }

    let mut x = match fekete_optimize(v, n, &default_init(v, n), 1e-8) {
        Ok(r) => r.points,
        Err(_) => default_init(v, n),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = if n > 1 { (x[n - 1] - x[0]) / n as f64 } else { 1.0 };
    let mut width = spread / beta.sqrt().max(1.0);

    let mut states = Vec::new();
    let mut recorded_steps = Vec::new();
    let (mut batch_accepted, mut batch_proposed) = (0usize, 0usize);
    let (mut accepted, mut proposed) = (0usize, 0usize);
    for step in 0..steps {
        for i in 0..n {
            let y = x[i] + width * rng.random_range(-1.0..1.0);
            let delta = local_delta(&x, i, y, v);
            let u: f64 = rng.random();
            let ok = delta.is_finite() && (delta <= 0.0 || u.ln() < -0.5 * beta * delta);
            if ok {
                x[i] = y;
            }
            if step < burn_in {
                batch_proposed += 1;
                batch_accepted += ok as usize;
            } else {
                proposed += 1;
                accepted += ok as usize;
            }
        }
        if step < burn_in && (step + 1) % TUNING_BATCH == 0 {
            let rate = batch_accepted as f64 / batch_proposed as f64;
            width *= (2.0 * (rate - TARGET_ACCEPTANCE)).exp();
            batch_accepted = 0;
            batch_proposed = 0;
        }
        if step >= burn_in && (step - burn_in) % thinning == 0 {
            let mut s = x.clone();
            s.sort_by(f64::total_cmp);
            states.push(s);
            recorded_steps.push(step);
        }
    }
    let acceptance_rate = accepted as f64 / proposed as f64;
    Ok(SampleSet {
        n,
        beta,
        burn_in,
        thinning,
        seed,
        steps: recorded_steps,
        states,
        acceptance_rate,
        proposal_width: width,
        acceptance_warning: !(acceptance_rate > 0.1 && acceptance_rate < 0.7),
    })
}
