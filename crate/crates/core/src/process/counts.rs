use serde::{Deserialize, Serialize};

use crate::error::{LogGasError, Result};
use crate::numeric::pairwise_sum;
use crate::torus::TorusConfiguration;

/// Moments of the number of points in `[-T, T]` under the stationarized
/// process of a periodic configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountStats {
    #[serde(rename = "T")]
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    pub mean_square: f64,
}

const MERGE_TOLERANCE: f64 = 1e-14;

/// Exact count moments: as the window center slides over one period the
/// count only changes where `a_i +- T` crosses it, so the moments are finite
/// sums over the intervals between those breakpoints.
pub fn count_statistics(config: &TorusConfiguration, t: f64) -> Result<CountStats> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(LogGasError::InvalidArgument(format!(
            "counting half-width must be positive and finite, got {t}"
        )));
    }
    let n = config.period() as f64;
    let mut breaks = Vec::with_capacity(2 * config.len() + 2);
    breaks.push(0.0);
    breaks.push(n);
    for &a in config.points() {
        for b in [a - t, a + t] {
            let r = b.rem_euclid(n);
            breaks.push(if r >= n { 0.0 } else { r });
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|b, a| (*b - *a).abs() <= MERGE_TOLERANCE * n);
    if let Some(last) = breaks.last_mut() {
        *last = n;
    }

    let mut first = Vec::with_capacity(breaks.len());
    let mut second = Vec::with_capacity(breaks.len());
    for w in breaks.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let c = count_at(config, 0.5 * (w[0] + w[1]), t);
        first.push(len * c);
        second.push(len * c * c);
    }
    let mean = pairwise_sum(&first) / n;
    let mean_square = pairwise_sum(&second) / n;
    Ok(CountStats {
        t,
        mean,
        variance: (mean_square - mean * mean).max(0.0),
        mean_square,
    })
}

/// Number of periodic images of the configuration in `[center - t, center + t]`.
fn count_at(config: &TorusConfiguration, center: f64, t: f64) -> f64 {
    let n = config.period() as f64;
    config
        .points()
        .iter()
        .map(|&a| ((center + t - a) / n).floor() - ((center - t - a) / n).ceil() + 1.0)
        .sum()
}
