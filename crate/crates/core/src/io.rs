//! File formats.
//!
//! Configurations are stored as `{"period": N, "points": [...]}` or as CSV
//! with one point per line. Sample sets are CSV with one recorded state per
//! row: the sweep index followed by the sorted coordinates. Every real is
//! written with 17 significant digits so a read after a write is bit-exact.

use serde::Deserialize;

use crate::error::{LogGasError, Result};
use crate::gibbs::SampleSet;
use crate::process::GridFunction;
use crate::torus::TorusConfiguration;

/// `x` with 17 significant digits in scientific notation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    period: usize,
    points: Vec<f64>,
}

pub fn parse_config_json(text: &str) -> Result<TorusConfiguration> {
    let file: ConfigFile =
        serde_json::from_str(text).map_err(|e| LogGasError::Parse(e.to_string()))?;
    TorusConfiguration::new(file.points, file.period)
}

pub fn write_config_json(config: &TorusConfiguration) -> String {
    let points: Vec<String> = config.points().iter().map(|&x| format_real(x)).collect();
    format!(
        "{{\"period\": {}, \"points\": [{}]}}\n",
        config.period(),
        points.join(", ")
    )
}

/// One point per line; the period is the number of points.
pub fn parse_config_csv(text: &str) -> Result<TorusConfiguration> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| LogGasError::Parse(e.to_string()))?;
        if record.len() != 1 {
            return Err(LogGasError::Parse(format!(
                "expected one value per line, got {} on line {}",
                record.len(),
                record.position().map_or(0, |p| p.line())
            )));
        }
        points.push(parse_real(&record[0])?);
    }
    let n = points.len();
    TorusConfiguration::new(points, n)
}

pub fn write_config_csv(config: &TorusConfiguration) -> String {
    config
        .points()
        .iter()
        .map(|&x| format_real(x) + "\n")
        .collect()
}

pub fn write_samples_csv(samples: &SampleSet) -> String {
    let mut out = String::from("step");
    for k in 1..=samples.n {
        out.push_str(&format!(",x{k}"));
    }
    out.push('\n');
    for (step, state) in samples.steps.iter().zip(&samples.states) {
        out.push_str(&step.to_string());
        for &x in state {
            out.push(',');
            out.push_str(&format_real(x));
        }
        out.push('\n');
    }
    out
}

/// Rows of `(step, coordinates)`; every row must have the same width as the
/// header and coordinates must be sorted.
pub fn parse_samples_csv(text: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| LogGasError::Parse(e.to_string()))?
        .clone();
    if headers.is_empty() || &headers[0] != "step" {
        return Err(LogGasError::Parse("first column must be `step`".into()));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| LogGasError::Parse(e.to_string()))?;
        let step = record[0]
            .parse::<usize>()
            .map_err(|_| LogGasError::Parse(format!("bad step index `{}`", &record[0])))?;
        let state = record
            .iter()
            .skip(1)
            .map(parse_real)
            .collect::<Result<Vec<_>>>()?;
        if state.windows(2).any(|p| p[1] < p[0]) {
            return Err(LogGasError::Parse(format!("row for step {step} is not sorted")));
        }
        rows.push((step, state));
    }
    Ok(rows)
}

/// `{"x_min": .., "x_max": .., "y_min": .., "y_max": .., "values": [[..], ..]}`
/// with `values[j][i]` the node at `(x_i, y_j)`.
pub fn parse_grid_json(text: &str) -> Result<GridFunction> {
    let grid: GridFunction =
        serde_json::from_str(text).map_err(|e| LogGasError::Parse(e.to_string()))?;
    grid.validate()?;
    Ok(grid)
}

fn parse_real(s: &str) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| LogGasError::Parse(format!("not a real number: `{s}`")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(LogGasError::NonFinite(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{lattice, random_config};
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn config_json_shape() {
        let c = lattice(2).unwrap();
        assert_eq!(
            write_config_json(&c),
            "{\"period\": 2, \"points\": [0.0000000000000000e0, 1.0000000000000000e0]}\n"
        );
        assert!(parse_config_json("{\"period\": 2, \"points\": [0.0]}").is_err());
        assert!(parse_config_json("{\"period\": 2, \"points\": [0.0, 1.0], \"x\": 1}").is_err());
        assert!(matches!(parse_config_json("[1, 2]"), Err(LogGasError::Parse(_))));
    }

    #[test]
    fn config_csv_errors() {
        assert!(parse_config_csv("0.0\n1.0\n").is_ok());
        assert!(parse_config_csv("0.0,1.0\n").is_err());
        assert!(parse_config_csv("0.0\nabc\n").is_err());
        assert!(parse_config_csv("0.0\nNaN\n").is_err());
    }

    #[test]
    fn samples_round_trip() {
        let rows = parse_samples_csv("step,x1,x2\n10,-0.5,0.5\n12,-0.25,0.75\n").unwrap();
        assert_eq!(rows, vec![(10, vec![-0.5, 0.5]), (12, vec![-0.25, 0.75])]);
        assert!(parse_samples_csv("t,x1\n1,0.0\n").is_err());
        assert!(parse_samples_csv("step,x1,x2\n1,0.5,-0.5\n").is_err());
        assert!(parse_samples_csv("step,x1,x2\n1,0.5\n").is_err());
    }

    #[test]
    fn grid_file() {
        let mut values = vec![vec![0.0; 5]; 5];
        let text = serde_json::json!({
            "x_min": -1.0, "x_max": 1.0, "y_min": -1.0, "y_max": 1.0, "values": values
        })
        .to_string();
        assert!(parse_grid_json(&text).is_ok());
        values[0][0] = 1.0;
        let text = serde_json::json!({
            "x_min": -1.0, "x_max": 1.0, "y_min": -1.0, "y_max": 1.0, "values": values
        })
        .to_string();
        assert!(matches!(parse_grid_json(&text), Err(LogGasError::BadTestFunction(_))));
    }

    proptest! {
        #[test]
        fn configs_round_trip_bit_exact(seed in any::<u64>(), n in 2usize..30) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let c = random_config(n, &mut rng).unwrap();
            let from_json = parse_config_json(&write_config_json(&c)).unwrap();
            let from_csv = parse_config_csv(&write_config_csv(&c)).unwrap();
            prop_assert_eq!(from_json.points(), c.points());
            prop_assert_eq!(from_csv.points(), c.points());
        }
    }
}
