use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{LogGasError, Result};

/// A polynomial confining potential `V(x) = sum_k c_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    name: String,
    coeffs: Vec<f64>,
}

impl Potential {
    /// `coeffs[k]` multiplies `x^k`. Trailing zeros are dropped.
    pub fn polynomial(name: impl Into<String>, coeffs: Vec<f64>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(LogGasError::BadPotential(
                "coefficients must be finite and non-empty".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            coeffs,
        })
    }

    /// `x^2`.
    pub fn quadratic() -> Self {
        Self {
            name: "quad".into(),
            coeffs: vec![0.0, 0.0, 1.0],
        }
    }

    /// `x^4`.
    pub fn quartic() -> Self {
        Self {
            name: "quartic".into(),
            coeffs: vec![0.0, 0.0, 0.0, 0.0, 1.0],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Same potential plus a constant.
    pub fn shifted(&self, c: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += c;
        Self {
            name: format!("{}+{c}", self.name),
            coeffs,
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(2)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * x + (k * (k - 1)) as f64 * c)
    }

    /// `V(x) - 2 log|x|` increases from `|x| = 1e3` to `|x| = 1e6` on both
    /// sides and is positive at `1e3`.
    pub fn growth_ok(&self) -> bool {
        let excess = |x: f64| self.evaluate(x) - 2.0 * x.abs().ln();
        [1.0, -1.0].iter().all(|&s| {
            let (near, far) = (excess(s * 1e3), excess(s * 1e6));
            near.is_finite() && far.is_finite() && near > 0.0 && far > near
        })
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for Potential {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

/// `quad`, `quartic`, or `poly:c0,c1,...,ck` (ascending powers).
impl FromStr for Potential {
    type Err = LogGasError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "quad" => return Ok(Self::quadratic()),
            "quartic" => return Ok(Self::quartic()),
            _ => {}
        }
        let body = s
            .strip_prefix("poly:")
            .ok_or_else(|| LogGasError::Parse(format!("unknown potential `{s}`")))?;
        let coeffs = body
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| LogGasError::Parse(format!("bad coefficient `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::polynomial(s, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let potentials: Vec<Potential> = ["quad", "quartic", "poly:0.3,-1,0.5,0.2,0.25"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        for v in &potentials {
            for k in 0..=200 {
                let x = -10.0 + 0.1 * k as f64 + 1e-3;
                let h = 1e-5 * x.abs().max(1.0);
                let fd = (v.evaluate(x + h) - v.evaluate(x - h)) / (2.0 * h);
                let d = v.derivative(x);
                assert!((fd - d).abs() <= 1e-6 * d.abs().max(1.0), "{v} at {x}");
                let fd2 = (v.derivative(x + h) - v.derivative(x - h)) / (2.0 * h);
                let d2 = v.second_derivative(x);
                assert!((fd2 - d2).abs() <= 1e-6 * d2.abs().max(1.0), "{v} at {x}");
            }
        }
    }

    #[test]
    fn growth_condition() {
        assert!(Potential::quadratic().growth_ok());
        assert!(Potential::quartic().growth_ok());
        assert!(!"poly:0,1".parse::<Potential>().unwrap().growth_ok());
        assert!(!"poly:0,0,-1".parse::<Potential>().unwrap().growth_ok());
        assert!(!"poly:0,0,0,1".parse::<Potential>().unwrap().growth_ok());
    }

    #[test]
    fn parse_errors() {
        assert!("cubic".parse::<Potential>().is_err());
        assert!("poly:1,x".parse::<Potential>().is_err());
        assert!("poly:1,inf".parse::<Potential>().is_err());
        let v: Potential = "poly:1,0,2,0,0".parse().unwrap();
        assert_eq!(v.coefficients(), &[1.0, 0.0, 2.0]);
        assert_eq!(v.evaluate(2.0), 9.0);
    }
}
