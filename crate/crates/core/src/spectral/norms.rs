use serde::{Deserialize, Serialize};

use super::SpectralField;
use crate::{Error, Result};

/// Sobolev-type exponents. `m` selects the `H^s_M` weight `(M² + ξ²)^{s/2}`;
/// absent (or 1) gives the usual `⟨ξ⟩^s`. `b` is the modulation exponent of
/// the space-time norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    pub s: f64,
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
}

impl NormSpec {
    pub fn sobolev(s: f64) -> Self {
        Self { s, m: None, b: None }
    }

    pub fn sobolev_m(s: f64, m: f64) -> Result<Self> {
        let spec = Self { s, m: Some(m), b: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn space_time(s: f64, b: f64) -> Self {
        Self { s, m: None, b: Some(b) }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(m) = self.m {
            if !(m >= 1.0) {
                return Err(Error::InvalidParameter(format!("M must be >= 1, got {m}")));
            }
        }
        Ok(())
    }

    /// `(M² + ξ²)^{s/2}`.
    pub fn weight(&self, xi: f64) -> f64 {
        let m = self.m.unwrap_or(1.0);
        (m * m + xi * xi).powf(0.5 * self.s)
    }
}

/// `⟨x⟩ = (1 + |x|²)^{1/2}`.
pub fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// `‖f‖_{H^s_M} = (Σ_n (M² + ξ_n²)^s |f̂(n)|²)^{1/2}` with `ξ_n = nκ`.
pub fn sobolev_norm(f: &SpectralField, spec: &NormSpec) -> f64 {
    let grid = f.grid;
    f.coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let w = spec.weight(grid.physical_frequency(grid.frequency(i)));
            w * w * c.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// Scaling-critical Sobolev index `s_c = (1 - α)/2`.
pub fn critical_index(alpha: f64) -> f64 {
    0.5 * (1.0 - alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Line,
    Circle,
}

/// Lowest regularity covered by the local theory: `(2-α)/4` on the line,
/// `(2-α)/6` on the circle. Defined for `α > 2` only.
pub fn lwp_threshold(alpha: f64, domain: Domain) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold defined for alpha > 2, got {alpha}"
        )));
    }
    Ok(match domain {
        Domain::Line => (2.0 - alpha) / 4.0,
        Domain::Circle => (2.0 - alpha) / 6.0,
    })
}

/// Littlewood–Paley style frequency bands on integer modes:
/// `I_1 = [-1, 1]`, `I_N = [-N, -N/2) ∪ (N/2, N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Dyadic(u64),
    AtMost(u64),
    Above(u64),
}

fn check_dyadic(n: u64) -> Result<()> {
    if n >= 1 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{n} is not a dyadic number >= 1")))
    }
}

impl Band {
    pub fn contains(&self, n: i64) -> bool {
        let a = n.unsigned_abs();
        match *self {
            Band::Dyadic(1) => a <= 1,
            Band::Dyadic(big) => 2 * a > big && a <= big,
            Band::AtMost(big) => a <= big,
            Band::Above(big) => a > big,
        }
    }

    /// Dyadic scale `N` with `n ∈ I_N`.
    pub fn scale_of(n: i64) -> u64 {
        let a = n.unsigned_abs();
        if a <= 1 {
            1
        } else {
            a.next_power_of_two()
        }
    }
}

/// Frequency projection onto a dyadic band.
pub fn project(f: &SpectralField, band: Band) -> Result<SpectralField> {
    match band {
        Band::Dyadic(n) | Band::AtMost(n) | Band::Above(n) => check_dyadic(n)?,
    }
    let one = num_complex::Complex64::new(1.0, 0.0);
    let zero = num_complex::Complex64::new(0.0, 0.0);
    Ok(f.map_by_frequency(|n| if band.contains(n) { one } else { zero }))
}
