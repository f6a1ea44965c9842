use serde::{Deserialize, Serialize};

use crate::spectral::{japanese, GridSpec, SpectralField};
use crate::{Error, Result};

/// Smoothing operator `I`: `Îu(k) = m(k) û(k)`.
///
/// `n` is the threshold `N` and, like the argument of [`i_multiplier`], is
/// measured in mode-index units `|k|`. Supplying `m` (the `M ≥ 1` of the
/// `H^s_M` scale) selects the torus family
/// `m_M(k) = min(1, ((M + |k|)/N)^s)` for `|k| ≥ N`; otherwise the line
/// family `m(k) = (|k|/N)^s` for `|k| ≥ N` is used. Both are 1 below `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IOperatorSpec {
    pub s: f64,
    pub n: f64,
    #[serde(default)]
    pub m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IFamily {
    Line,
    Torus { m: f64 },
}

impl IOperatorSpec {
    pub fn line(s: f64, n: f64) -> Result<Self> {
        let spec = Self { s, n, m: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn torus(s: f64, n: f64, m: f64) -> Result<Self> {
        let spec = Self { s, n, m: Some(m) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn family(&self) -> IFamily {
        match self.m {
            None => IFamily::Line,
            Some(m) => IFamily::Torus { m },
        }
    }

    pub fn with_threshold(&self, n: f64) -> Result<Self> {
        let spec = Self { n, ..*self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s < 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidParameter(format!("I-operator needs s < 0, got {}", self.s)));
        }
        if !(self.n >= 1.0 && self.n.is_finite()) {
            return Err(Error::InvalidParameter(format!("I-operator needs N >= 1, got {}", self.n)));
        }
        if let Some(m) = self.m {
            if !(m >= 1.0 && m <= self.n * self.n) {
                return Err(Error::InvalidParameter(format!(
                    "torus family needs 1 <= M <= N², got M = {m}, N = {}",
                    self.n
                )));
            }
        }
        Ok(())
    }
}

/// `m(ξ)` with `ξ` in the same (mode-index) units as `N`.
pub fn i_multiplier(xi: f64, spec: &IOperatorSpec) -> f64 {
    let a = xi.abs();
    if a < spec.n {
        return 1.0;
    }
    match spec.family() {
        IFamily::Line => (a / spec.n).powf(spec.s),
        IFamily::Torus { m } => ((m + a) / spec.n).powf(spec.s).min(1.0),
    }
}

/// `m(k)` for an integer mode index.
pub fn i_symbol(k: i64, spec: &IOperatorSpec) -> f64 {
    i_multiplier(k as f64, spec)
}

#[allow(non_snake_case)]
pub fn apply_I(u: &SpectralField, spec: &IOperatorSpec) -> SpectralField {
    u.map_by_frequency(|n| num_complex::Complex64::new(i_symbol(n, spec), 0.0))
}

/// `M(Iu) = ‖Iu‖²_{L²} = Σ m(n)²|û(n)|²`.
pub fn modified_mass(u: &SpectralField, spec: &IOperatorSpec) -> f64 {
    u.coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| i_symbol(u.grid.frequency(i), spec).powi(2) * c.norm_sqr())
        .sum()
}

/// Constants of the two-sided bound `‖u‖_{H^s} ≤ C₋‖Iu‖_{L²}`,
/// `‖Iu‖_{L²} ≤ C₊ N^{-s}‖u‖_{H^s}` as attained on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConstants {
    /// `max_k ⟨kκ⟩^s / m(k)`.
    pub lower: f64,
    /// `max_k m(k) / (N^{-s} ⟨kκ⟩^s)`.
    pub upper: f64,
}

pub fn scan_smoothing_constants(spec: &IOperatorSpec, grid: &GridSpec) -> SmoothingConstants {
    let mut lower: f64 = 0.0;
    let mut upper: f64 = 0.0;
    for k in grid.frequencies() {
        let bracket = japanese(grid.physical_frequency(k)).powf(spec.s);
        let m = i_symbol(k, spec);
        lower = lower.max(bracket / m);
        upper = upper.max(m / (spec.n.powf(-spec.s) * bracket));
    }
    SmoothingConstants { lower, upper }
}
