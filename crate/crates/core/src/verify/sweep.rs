//! Decay of the corrected-mass increment in the smoothing threshold `N`.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::theory::{almost_conservation_exponent, torus_exponent_candidates};
use crate::dynamics::{run, DiagnosticsSpec, EquationForm, EquationSpec, IntegratorSpec};
use crate::imethod::{corrected_mass, Flow, IOperatorSpec, Variant};
use crate::spectral::{Domain, GridSpec, SpectralField};
use crate::{Error, Result};

/// Increments below this multiple of `max(1, M(0)²)` count as round-off.
pub const SWEEP_NOISE_FLOOR: f64 = 1e-12;

/// Line measures `M⁴` with the plain correction; torus measures the gauged
/// field with the `m_M` family and the `e^{iλtΨ}` phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariant {
    Line,
    Torus,
}

impl SweepVariant {
    pub fn domain(self) -> Domain {
        match self {
            SweepVariant::Line => Domain::Line,
            SweepVariant::Torus => Domain::Circle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub grid: GridSpec,
    pub equation: EquationSpec,
    pub integrator: IntegratorSpec,
    pub variant: SweepVariant,
    /// Sobolev index of the I-operator.
    pub s: f64,
    /// Dyadic thresholds, in mode-index units.
    pub ns: Vec<f64>,
    /// Torus family: `M = N^m_power` (clamped to `[1, N²]`; default `M = N²`).
    #[serde(default = "default_m_power")]
    pub m_power: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_m_power() -> f64 {
    2.0
}

impl SweepSpec {
    pub fn operator(&self, n: f64) -> Result<IOperatorSpec> {
        match self.variant {
            SweepVariant::Line => IOperatorSpec::line(self.s, n),
            SweepVariant::Torus => IOperatorSpec::torus(self.s, n, n.powf(self.m_power).clamp(1.0, n * n)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.len() < 4 {
            return Err(Error::InvalidParameter(format!(
                "sweep needs at least 4 thresholds, got {}",
                self.ns.len()
            )));
        }
        for w in self.ns.windows(2) {
            if w[1] != 2.0 * w[0] {
                return Err(Error::InvalidParameter(format!("thresholds must be dyadic: {:?}", self.ns)));
            }
        }
        if !(0.0..=2.0).contains(&self.m_power) {
            return Err(Error::InvalidParameter(format!("m_power must lie in [0, 2], got {}", self.m_power)));
        }
        for &n in &self.ns {
            self.operator(n)?;
        }
        let gauged = self.equation.form == EquationForm::Gauged;
        if gauged != (self.variant == SweepVariant::Torus) {
            return Err(Error::InvalidParameter(
                "torus sweeps need the gauged form and line sweeps an ungauged one".into(),
            ));
        }
        self.equation.validate(&self.grid)?;
        self.integrator.validate()
    }
}

/// Measured increments per threshold and their log-log fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub variant: SweepVariant,
    pub alpha: f64,
    pub s: f64,
    pub ns: Vec<f64>,
    /// `sup_t |M⁴(t) − M⁴(0)|` over stored snapshots.
    pub decrements: Vec<f64>,
    /// Least-squares slope of `log₂ decrement` against `log₂ N`; absent when
    /// some decrement is zero.
    pub fitted_slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Root-mean-square residual of the fit.
    pub residual: Option<f64>,
    pub theory_exponent: f64,
    /// Both regimes of the torus exponent (equal to the theory one on the line).
    pub candidate_exponents: (f64, f64),
    /// Whether the decrement is nonincreasing up to [`SWEEP_NOISE_FLOOR`].
    pub monotone: bool,
    pub noise_floor: f64,
    pub snapshot_interval: f64,
    pub initial_mass: f64,
    #[serde(default)]
    pub manifest_ref: Option<PathBuf>,
}

impl ScalingReport {
    /// Rows `(N, decrement, log₂ N, log₂ decrement, fitted log₂ decrement)`.
    pub fn rows(&self) -> Vec<[f64; 5]> {
        self.ns
            .iter()
            .zip(&self.decrements)
            .map(|(&n, &d)| {
                let fit = match (self.fitted_slope, self.intercept) {
                    (Some(a), Some(b)) => a * n.log2() + b,
                    _ => f64::NAN,
                };
                [n, d, n.log2(), d.log2(), fit]
            })
            .collect()
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, rms residual)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 || y.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    Some((slope, intercept, (rss / n).sqrt()))
}

/// `sup_j |M⁴(u_j) − M⁴(u_0)|` along stored snapshots for one operator.
pub fn corrected_mass_decrement(
    snapshots: &[SpectralField],
    op: &IOperatorSpec,
    equation: &EquationSpec,
) -> Result<f64> {
    let flow = Flow::of(equation);
    let values = snapshots
        .par_iter()
        .map(|u| {
            let variant = match equation.form {
                EquationForm::Gauged => Variant::Torus {
                    reference: equation.reference()?.clone(),
                    time: u.time,
                },
                _ => Variant::Line,
            };
            corrected_mass(u, op, &flow, &variant)
        })
        .collect::<Result<Vec<f64>>>()?;
    let first = values.first().copied().unwrap_or(0.0);
    Ok(values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max))
}

/// Integrates once (the threshold does not affect the dynamics) and measures
/// the corrected-mass increment for every `N`.
pub fn sweep_almost_conservation(spec: &SweepSpec) -> Result<ScalingReport> {
    spec.validate()?;
    let traj = run(spec.grid, &spec.equation, &spec.integrator, &DiagnosticsSpec::default(), spec.seed)?;
    let mut decrements = Vec::with_capacity(spec.ns.len());
    for &n in &spec.ns {
        decrements.push(corrected_mass_decrement(&traj.snapshots, &spec.operator(n)?, &spec.equation)?);
    }
    let initial_mass = traj.snapshots[0].mass();
    let noise_floor = SWEEP_NOISE_FLOOR * initial_mass.powi(2).max(1.0);
    let monotone = decrements.windows(2).all(|w| w[1] <= w[0] + noise_floor);
    let x: Vec<f64> = spec.ns.iter().map(|n| n.log2()).collect();
    let y: Vec<f64> = decrements
        .iter()
        .map(|&d| if d > 0.0 { d.log2() } else { f64::NAN })
        .collect();
    let fit = fit_line(&x, &y);
    let alpha = spec.equation.alpha;
    let theory_exponent = almost_conservation_exponent(alpha, spec.s, spec.variant.domain())?;
    let candidate_exponents = match spec.variant {
        SweepVariant::Torus => torus_exponent_candidates(alpha, spec.s),
        SweepVariant::Line => (theory_exponent, theory_exponent),
    };
    Ok(ScalingReport {
        variant: spec.variant,
        alpha,
        s: spec.s,
        ns: spec.ns.clone(),
        decrements,
        fitted_slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
        residual: fit.map(|f| f.2),
        theory_exponent,
        candidate_exponents,
        monotone,
        noise_floor,
        snapshot_interval: spec.integrator.dt * spec.integrator.store_every as f64,
        initial_mass,
        manifest_ref: None,
    })
}
