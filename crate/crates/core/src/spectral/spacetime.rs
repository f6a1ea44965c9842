use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::norms::japanese;
use super::transform::forward_plan;
use super::{GridSpec, NormSpec, SpectralField};
use crate::{Error, Result};

/// Temporal window applied before the time transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Taper {
    None,
    /// Tukey window: cosine ramps covering `fraction` of the window in total.
    Cosine { fraction: f64 },
}

impl Default for Taper {
    fn default() -> Self {
        Taper::Cosine { fraction: 0.1 }
    }
}

impl Taper {
    /// Window weight at relative position `x ∈ [0, 1]`.
    pub fn weight(&self, x: f64) -> f64 {
        match *self {
            Taper::None => 1.0,
            Taper::Cosine { fraction } => {
                if fraction <= 0.0 {
                    return 1.0;
                }
                let half = 0.5 * fraction.min(1.0);
                let edge = x.min(1.0 - x);
                if edge >= half {
                    1.0
                } else {
                    0.5 * (1.0 - (PI * edge / half).cos())
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Taper::Cosine { fraction } if !(0.0..=1.0).contains(&fraction) => Err(
                Error::InvalidParameter(format!("taper fraction must lie in [0, 1], got {fraction}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Samples `û(t_j, n)` at `t_j = j·T/S`, `j = 0..S`, stored time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub grid: GridSpec,
    pub t_end: f64,
    pub time_samples: usize,
    pub values: Vec<Complex64>,
    pub taper: Taper,
}

impl SpaceTimeField {
    pub fn new(
        grid: GridSpec,
        t_end: f64,
        time_samples: usize,
        values: Vec<Complex64>,
        taper: Taper,
    ) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::InvalidParameter(format!("T must be positive, got {t_end}")));
        }
        if time_samples == 0 {
            return Err(Error::InvalidParameter("time_samples must be positive".into()));
        }
        if values.len() != time_samples * grid.modes {
            return Err(Error::ShapeMismatch {
                expected: time_samples * grid.modes,
                found: values.len(),
            });
        }
        taper.validate()?;
        Ok(Self {
            grid,
            t_end,
            time_samples,
            values,
            taper,
        })
    }

    /// Stacks equally spaced fields; their count is the sample count.
    pub fn from_fields(fields: &[SpectralField], t_end: f64, taper: Taper) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::InvalidParameter("no time samples".into()))?;
        let mut values = Vec::with_capacity(fields.len() * first.grid.modes);
        for f in fields {
            first.grid.ensure_same(&f.grid)?;
            values.extend_from_slice(&f.coeffs);
        }
        Self::new(first.grid, t_end, fields.len(), values, taper)
    }

    /// Samples `f(t_j)` for `t_j = j·T/S`.
    pub fn sample(
        grid: GridSpec,
        t_end: f64,
        time_samples: usize,
        taper: Taper,
        mut f: impl FnMut(f64) -> Result<SpectralField>,
    ) -> Result<Self> {
        let mut fields = Vec::with_capacity(time_samples);
        for j in 0..time_samples {
            let field = f(j as f64 * t_end / time_samples as f64)?;
            grid.ensure_same(&field.grid)?;
            fields.push(field);
        }
        Self::from_fields(&fields, t_end, taper)
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.time_samples as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        let k = self.grid.modes;
        &self.values[j * k..(j + 1) * k]
    }

    pub fn field_at(&self, j: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.row(j).to_vec(),
            time: self.time(j),
        }
    }

    /// Window weight of sample `j`, evaluated at the sample midpoint.
    pub fn window(&self, j: usize) -> f64 {
        self.taper
            .weight((j as f64 + 0.5) / self.time_samples as f64)
    }

    /// `‖w‖_{L²(0,T)}` of the taper as sampled.
    pub fn window_mass(&self) -> f64 {
        ((0..self.time_samples).map(|j| self.window(j).powi(2)).sum::<f64>() * self.dt()).sqrt()
    }

    /// `(∫ Σ_x |w(t) u(t,x)|^p dt dx)^{1/p}` on `[0,T] × [0,L)` via the
    /// collocation values; Riemann sums in both variables.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let k = self.grid.modes;
        let dx = self.grid.period / k as f64;
        let mut acc = 0.0;
        for j in 0..self.time_samples {
            let w = self.window(j);
            let vals = self.field_at(j).to_physical();
            acc += vals.iter().map(|v| (w * v.norm()).powf(p)).sum::<f64>();
        }
        (acc * dx * self.dt()).powf(1.0 / p)
    }
}

/// Dispersion surface the modulation weight is measured against.
#[derive(Debug, Clone, PartialEq)]
pub enum Modulation {
    /// `⟨τ + |ξ|^α⟩`.
    Standard { alpha: f64 },
    /// `⟨τ + |ξ|^α − |û₀(n)|²⟩`.
    Gauged { alpha: f64, reference: SpectralField },
}

impl Modulation {
    fn surface(&self, grid: &GridSpec, n: i64) -> Result<f64> {
        Ok(match self {
            Modulation::Standard { alpha } => grid.symbol(n, *alpha),
            Modulation::Gauged { alpha, reference } => {
                grid.ensure_same(&reference.grid)?;
                grid.symbol(n, *alpha) - reference.coeff(n).norm_sqr()
            }
        })
    }
}

/// Discrete `X^{s,b}` norm on `[0,T]`.
///
/// Each mode is first moved to the interaction picture `y(t) = e^{itμ(n)} û(t,n)`,
/// so that `τ + μ(n)` becomes the plain dual variable `σ` of `y` and the
/// stiff phase never has to be resolved by the temporal grid. Then
/// `‖F‖² = (1/T) Σ_n Σ_k ⟨nκ⟩^{2s} ⟨σ_k⟩^{2b} |ŷ(σ_k, n)|²`, with
/// `σ_k = 2πk/T` and `ŷ_k = (T/S) Σ_j w_j y_j e^{-2πijk/S}`.
/// With `s = b = 0` this is exactly `∫ w² Σ_n |û|² dt`.
pub fn xsb_norm(field: &SpaceTimeField, spec: &NormSpec, modulation: &Modulation) -> Result<f64> {
    let big_s = field.time_samples;
    if !big_s.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "time_samples must be a power of two, got {big_s}"
        )));
    }
    let grid = field.grid;
    let b = spec.b.unwrap_or(0.0);
    let dt = field.dt();
    let t_end = field.t_end;
    let fft = forward_plan(big_s);
    let windows: Vec<f64> = (0..big_s).map(|j| field.window(j)).collect();
    let temporal_weights: Vec<f64> = (0..big_s)
        .map(|k| {
            let signed = if k < big_s / 2 { k as f64 } else { k as f64 - big_s as f64 };
            japanese(2.0 * PI * signed / t_end).powf(2.0 * b)
        })
        .collect();

    let mut total = 0.0;
    let mut buf = vec![Complex64::new(0.0, 0.0); big_s];
    for idx in 0..grid.modes {
        let n = grid.frequency(idx);
        if (0..big_s).all(|j| field.values[j * grid.modes + idx] == Complex64::new(0.0, 0.0)) {
            continue;
        }
        let mu = modulation.surface(&grid, n)?;
        for (j, slot) in buf.iter_mut().enumerate() {
            let t = j as f64 * dt;
            *slot = field.values[j * grid.modes + idx] * Complex64::from_polar(windows[j], t * mu);
        }
        fft.process(&mut buf);
        let spatial = spec.weight(grid.physical_frequency(n)).powi(2);
        let temporal: f64 = buf
            .iter()
            .zip(&temporal_weights)
            .map(|(c, w)| w * (c * dt).norm_sqr())
            .sum();
        total += spatial * temporal / t_end;
    }
    Ok(total.sqrt())
}
