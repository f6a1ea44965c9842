use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn default_period() -> f64 {
    2.0 * PI
}

fn default_dealias() -> f64 {
    2.0 / 3.0
}

/// Discretization of the periodic domain `ℝ / Lℤ`.
///
/// Frequencies live in `{-K/2, …, K/2 - 1}` and are stored in FFT order
/// `(0, 1, …, K/2 - 1, -K/2, …, -1)`. The resolved (Galerkin) band is
/// `|n| ≤ floor(dealias_fraction · K/2)`; every field produced by the solver
/// is supported there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub modes: usize,
    #[serde(default = "default_period")]
    pub period: f64,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

impl GridSpec {
    pub fn new(modes: usize, period: f64, dealias_fraction: f64) -> Result<Self> {
        let grid = Self {
            modes,
            period,
            dealias_fraction,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// `K` modes on the standard torus `ℝ / 2πℤ` with 2/3 truncation.
    pub fn torus(modes: usize) -> Result<Self> {
        Self::new(modes, default_period(), default_dealias())
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes < 4 || self.modes % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "modes must be even and >= 4, got {}",
                self.modes
            )));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period must be positive, got {}",
                self.period
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias_fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    /// Largest resolved frequency `floor(dealias_fraction · K/2)`.
    pub fn cutoff(&self) -> i64 {
        (self.dealias_fraction * (self.modes / 2) as f64 + 1e-12).floor() as i64
    }

    /// `κ = 2π/L`, the physical frequency of mode `n = 1`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn physical_frequency(&self, n: i64) -> f64 {
        n as f64 * self.wavenumber()
    }

    pub fn min_frequency(&self) -> i64 {
        -((self.modes / 2) as i64)
    }

    pub fn max_frequency(&self) -> i64 {
        (self.modes / 2) as i64 - 1
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.min_frequency() && n <= self.max_frequency()
    }

    pub fn in_band(&self, n: i64) -> bool {
        self.contains(n) && n.abs() <= self.cutoff()
    }

    /// Storage slot of frequency `n`, if it is on the grid.
    pub fn index(&self, n: i64) -> Option<usize> {
        if !self.contains(n) {
            return None;
        }
        let k = self.modes as i64;
        Some(n.rem_euclid(k) as usize)
    }

    /// Signed frequency stored at slot `idx`.
    pub fn frequency(&self, idx: usize) -> i64 {
        let k = self.modes;
        if idx < k / 2 {
            idx as i64
        } else {
            idx as i64 - k as i64
        }
    }

    /// Signed frequencies in storage order.
    pub fn frequencies(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.modes).map(move |i| self.frequency(i))
    }

    /// Resolved frequencies in increasing order.
    pub fn band(&self) -> impl Iterator<Item = i64> {
        let c = self.cutoff().min(self.max_frequency());
        let lo = (-self.cutoff()).max(self.min_frequency());
        lo..=c
    }

    /// `|nκ|^α`, the symbol of `D^α`.
    pub fn symbol(&self, n: i64, alpha: f64) -> f64 {
        fractional_symbol(n, alpha, self.period)
    }

    /// Same physical grid with a different period.
    pub fn with_period(&self, period: f64) -> Result<Self> {
        Self::new(self.modes, period, self.dealias_fraction)
    }

    pub fn same_shape(&self, other: &GridSpec) -> bool {
        self.modes == other.modes
            && self.period.to_bits() == other.period.to_bits()
            && self.dealias_fraction.to_bits() == other.dealias_fraction.to_bits()
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Symbol of the fractional dispersion `D^α = (-∂_x²)^{α/2}` at grid
/// frequency `n` on a torus of period `L`: `|n · 2π/L|^α`.
pub fn fractional_symbol(n: i64, alpha: f64, period: f64) -> f64 {
    let xi = (n as f64 * 2.0 * PI / period).abs();
    if xi == 0.0 {
        0.0
    } else {
        xi.powf(alpha)
    }
}
