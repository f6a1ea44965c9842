use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::transform::{fft_forward, fft_inverse};
use super::GridSpec;
use crate::{Error, Result};

/// A periodic complex field stored by its Fourier coefficients (FFT order)
/// together with the time it represents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
    pub time: f64,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.modes],
            time: 0.0,
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>, time: f64) -> Result<Self> {
        if coeffs.len() != grid.modes {
            return Err(Error::ShapeMismatch {
                expected: grid.modes,
                found: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs, time })
    }

    /// Field with one nonzero coefficient `û(n) = amplitude`.
    pub fn single_mode(grid: GridSpec, n: i64, amplitude: Complex64) -> Result<Self> {
        let mut f = Self::zeros(grid);
        let idx = grid
            .index(n)
            .ok_or_else(|| Error::InvalidParameter(format!("frequency {n} is off the grid")))?;
        f.coeffs[idx] = amplitude;
        Ok(f)
    }

    /// Samples `u(x_j)`, `x_j = jL/K`, to coefficients.
    pub fn from_physical(grid: GridSpec, values: &[Complex64], time: f64) -> Result<Self> {
        if values.len() != grid.modes {
            return Err(Error::ShapeMismatch {
                expected: grid.modes,
                found: values.len(),
            });
        }
        let mut buf = values.to_vec();
        fft_forward(&mut buf);
        let scale = 1.0 / grid.modes as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Ok(Self {
            grid,
            coeffs: buf,
            time,
        })
    }

    /// Values `u(x_j) = Σ_n û(n) e^{i n κ x_j}` on the collocation grid.
    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        fft_inverse(&mut buf);
        buf
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.grid
            .index(n)
            .map(|i| self.coeffs[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set_coeff(&mut self, n: i64, value: Complex64) -> Result<()> {
        let idx = self
            .grid
            .index(n)
            .ok_or_else(|| Error::InvalidParameter(format!("frequency {n} is off the grid")))?;
        self.coeffs[idx] = value;
        Ok(())
    }

    /// `Σ_n |û(n)|² = ⨍|u|²`.
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    /// `(⨍|u|²)^{1/2}` evaluated from the collocation values.
    pub fn physical_l2_norm(&self) -> f64 {
        let vals = self.to_physical();
        (vals.iter().map(|v| v.norm_sqr()).sum::<f64>() / vals.len() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Multiplies coefficient `n` by `f(n)`.
    pub fn map_by_frequency(&self, f: impl Fn(i64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * f(self.grid.frequency(i)))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
            time: self.time,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            time: self.time,
        }
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Zeroes everything outside the resolved band.
    pub fn truncated(&self) -> Self {
        self.map_by_frequency(|n| {
            if self.grid.in_band(n) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Largest `|û(n)|` among frequencies outside the resolved band.
    pub fn out_of_band_max(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.grid.in_band(self.grid.frequency(*i)))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// `‖self - other‖_{ℓ²}` after checking the grids agree.
    pub fn distance(&self, other: &SpectralField) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Spatial translation `u(· - x₀)`.
    pub fn translated(&self, shift: f64) -> Self {
        let kappa = self.grid.wavenumber();
        self.map_by_frequency(|n| Complex64::from_polar(1.0, -(n as f64) * kappa * shift))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: GridSpec, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..grid.modes)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        SpectralField::from_coeffs(grid, coeffs, 0.0).unwrap()
    }

    #[test]
    fn parseval_round_trip() {
        for &k in &[4usize, 16, 64, 256, 1024, 4096] {
            let grid = GridSpec::torus(k).unwrap();
            let f = random_field(grid, k as u64);
            let back = SpectralField::from_physical(grid, &f.to_physical(), 0.0).unwrap();
            let err = f.distance(&back).unwrap() / f.l2_norm();
            assert!(err <= 1e-12, "K={k}: round trip error {err:e}");
            let rel = (f.physical_l2_norm() - f.l2_norm()).abs() / f.l2_norm();
            assert!(rel <= 1e-12, "K={k}: Plancherel error {rel:e}");
        }
    }

    #[test]
    fn single_mode_is_plane_wave() {
        let grid = GridSpec::torus(16).unwrap();
        let f = SpectralField::single_mode(grid, 3, Complex64::new(1.0, 0.0)).unwrap();
        let vals = f.to_physical();
        for (j, v) in vals.iter().enumerate() {
            let x = j as f64 * grid.period / 16.0;
            let expected = Complex64::from_polar(1.0, 3.0 * x);
            assert!((v - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_wrong_length() {
        let grid = GridSpec::torus(8).unwrap();
        assert!(SpectralField::from_coeffs(grid, vec![Complex64::new(0.0, 0.0); 7], 0.0).is_err());
    }
}
