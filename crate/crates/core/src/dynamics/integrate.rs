use num_complex::Complex64;

use super::nonlinear::nonlinear_term;
use super::{EquationSpec, IntegratorSpec, Scheme};
use crate::spectral::{GridSpec, SpectralField};
use crate::{Error, Result};

/// Any `|û(n)|` above this aborts the run.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

/// `S(t)`: multiplies `û(n)` by `e^{-it|nκ|^α}`.
pub fn free_evolve(f: &SpectralField, t: f64, alpha: f64) -> SpectralField {
    let grid = f.grid;
    let mut out = f.map_by_frequency(|n| Complex64::from_polar(1.0, -t * grid.symbol(n, alpha)));
    out.time = f.time + t;
    out
}

/// Reusable single-step integrator for one equation on one grid.
pub struct Stepper<'a> {
    grid: GridSpec,
    spec: &'a EquationSpec,
    scheme: Scheme,
    omega: Vec<f64>,
    band: Vec<bool>,
}

impl<'a> Stepper<'a> {
    pub fn new(grid: GridSpec, spec: &'a EquationSpec, scheme: Scheme) -> Result<Self> {
        spec.validate(&grid)?;
        let omega = (0..grid.modes)
            .map(|i| grid.symbol(grid.frequency(i), spec.alpha))
            .collect();
        let band = (0..grid.modes).map(|i| grid.in_band(grid.frequency(i))).collect();
        Ok(Self {
            grid,
            spec,
            scheme,
            omega,
            band,
        })
    }

    /// `-i 𝒩(u, t)`.
    fn rhs(&self, u: &[Complex64], t: f64, out: &mut [Complex64]) -> Result<()> {
        nonlinear_term(&self.grid, self.spec, u, t, out)?;
        out.iter_mut().for_each(|c| *c = Complex64::new(c.im, -c.re));
        Ok(())
    }

    /// `e^{-iωt}` on the resolved band, zero outside.
    fn phases(&self, t: f64) -> Vec<Complex64> {
        self.omega
            .iter()
            .zip(&self.band)
            .map(|(w, keep)| if *keep { Complex64::from_polar(1.0, -t * w) } else { Complex64::new(0.0, 0.0) })
            .collect()
    }

    /// `z = e^{iωt}û` at `t = u.time`.
    pub fn to_interaction(&self, u: &SpectralField) -> Result<Vec<Complex64>> {
        self.grid.ensure_same(&u.grid)?;
        Ok(u.coeffs.iter().zip(self.phases(u.time)).map(|(c, p)| c * p.conj()).collect())
    }

    /// `û = e^{-iωt}z`.
    pub fn from_interaction(&self, z: &[Complex64], t: f64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: z.iter().zip(self.phases(t)).map(|(c, p)| c * p).collect(),
            time: t,
        }
    }

    /// `e^{iωt}(-i𝒩(e^{-iωt}z, t))`, the interaction-picture vector field.
    fn interaction_rhs(&self, z: &[Complex64], t: f64, phase: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let u: Vec<Complex64> = z.iter().zip(phase).map(|(c, p)| c * p).collect();
        self.rhs(&u, t, out)?;
        out.iter_mut().zip(phase).for_each(|(c, p)| *c *= p.conj());
        Ok(())
    }

    /// Advances the interaction-picture state `z` from `t0` to `t0 + h`.
    pub fn step_interaction(&self, z: &[Complex64], t0: f64, h: f64) -> Result<Vec<Complex64>> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {h}")));
        }
        if z.len() != self.grid.modes {
            return Err(Error::ShapeMismatch {
                expected: self.grid.modes,
                found: z.len(),
            });
        }
        match self.scheme {
            Scheme::Rk4Ip => self.rk4ip(z, t0, h),
            Scheme::SplitStep => self.strang(z, t0, h),
        }
    }

    /// Advances `u` from `u.time` to `u.time + dt`.
    pub fn step(&self, u: &SpectralField, dt: f64) -> Result<SpectralField> {
        let z = self.step_interaction(&self.to_interaction(u)?, u.time, dt)?;
        let out = self.from_interaction(&z, u.time + dt);
        check_state(&out)?;
        Ok(out)
    }

    /// Classical RK4 on `z = e^{iωt}û`, whose linear part is exact. This is
    /// the interaction-picture scheme: moving the reference time of `z` is a
    /// constant diagonal change of variables, which RK4 commutes with.
    fn rk4ip(&self, z: &[Complex64], t0: f64, h: f64) -> Result<Vec<Complex64>> {
        let k = z.len();
        let zero = Complex64::new(0.0, 0.0);
        let p0 = self.phases(t0);
        let pm = self.phases(t0 + 0.5 * h);
        let p1 = self.phases(t0 + h);
        let mut k1 = vec![zero; k];
        self.interaction_rhs(z, t0, &p0, &mut k1)?;
        let stage: Vec<Complex64> = z.iter().zip(&k1).map(|(a, b)| a + b * (0.5 * h)).collect();
        let mut k2 = vec![zero; k];
        self.interaction_rhs(&stage, t0 + 0.5 * h, &pm, &mut k2)?;
        let stage: Vec<Complex64> = z.iter().zip(&k2).map(|(a, b)| a + b * (0.5 * h)).collect();
        let mut k3 = vec![zero; k];
        self.interaction_rhs(&stage, t0 + 0.5 * h, &pm, &mut k3)?;
        let stage: Vec<Complex64> = z.iter().zip(&k3).map(|(a, b)| a + b * h).collect();
        let mut k4 = vec![zero; k];
        self.interaction_rhs(&stage, t0 + h, &p1, &mut k4)?;
        Ok((0..k)
            .map(|i| z[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
            .collect())
    }

    /// Half linear step, RK4 on `û' = -i𝒩(û, t)` over `[t₀, t₀+h]`, half
    /// linear step; in `z` the two half steps are one phase and its inverse.
    fn strang(&self, z: &[Complex64], t0: f64, h: f64) -> Result<Vec<Complex64>> {
        let k = z.len();
        let zero = Complex64::new(0.0, 0.0);
        let pm = self.phases(t0 + 0.5 * h);
        let mut y: Vec<Complex64> = z.iter().zip(&pm).map(|(c, p)| c * p).collect();
        let mut k1 = vec![zero; k];
        let mut k2 = vec![zero; k];
        let mut k3 = vec![zero; k];
        let mut k4 = vec![zero; k];
        self.rhs(&y, t0, &mut k1)?;
        let s: Vec<Complex64> = y.iter().zip(&k1).map(|(a, b)| a + b * (0.5 * h)).collect();
        self.rhs(&s, t0 + 0.5 * h, &mut k2)?;
        let s: Vec<Complex64> = y.iter().zip(&k2).map(|(a, b)| a + b * (0.5 * h)).collect();
        self.rhs(&s, t0 + 0.5 * h, &mut k3)?;
        let s: Vec<Complex64> = y.iter().zip(&k3).map(|(a, b)| a + b * h).collect();
        self.rhs(&s, t0 + h, &mut k4)?;
        for i in 0..k {
            y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
        Ok(y.iter().zip(&pm).map(|(c, p)| c * p.conj()).collect())
    }
}

/// A state carried in the interaction picture `z = e^{iωt}û` across many
/// steps. The exact linear flow never touches the stored coefficients, so
/// free evolution accumulates no rounding (repeatedly multiplying by
/// `e^{-iωh}` drifts the modulus by `O(steps·ε)`).
pub struct Propagator<'s, 'a> {
    stepper: &'s Stepper<'a>,
    z: Vec<Complex64>,
    time: f64,
}

impl<'s, 'a> Propagator<'s, 'a> {
    pub fn new(stepper: &'s Stepper<'a>, u: &SpectralField) -> Result<Self> {
        Ok(Self {
            stepper,
            z: stepper.to_interaction(u)?,
            time: u.time,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// One step to `t1 > time`.
    pub fn advance_to(&mut self, t1: f64) -> Result<()> {
        self.z = self.stepper.step_interaction(&self.z, self.time, t1 - self.time)?;
        self.time = t1;
        // |z| = |û| coefficientwise.
        check_coeffs(&self.z, t1)
    }

    pub fn field(&self) -> SpectralField {
        self.stepper.from_interaction(&self.z, self.time)
    }
}

fn check_coeffs(coeffs: &[Complex64], time: f64) -> Result<()> {
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::NonFinite { time });
    }
    let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak > BLOW_UP_THRESHOLD {
        return Err(Error::BlowUp { time, magnitude: peak });
    }
    Ok(())
}

pub(crate) fn check_state(u: &SpectralField) -> Result<()> {
    check_coeffs(&u.coeffs, u.time)
}

/// One step of the configured scheme.
pub fn step(u: &SpectralField, spec: &EquationSpec, integ: &IntegratorSpec, dt: f64) -> Result<SpectralField> {
    Stepper::new(u.grid, spec, integ.scheme)?.step(u, dt)
}

/// Evolves `u` to `u.time + t_end` with `steps` equal steps.
pub fn evolve(u: &SpectralField, spec: &EquationSpec, scheme: Scheme, t_end: f64, steps: usize) -> Result<SpectralField> {
    let stepper = Stepper::new(u.grid, spec, scheme)?;
    let dt = t_end / steps as f64;
    let t0 = u.time;
    let mut p = Propagator::new(&stepper, u)?;
    for j in 1..=steps {
        p.advance_to(t0 + j as f64 * dt)?;
    }
    Ok(p.field())
}
