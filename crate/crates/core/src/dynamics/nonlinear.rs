//! Fourier-side nonlinearities of the three equation forms.
//!
//! All of them are Galerkin truncations: only triples of resolved
//! frequencies contribute, and only resolved outputs are kept.

use num_complex::Complex64;

use super::{EquationForm, EquationSpec};
use crate::spectral::transform::cubic_product;
use crate::spectral::{GridSpec, SpectralField};
use crate::Result;

/// `Σ_{n₁-n₂+n₃=n} û(n₁) conj û(n₂) û(n₃)`, i.e. the coefficients of `|u|²u`.
pub fn cubic(u: &SpectralField) -> SpectralField {
    let c = &u.coeffs;
    SpectralField {
        grid: u.grid,
        coeffs: cubic_product(&u.grid, c, c, c),
        time: u.time,
    }
}

/// `⨍|u|² = Σ|û(n)|²` over the resolved band.
pub(crate) fn band_mass(grid: &GridSpec, coeffs: &[Complex64]) -> f64 {
    grid.band()
        .map(|n| coeffs[grid.index(n).expect("band inside grid")].norm_sqr())
        .sum()
}

/// `𝒩₁(v)`: the cubic sum restricted to `Γ(n)` (`n₂ ≠ n₁`, `n₂ ≠ n₃`).
///
/// Obtained from the full product by removing the two resonant lines, which
/// each contribute `(Σ|v̂|²)v̂(n)` and overlap on `n₁ = n₂ = n₃ = n`.
pub fn non_resonant_1(v: &SpectralField) -> SpectralField {
    let grid = v.grid;
    let full = cubic(v);
    let p = band_mass(&grid, &v.coeffs);
    let mut out = full;
    for n in grid.band() {
        let i = grid.index(n).expect("band inside grid");
        let c = v.coeffs[i];
        out.coeffs[i] += -2.0 * p * c + c.norm_sqr() * c;
    }
    out
}

/// `ℛ₁(v)(n) = |v̂(n)|² v̂(n)`.
pub fn resonant_1(v: &SpectralField) -> SpectralField {
    v.truncated().map_by_frequency(|n| Complex64::new(v.coeff(n).norm_sqr(), 0.0))
}

/// Per-mode gauge phase `e^{iλt|û₀(n)|²}` (the inverse second gauge).
pub(crate) fn reference_phases(reference: &SpectralField, coupling: f64, t: f64) -> Vec<Complex64> {
    reference
        .coeffs
        .iter()
        .map(|r| Complex64::from_polar(1.0, coupling * t * r.norm_sqr()))
        .collect()
}

/// `𝒩₂(w)(n) = Σ_{Γ(n)} e^{iλtΨ(n̄)} ŵ(n₁) conj ŵ(n₂) ŵ(n₃)` with
/// `Ψ = |û₀(n₁)|² − |û₀(n₂)|² + |û₀(n₃)|² − |û₀(n)|²`.
///
/// The phase factorizes over the slots, so this is `𝒩₁` of the ungauged
/// field `v̂ = e^{iλt|û₀|²} ŵ`, moved back by `e^{-iλt|û₀(n)|²}`.
pub fn non_resonant_2(
    w: &SpectralField,
    reference: &SpectralField,
    coupling: f64,
    t: f64,
) -> Result<SpectralField> {
    w.grid.ensure_same(&reference.grid)?;
    let phases = reference_phases(reference, coupling, t);
    let v = SpectralField {
        grid: w.grid,
        coeffs: w.coeffs.iter().zip(&phases).map(|(c, p)| c * p).collect(),
        time: w.time,
    };
    let mut out = non_resonant_1(&v);
    for (c, p) in out.coeffs.iter_mut().zip(&phases) {
        *c *= p.conj();
    }
    out.time = w.time;
    Ok(out)
}

/// `ℛ₂(w)(n) = (|ŵ(n)|² − |û₀(n)|²) ŵ(n)`.
pub fn resonant_2(w: &SpectralField, reference: &SpectralField) -> Result<SpectralField> {
    w.grid.ensure_same(&reference.grid)?;
    Ok(w
        .truncated()
        .map_by_frequency(|n| Complex64::new(w.coeff(n).norm_sqr() - reference.coeff(n).norm_sqr(), 0.0)))
}

/// The nonlinear term `𝒩` of `i ∂_t û = |nκ|^α û + 𝒩(û, t)`, sign included.
/// The gauged form reads the physical time from `u.time`.
pub fn nonlinearity(u: &SpectralField, spec: &EquationSpec) -> Result<SpectralField> {
    let mut out = SpectralField::zeros(u.grid).with_time(u.time);
    nonlinear_term(&u.grid, spec, &u.coeffs, u.time, &mut out.coeffs)?;
    Ok(out)
}

/// Allocation-light kernel behind [`nonlinearity`], used by the integrators.
pub(crate) fn nonlinear_term(
    grid: &GridSpec,
    spec: &EquationSpec,
    u: &[Complex64],
    t: f64,
    out: &mut [Complex64],
) -> Result<()> {
    let lambda = spec.coupling();
    if lambda == 0.0 {
        out.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        return Ok(());
    }
    match spec.form {
        EquationForm::Original => {
            let full = cubic_product(grid, u, u, u);
            for (o, f) in out.iter_mut().zip(full) {
                *o = f * lambda;
            }
        }
        EquationForm::Renormalized => {
            let full = cubic_product(grid, u, u, u);
            let p = band_mass(grid, u);
            for (i, (o, f)) in out.iter_mut().zip(full).enumerate() {
                let keep = grid.in_band(grid.frequency(i));
                *o = if keep { (f - 2.0 * p * u[i]) * lambda } else { Complex64::new(0.0, 0.0) };
            }
        }
        EquationForm::Gauged => {
            let reference = spec.reference()?;
            grid.ensure_same(&reference.grid)?;
            let phases = reference_phases(reference, lambda, t);
            let v: Vec<Complex64> = u.iter().zip(&phases).map(|(c, p)| c * p).collect();
            let full = cubic_product(grid, &v, &v, &v);
            let p = band_mass(grid, &v);
            for (i, o) in out.iter_mut().enumerate() {
                if !grid.in_band(grid.frequency(i)) {
                    *o = Complex64::new(0.0, 0.0);
                    continue;
                }
                let vi = v[i];
                let n1 = (full[i] - 2.0 * p * vi + vi.norm_sqr() * vi) * phases[i].conj();
                let r2 = (u[i].norm_sqr() - reference.coeffs[i].norm_sqr()) * u[i];
                *o = (n1 - r2) * lambda;
            }
        }
    }
    Ok(())
}
