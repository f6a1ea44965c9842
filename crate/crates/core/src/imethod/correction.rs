//! Quartic correction of the modified mass and the derivative identities.
//!
//! With `i ∂_t û = |ξ|^α û + λ·(cubic)`, the plain modified mass obeys
//! `d/dt M(Iu) = λ Λ₄(M₄; u)`, `M₄ = (i/2)(m₁² − m₂² + m₃² − m₄²)`. The
//! corrected mass `M⁴ = M(Iu) + λ Λ₄(σ₄; u)` with `σ₄ = −iM₄/φ`,
//! `φ = |ξ₁|^α − |ξ₂|^α + |ξ₃|^α − |ξ₄|^α`, cancels that quartic term, so
//! `d/dt M⁴ = 4λ² Re Λ₆(M₆; u)` with `M₆ = iσ₄(ξ₁, ξ₂, ξ₃, ξ₄₅₆)`. For the
//! free flow (`λ = 0`) the correction vanishes and `M⁴ = M` is conserved.
//!
//! The gauged (torus) variant carries the phase `e^{iλtΨ}` of the frozen
//! spectrum in every slot, and its order-6 derivative splits into the
//! non-resonant sextic term `I` and the resonant quartic term `II`.

use std::sync::Arc;

use num_complex::Complex64;

use super::multilinear::{elongate, lambda_d_of, MultiplierOrderD};
use super::operator::{i_symbol, modified_mass, IOperatorSpec};
use crate::dynamics::{EquationSpec, Sign};
use crate::spectral::{Band, GridSpec, SpectralField};
use crate::verify::{BoundReport, Extremum};
use crate::{Error, Result};

/// The parameters of the flow a mass functional is evaluated along.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flow {
    pub alpha: f64,
    pub sign: Sign,
}

impl Flow {
    pub fn new(alpha: f64, sign: Sign) -> Self {
        Self { alpha, sign }
    }

    pub fn of(spec: &EquationSpec) -> Self {
        Self::new(spec.alpha, spec.sign)
    }

    pub fn coupling(&self) -> f64 {
        self.sign.coupling()
    }
}

/// Whether the measured field carries the gauge phase of a frozen spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    /// Plain `Λ₄(σ₄; u)`.
    Line,
    /// `Λ₄(e^{iλtΨ} σ₄; w)` for a gauged field `w` at time `time`.
    Torus { reference: SpectralField, time: f64 },
}

/// Cached `m(k)²` and `|kκ|^α` for `|k| ≤ range`, falling back to direct
/// evaluation outside.
#[derive(Debug, Clone)]
struct Symbols {
    op: IOperatorSpec,
    grid: GridSpec,
    alpha: f64,
    range: i64,
    m2: Vec<f64>,
    omega: Vec<f64>,
}

impl Symbols {
    fn new(op: &IOperatorSpec, grid: &GridSpec, alpha: f64, range: i64) -> Self {
        let m2 = (-range..=range).map(|k| i_symbol(k, op).powi(2)).collect();
        let omega = (-range..=range).map(|k| grid.symbol(k, alpha)).collect();
        Self {
            op: *op,
            grid: *grid,
            alpha,
            range,
            m2,
            omega,
        }
    }

    fn m2(&self, k: i64) -> f64 {
        if k.abs() <= self.range {
            self.m2[(k + self.range) as usize]
        } else {
            i_symbol(k, &self.op).powi(2)
        }
    }

    fn omega(&self, k: i64) -> f64 {
        if k.abs() <= self.range {
            self.omega[(k + self.range) as usize]
        } else {
            self.grid.symbol(k, self.alpha)
        }
    }

    fn m4_real(&self, k: &[i64]) -> f64 {
        self.m2(k[0]) - self.m2(k[1]) + self.m2(k[2]) - self.m2(k[3])
    }

    fn sigma4(&self, k: &[i64]) -> Result<f64> {
        let numerator = self.m4_real(k);
        if k[0] + k[1] == 0 || k[1] + k[2] == 0 {
            // Paired so that an even multiplier cancels exactly.
            let paired = if k[0] + k[1] == 0 {
                (self.m2(k[0]) - self.m2(k[1])) + (self.m2(k[2]) - self.m2(k[3]))
            } else {
                (self.m2(k[0]) - self.m2(k[3])) - (self.m2(k[1]) - self.m2(k[2]))
            };
            if paired != 0.0 {
                return Err(Error::NonVanishingNumerator {
                    witness: [k[0], k[1], k[2], k[3]],
                    numerator: paired,
                });
            }
            return Ok(0.0);
        }
        if numerator == 0.0 {
            return Ok(0.0);
        }
        let phi = self.omega(k[0]) - self.omega(k[1]) + self.omega(k[2]) - self.omega(k[3]);
        if phi == 0.0 {
            return Err(Error::Degenerate(format!(
                "resonance function vanishes off the resonant set at {k:?}"
            )));
        }
        Ok(0.5 * numerator / phi)
    }
}

fn symbols_for(op: &IOperatorSpec, grid: &GridSpec, alpha: f64) -> Arc<Symbols> {
    Arc::new(Symbols::new(op, grid, alpha, 3 * grid.cutoff() + 1))
}

/// `φ(ξ₁, …, ξ₄) = |ξ₁|^α − |ξ₂|^α + |ξ₃|^α − |ξ₄|^α` at `ξ_j = k_j κ`.
pub fn resonance_function(k: [i64; 4], grid: &GridSpec, alpha: f64) -> f64 {
    grid.symbol(k[0], alpha) - grid.symbol(k[1], alpha) + grid.symbol(k[2], alpha)
        - grid.symbol(k[3], alpha)
}

/// `M₄ = (i/2)(m(ξ₁)² − m(ξ₂)² + m(ξ₃)² − m(ξ₄)²)`.
pub fn m4_multiplier(op: &IOperatorSpec, grid: &GridSpec) -> MultiplierOrderD {
    let sym = symbols_for(op, grid, 2.0);
    MultiplierOrderD::from_fn(4, move |k| Complex64::new(0.0, 0.5 * sym.m4_real(k)))
        .expect("order 4 is valid")
}

/// `σ₄ = −iM₄/φ` at integer indices `k` with `Σk = 0`; zero on the resonant
/// set `{ξ₁+ξ₂ = 0} ∪ {ξ₂+ξ₃ = 0}`, where the numerator is checked to vanish.
/// With `phase = Some((reference, λ, t))` the value is multiplied by
/// `e^{iλtΨ}`.
pub fn sigma4(
    k: [i64; 4],
    op: &IOperatorSpec,
    grid: &GridSpec,
    alpha: f64,
    phase: Option<(&SpectralField, f64, f64)>,
) -> Result<Complex64> {
    if k.iter().sum::<i64>() != 0 {
        return Err(Error::InvalidParameter(format!("{k:?} is not on the zero-sum hyperplane")));
    }
    let range = k.iter().map(|x| x.abs()).max().unwrap_or(0);
    let s = Symbols::new(op, grid, alpha, range).sigma4(&k)?;
    let p = match phase {
        Some((reference, lambda, t)) => psi_phase_value(&k, reference, lambda, t),
        None => Complex64::new(1.0, 0.0),
    };
    Ok(p * s)
}

pub fn sigma4_multiplier(op: &IOperatorSpec, grid: &GridSpec, alpha: f64) -> MultiplierOrderD {
    let sym = symbols_for(op, grid, alpha);
    MultiplierOrderD::new(4, move |k| Ok(Complex64::new(sym.sigma4(k)?, 0.0))).expect("order 4 is valid")
}

/// `M₆(ξ₁, …, ξ₆) = iσ₄(ξ₁, ξ₂, ξ₃, ξ₄+ξ₅+ξ₆)`.
pub fn m6_multiplier(op: &IOperatorSpec, grid: &GridSpec, alpha: f64) -> Result<MultiplierOrderD> {
    Ok(elongate(&sigma4_multiplier(op, grid, alpha), 4, 2)?.scaled(Complex64::new(0.0, 1.0)))
}

fn psi_phase_value(k: &[i64], reference: &SpectralField, lambda: f64, t: f64) -> Complex64 {
    let mut psi = 0.0;
    for (j, &kj) in k.iter().enumerate() {
        if j % 2 == 0 {
            psi += reference.coeff(kj).norm_sqr();
        } else {
            psi -= reference.coeff(-kj).norm_sqr();
        }
    }
    Complex64::from_polar(1.0, lambda * t * psi)
}

/// The gauge phase `e^{iλt Σ_j ±|û₀(n_j)|²}` of an order-`d` form, where
/// `n_j = k_j` in odd slots and `n_j = −k_j` in even ones. For `d = 4` this is
/// `e^{iλtΨ(n₁, …, n₄)}`; for `d = 6` it equals
/// `e^{iλtΨ(n₁, n₂, n₃, n₄₅₆)} e^{−iλtΨ(n₄, n₅, n₆, n₄₅₆)}`.
pub fn psi_phase(order: usize, reference: &SpectralField, lambda: f64, t: f64) -> Result<MultiplierOrderD> {
    let r = reference.clone();
    MultiplierOrderD::from_fn(order, move |k| psi_phase_value(k, &r, lambda, t))
}

fn band_indicator6(grid: &GridSpec, inner_non_resonant: bool) -> MultiplierOrderD {
    let c = grid.cutoff();
    MultiplierOrderD::from_fn(6, move |k| {
        let collapsed = k[3] + k[4] + k[5];
        let keep = collapsed.abs() <= c
            && (!inner_non_resonant || (k[3] + k[4] != 0 && k[4] + k[5] != 0));
        Complex64::new(if keep { 1.0 } else { 0.0 }, 0.0)
    })
    .expect("order 6 is valid")
}

/// Tolerance on the imaginary part of the (real) quartic correction,
/// relative to `max(1, mass²)`.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-12;

/// `(M⁴, Im of the correction)` without the residue assertion.
pub fn corrected_mass_parts(
    u: &SpectralField,
    op: &IOperatorSpec,
    flow: &Flow,
    variant: &Variant,
) -> Result<(f64, f64)> {
    let lambda = flow.coupling();
    let plain = modified_mass(u, op);
    if lambda == 0.0 {
        return Ok((plain, 0.0));
    }
    let sigma = sigma4_multiplier(op, &u.grid, flow.alpha);
    let mult = match variant {
        Variant::Line => sigma,
        Variant::Torus { reference, time } => {
            u.grid.ensure_same(&reference.grid)?;
            sigma.times(&psi_phase(4, reference, lambda, *time)?)?
        }
    };
    let correction = lambda_d_of(&mult, u)? * lambda;
    Ok((plain + correction.re, correction.im))
}

/// `M⁴(Iu) = M(Iu) + λ Λ₄(σ₄[·e^{iλtΨ}]; u)`; fails if the correction has an
/// imaginary part above [`IMAGINARY_RESIDUE_TOLERANCE`]`·max(1, mass²)`.
pub fn corrected_mass(u: &SpectralField, op: &IOperatorSpec, flow: &Flow, variant: &Variant) -> Result<f64> {
    let (value, residue) = corrected_mass_parts(u, op, flow, variant)?;
    let tolerance = IMAGINARY_RESIDUE_TOLERANCE * u.mass().powi(2).max(1.0);
    if residue.abs() > tolerance {
        return Err(Error::ImaginaryResidue {
            residue: residue.abs(),
            tolerance,
        });
    }
    Ok(value)
}

/// Largest grid for the order-6 derivative identity.
pub const ORDER6_MAX_MODES: usize = 32;

/// Derivative predicted by the differentiation law.
///
/// * `order = 4`: `d/dt M(Iu) = λ Re Λ₄(M₄[·e^{iλtΨ}]; u)`.
/// * `order = 6`: `d/dt M⁴(Iu)`. On the line variant this is
///   `4λ² Re Λ₆(M₆·1; u)`; on the torus variant it is `I + II` with
///   `I = 4λ² Re Λ₆(e^{iλtΨ₆} M₆·1·1_{n₄≠n₅, n₅≠n₆}; w)` and
///   `II = 4λ² Im Λ₄(e^{iλtΨ} σ₄ |ŵ(n₄)|²; w)`.
///
/// `1` restricts the collapsed frequency `ξ₄₅₆` to the resolved band, which
/// is exactly what the Galerkin-truncated flow sees.
pub fn mass_derivative_rhs(
    u: &SpectralField,
    op: &IOperatorSpec,
    flow: &Flow,
    order: usize,
    variant: &Variant,
) -> Result<f64> {
    let grid = u.grid;
    let lambda = flow.coupling();
    if let Variant::Torus { reference, .. } = variant {
        grid.ensure_same(&reference.grid)?;
    }
    match order {
        4 => {
            let mut mult = m4_multiplier(op, &grid);
            if let Variant::Torus { reference, time } = variant {
                mult = mult.times(&psi_phase(4, reference, lambda, *time)?)?;
            }
            Ok(lambda * lambda_d_of(&mult, u)?.re)
        }
        6 => {
            if grid.modes > ORDER6_MAX_MODES {
                return Err(Error::CostGuard(format!(
                    "order-6 derivative limited to K <= {ORDER6_MAX_MODES}, got K = {}",
                    grid.modes
                )));
            }
            if lambda == 0.0 {
                return Ok(0.0);
            }
            let m6 = m6_multiplier(op, &grid, flow.alpha)?;
            match variant {
                Variant::Line => {
                    let mult = m6.times(&band_indicator6(&grid, false))?;
                    Ok(4.0 * lambda * lambda * lambda_d_of(&mult, u)?.re)
                }
                Variant::Torus { reference, time } => {
                    let sextic = m6
                        .times(&band_indicator6(&grid, true))?
                        .times(&psi_phase(6, reference, lambda, *time)?)?;
                    let first = 4.0 * lambda * lambda * lambda_d_of(&sextic, u)?.re;
                    let weights: Vec<f64> = u.coeffs.iter().map(|c| c.norm_sqr()).collect();
                    let w = u.clone();
                    let modulus = MultiplierOrderD::from_fn(4, move |k| {
                        let idx = w.grid.index(-k[3]).expect("resolved index");
                        Complex64::new(weights[idx], 0.0)
                    })?;
                    let quartic = sigma4_multiplier(op, &grid, flow.alpha)
                        .times(&psi_phase(4, reference, lambda, *time)?)?
                        .times(&modulus)?;
                    let second = 4.0 * lambda * lambda * lambda_d_of(&quartic, u)?.im;
                    Ok(first + second)
                }
            }
        }
        _ => Err(Error::InvalidParameter(format!("derivative order must be 4 or 6, got {order}"))),
    }
}

/// Worst ratio `|σ₄| / [m(N⁽⁴⁾)² / ((N + N⁽³⁾)(N + N⁽¹⁾)^{α−1})]` over all
/// resolved non-resonant quadruples, with `N_j` the dyadic scale of `|k_j|`.
pub fn scan_sigma4_bound(op: &IOperatorSpec, grid: &GridSpec, alpha: f64) -> Result<BoundReport> {
    let c = grid.cutoff();
    let sym = Symbols::new(op, grid, alpha, c);
    let big_n = op.n;
    let mut report = BoundReport::new(
        "sigma4 pointwise bound: |σ₄| (N+N3)(N+N1)^(α-1) / m(N4)²",
        Extremum::Max,
    );
    report.parameter("alpha", alpha);
    report.parameter("s", op.s);
    report.parameter("N", big_n);
    if let Some(m) = op.m {
        report.parameter("M", m);
    }
    report.parameter("K", grid.modes as f64);
    for k1 in -c..=c {
        for k2 in -c..=c {
            for k3 in -c..=c {
                let k4 = -(k1 + k2 + k3);
                if k4.abs() > c || k1 + k2 == 0 || k2 + k3 == 0 {
                    continue;
                }
                let k = [k1, k2, k3, k4];
                let s = sym.sigma4(&k)?.abs();
                let mut scales: Vec<f64> = k.iter().map(|&x| Band::scale_of(x) as f64).collect();
                scales.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
                let bound = i_symbol(scales[3] as i64, op).powi(2)
                    / ((big_n + scales[2]) * (big_n + scales[0]).powf(alpha - 1.0));
                report.observe(s / bound, &k);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::InitialDataSpec;

    fn torus(k: usize) -> GridSpec {
        GridSpec::torus(k).unwrap()
    }

    #[test]
    fn sigma4_vanishes_when_all_frequencies_are_low() {
        let op = IOperatorSpec::line(-0.3, 100.0).unwrap();
        let g = torus(64);
        assert_eq!(sigma4([3, -5, 7, -5], &op, &g, 3.0, None).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn sigma4_resonant_is_zero() {
        let op = IOperatorSpec::line(-0.3, 2.0).unwrap();
        let g = torus(64);
        assert_eq!(sigma4([9, -9, 4, -4], &op, &g, 3.0, None).unwrap().norm(), 0.0);
        assert_eq!(sigma4([9, 4, -4, -9], &op, &g, 3.0, None).unwrap().norm(), 0.0);
    }

    #[test]
    fn sigma4_detects_a_broken_multiplier() {
        // An odd "multiplier" violates the numerator identity on the resonant set.
        let g = torus(16);
        let sym = Symbols {
            m2: (-3..=3).map(|k: i64| k as f64).collect(),
            ..Symbols::new(&IOperatorSpec::line(-0.3, 1.0).unwrap(), &g, 3.0, 3)
        };
        assert!(matches!(sym.sigma4(&[1, -1, 2, -2]), Err(Error::NonVanishingNumerator { .. })));
    }

    #[test]
    fn alpha_two_resonance_factorizes() {
        let g = torus(64);
        for k1 in -10i64..=10 {
            for k2 in -10i64..=10 {
                for k3 in -10i64..=10 {
                    let k4 = -(k1 + k2 + k3);
                    let phi = resonance_function([k1, k2, k3, k4], &g, 2.0);
                    let exact = -2.0 * ((k1 + k2) * (k2 + k3)) as f64;
                    assert!((phi - exact).abs() < 1e-9, "{k1} {k2} {k3}");
                }
            }
        }
    }

    #[test]
    fn sigma4_matches_definition_off_resonance() {
        let op = IOperatorSpec::line(-0.4, 3.0).unwrap();
        let g = torus(64);
        let k = [12, 1, -7, -6];
        let m = |x: i64| crate::imethod::i_multiplier(x as f64, &op);
        let d = m(12).powi(2) - m(1).powi(2) + m(-7).powi(2) - m(-6).powi(2);
        let phi = resonance_function(k, &g, 3.0);
        let expected = d / (2.0 * phi);
        let got = sigma4(k, &op, &g, 3.0, None).unwrap();
        assert!((got.re - expected).abs() < 1e-15 && got.im == 0.0);
        let reference = InitialDataSpec::random_rough(0.5, 1, 1.0).build(g, 0).unwrap();
        let phased = sigma4(k, &op, &g, 3.0, Some((&reference, 1.0, 0.7))).unwrap();
        assert!((phased.norm() - expected.abs()).abs() < 1e-15);
    }

    #[test]
    fn corrected_mass_reduces_to_plain_mass_below_threshold() {
        let g = torus(32);
        let op = IOperatorSpec::line(-0.3, 64.0).unwrap();
        let u = InitialDataSpec::random_rough(0.0, 3, 1.0).build(g, 0).unwrap();
        let flow = Flow::new(3.0, Sign::Defocusing);
        assert_eq!(corrected_mass(&u, &op, &flow, &Variant::Line).unwrap(), modified_mass(&u, &op));
        let single = SpectralField::single_mode(g, 9, Complex64::new(1.0, 0.5)).unwrap();
        let op2 = IOperatorSpec::line(-0.3, 2.0).unwrap();
        assert_eq!(corrected_mass(&single, &op2, &flow, &Variant::Line).unwrap(), modified_mass(&single, &op2));
    }

    #[test]
    fn free_flow_uses_the_plain_mass() {
        let g = torus(32);
        let op = IOperatorSpec::line(-0.3, 2.0).unwrap();
        let u = InitialDataSpec::random_rough(0.0, 3, 1.0).build(g, 0).unwrap();
        let flow = Flow::new(3.0, Sign::Free);
        assert_eq!(corrected_mass(&u, &op, &flow, &Variant::Line).unwrap(), modified_mass(&u, &op));
    }

    #[test]
    fn correction_is_real_and_quartically_small() {
        let g = torus(32);
        let op = IOperatorSpec::torus(-1.0 / 6.0, 2.0, 2.0).unwrap();
        let flow = Flow::new(3.0, Sign::Focusing);
        let mut worst: f64 = 0.0;
        for seed in 0..8 {
            for amp in [0.1, 1.0, 3.0] {
                let u = InitialDataSpec::random_rough(0.5, seed, amp).build(g, 0).unwrap();
                let variant = Variant::Torus { reference: u.clone(), time: 0.3 };
                for v in [Variant::Line, variant] {
                    let (value, residue) = corrected_mass_parts(&u, &op, &flow, &v).unwrap();
                    assert!(residue.abs() <= 1e-12 * u.mass().powi(2).max(1.0));
                    let ratio = (value - modified_mass(&u, &op)).abs() / modified_mass(&u, &op).powi(2);
                    worst = worst.max(ratio);
                }
            }
        }
        assert!(worst > 0.0 && worst < 1.0, "constant {worst}");
    }

    #[test]
    fn torus_phase_equals_ungauged_line_value() {
        // Λ₄(e^{iλtΨ}σ₄; w) = Λ₄(σ₄; v) with v̂ = e^{iλt|û₀|²} ŵ.
        let g = torus(32);
        let op = IOperatorSpec::torus(-0.2, 2.0, 3.0).unwrap();
        let flow = Flow::new(3.0, Sign::Defocusing);
        let reference = InitialDataSpec::random_rough(0.5, 1, 1.0).build(g, 0).unwrap();
        let w = InitialDataSpec::random_rough(0.5, 2, 1.0).build(g, 0).unwrap();
        let t = 0.9;
        let v = w.map_by_frequency(|n| Complex64::from_polar(1.0, t * reference.coeff(n).norm_sqr()));
        let a = corrected_mass(&w, &op, &flow, &Variant::Torus { reference, time: t }).unwrap();
        let b = corrected_mass(&v, &op, &flow, &Variant::Line).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn order6_guard_and_zero_field() {
        let op = IOperatorSpec::line(-0.3, 2.0).unwrap();
        let flow = Flow::new(3.0, Sign::Defocusing);
        let z = SpectralField::zeros(torus(16));
        for order in [4, 6] {
            assert_eq!(mass_derivative_rhs(&z, &op, &flow, order, &Variant::Line).unwrap(), 0.0);
        }
        let big = SpectralField::zeros(torus(64));
        assert!(matches!(
            mass_derivative_rhs(&big, &op, &flow, 6, &Variant::Line),
            Err(Error::CostGuard(_))
        ));
    }

    #[test]
    fn sigma4_bound_scan_is_finite() {
        let op = IOperatorSpec::line(-0.25, 4.0).unwrap();
        let r = scan_sigma4_bound(&op, &torus(32), 3.0).unwrap();
        assert!(r.worst_ratio.is_finite() && r.worst_ratio > 0.0);
        let k: Vec<i64> = r.worst_witness.clone();
        let s = sigma4([k[0], k[1], k[2], k[3]], &op, &torus(32), 3.0, None).unwrap().norm();
        assert!(s > 0.0);
    }
}
