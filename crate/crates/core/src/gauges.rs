//! Gauge transforms linking the three equation forms.
//!
//! `𝒢[u](t) = e^{2iλt⨍|u|²} u` maps the original equation to the
//! renormalized one; `𝒥[v](t)^(n) = e^{-iλt|û₀(n)|²} v̂(n)` maps the
//! renormalized equation to the gauged one. Both read the time from the
//! field and act by unimodular factors, so they preserve every `|û(n)|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::Sign;
use crate::spectral::SpectralField;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Inverse => -1.0,
        }
    }
}

/// Frozen spectrum `û₀` and coupling sign used by `𝒥`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeContext {
    pub reference: SpectralField,
    pub sign: Sign,
}

impl GaugeContext {
    pub fn new(reference: SpectralField, sign: Sign) -> Self {
        Self { reference, sign }
    }
}

/// `e^{±2iλt⨍|u|²} u` with `⨍|u|² = Σ|û(n)|²` (conserved by both flows).
pub fn gauge_g(u: &SpectralField, sign: Sign, direction: Direction) -> SpectralField {
    let theta = direction.sign() * 2.0 * sign.coupling() * u.time * u.mass();
    u.scaled(Complex64::from_polar(1.0, theta))
}

/// `v̂(n) ↦ e^{∓iλt|û₀(n)|²} v̂(n)`.
pub fn gauge_j(v: &SpectralField, ctx: &GaugeContext, direction: Direction) -> Result<SpectralField> {
    v.grid.ensure_same(&ctx.reference.grid)?;
    let scale = -direction.sign() * ctx.sign.coupling() * v.time;
    Ok(v.map_by_frequency(|n| Complex64::from_polar(1.0, scale * ctx.reference.coeff(n).norm_sqr())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::InitialDataSpec;
    use crate::spectral::{project, sobolev_norm, Band, GridSpec, NormSpec};
    use proptest::prelude::*;

    fn field(seed: u64, t: f64) -> SpectralField {
        let g = GridSpec::torus(32).unwrap();
        InitialDataSpec::random_rough(0.5, seed, 1.3).build(g, 0).unwrap().with_time(t)
    }

    #[test]
    fn identity_at_time_zero() {
        let u = field(1, 0.0);
        assert_eq!(gauge_g(&u, Sign::Defocusing, Direction::Forward), u);
        let ctx = GaugeContext::new(field(2, 0.0), Sign::Defocusing);
        assert_eq!(gauge_j(&u, &ctx, Direction::Forward).unwrap(), u);
    }

    #[test]
    fn single_mode_phase() {
        let g = GridSpec::torus(16).unwrap();
        let a = 0.7;
        let t = 1.9;
        let u = SpectralField::single_mode(g, 3, Complex64::new(a, 0.0)).unwrap().with_time(t);
        let v = gauge_g(&u, Sign::Defocusing, Direction::Forward);
        let expected = Complex64::from_polar(a, 2.0 * t * a * a);
        assert!((v.coeff(3) - expected).norm() < 1e-15);
        let f = gauge_g(&u, Sign::Focusing, Direction::Forward);
        assert!((f.coeff(3) - expected.conj()).norm() < 1e-15);
    }

    #[test]
    fn zero_reference_is_identity() {
        let v = field(3, 2.5);
        let ctx = GaugeContext::new(SpectralField::zeros(v.grid), Sign::Defocusing);
        assert_eq!(gauge_j(&v, &ctx, Direction::Forward).unwrap(), v);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let v = field(3, 2.5);
        let ctx = GaugeContext::new(SpectralField::zeros(GridSpec::torus(64).unwrap()), Sign::Defocusing);
        assert!(gauge_j(&v, &ctx, Direction::Forward).is_err());
    }

    proptest! {
        #[test]
        fn inverses_norms_and_projection(seed in 0u64..1000, t in -3.0f64..3.0, s in -1.0f64..2.0, band in 0u32..5) {
            let u = field(seed, t);
            let ctx = GaugeContext::new(field(seed + 1, 0.0), Sign::Focusing);
            for sign in [Sign::Defocusing, Sign::Focusing] {
                // The inverse re-reads the mass, so the phase error scales with θ = 2tM.
                let back = gauge_g(&gauge_g(&u, sign, Direction::Forward), sign, Direction::Inverse);
                let theta = 2.0 * t.abs() * u.mass();
                prop_assert!(back.distance(&u).unwrap() <= 1e-14 * (1.0 + theta) * u.l2_norm());
            }
            let w = gauge_j(&u, &ctx, Direction::Forward).unwrap();
            let back = gauge_j(&w, &ctx, Direction::Inverse).unwrap();
            prop_assert!(back.distance(&u).unwrap() <= 1e-14 * u.l2_norm());
            let norm = NormSpec::sobolev(s);
            let g = gauge_g(&u, Sign::Defocusing, Direction::Forward);
            for f in [&g, &w] {
                for n in u.grid.frequencies() {
                    prop_assert!((f.coeff(n).norm() - u.coeff(n).norm()).abs() <= 1e-15 * (1.0 + u.coeff(n).norm()));
                }
                prop_assert!((sobolev_norm(f, &norm) - sobolev_norm(&u, &norm)).abs() <= 1e-13 * sobolev_norm(&u, &norm));
            }
            // 𝒥 is diagonal, so it commutes with every projection.
            let b = Band::Dyadic(1 << band);
            let pj = project(&w, b).unwrap();
            let jp = gauge_j(&project(&u, b).unwrap(), &ctx, Direction::Forward).unwrap();
            prop_assert_eq!(pj, jp);
            // 𝒢 commutes with projection once the phase is frozen at the full mass.
            let theta = Complex64::from_polar(1.0, 2.0 * u.time * u.mass());
            prop_assert_eq!(project(&g, b).unwrap(), project(&u, b).unwrap().scaled(theta));
        }
    }
}
