//! Closed-form exponents of the almost-conservation laws and growth bounds.

use crate::spectral::Domain;
use crate::{Error, Result};

fn check(alpha: f64, s: f64) -> Result<()> {
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("need α > 2, got {alpha}")));
    }
    if !(s < 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("need s < 0, got {s}")));
    }
    Ok(())
}

/// The two candidate torus exponents `(−(3/2)α + 2 − 6s, −α − 6s)`.
pub fn torus_exponent_candidates(alpha: f64, s: f64) -> (f64, f64) {
    (-1.5 * alpha + 2.0 - 6.0 * s, -alpha - 6.0 * s)
}

/// Exponent `e` (at `δ = 0`) in `|M⁴(t) − M⁴(0)| ≲ N^{e+δ}`: `−2α + 2` on the
/// line, `max{−(3/2)α + 2 − 6s, −α − 6s}` on the circle.
pub fn almost_conservation_exponent(alpha: f64, s: f64, domain: Domain) -> Result<f64> {
    check(alpha, s)?;
    Ok(match domain {
        Domain::Line => -2.0 * alpha + 2.0,
        Domain::Circle => {
            let (a, b) = torus_exponent_candidates(alpha, s);
            a.max(b)
        }
    })
}

/// `β` in the growth bound `sup_{t≤T} ‖u(t)‖_{H^s} ≲ T^β ‖u₀‖_{H^s}`.
pub fn growth_exponent(alpha: f64, s: f64, delta: f64, domain: Domain) -> Result<f64> {
    check(alpha, s)?;
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("need δ >= 0, got {delta}")));
    }
    let beta = match domain {
        Domain::Line => {
            let a = alpha - 1.0 + 2.0 * s;
            -s * a / ((2.0 * alpha - 2.0 - delta) * a + 2.0 * alpha * s)
        }
        Domain::Circle => {
            let (a, b) = torus_exponent_candidates(alpha, s);
            -2.0 * s / ((-a).min(-b) - delta)
        }
    };
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "growth exponent undefined at α = {alpha}, s = {s}, δ = {delta}"
        )));
    }
    Ok(beta)
}
